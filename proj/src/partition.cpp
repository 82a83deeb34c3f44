// SPDX-License-Identifier: Apache-2.0
#include "bjlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bjlab {

Partition::Partition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw InvalidArgument("Partition: no blocks");
    offsets_.reserve(sizes_.size());
    long half_inner = 0;
    for (int s : sizes_) {
        if (s < 1) throw InvalidArgument("Partition: block sizes must be >= 1");
        offsets_.push_back(n_);
        n_ += s;
        half_inner += static_cast<long>(s) * (s - 1) / 2;
    }
    K_ = N() - half_inner;
}

int Partition::size(int i) const {
    if (i < 1 || i > m()) throw InvalidArgument("Partition::size: block index out of range");
    return sizes_[static_cast<std::size_t>(i - 1)];
}

int Partition::offset(int i) const {
    if (i < 1 || i > m()) throw InvalidArgument("Partition::offset: block index out of range");
    return offsets_[static_cast<std::size_t>(i - 1)];
}

bool Partition::all_unit_blocks() const {
    return std::all_of(sizes_.begin(), sizes_.end(), [](int s) { return s == 1; });
}

namespace {

void check_pivot(const Partition& p, BlockIndex idx) {
    if (idx.i < 1 || idx.j < 1 || idx.i > p.m() || idx.j > p.m() || idx.i > idx.j)
        throw InvalidArgument("pivot pair out of range or not ordered i <= j");
}

int pivot_order(const Partition& p, BlockIndex idx) {
    return idx.i == idx.j ? p.size(idx.i) : p.size(idx.i) + p.size(idx.j);
}

// Global element index of local row r of the pivot submatrix at (i, j).
int pivot_global(const Partition& p, BlockIndex idx, int r) {
    const int ni = p.size(idx.i);
    return r < ni ? p.offset(idx.i) + r : p.offset(idx.j) + (r - ni);
}

} // namespace

ElementaryBlockMatrix::ElementaryBlockMatrix(Partition p, BlockIndex idx, DenseMatrix hatU)
    : p_(std::move(p)), idx_(idx), hatU_(std::move(hatU)) {
    check_pivot(p_, idx_);
    const std::size_t d = static_cast<std::size_t>(pivot_order(p_, idx_));
    if (hatU_.rows() != d || hatU_.cols() != d)
        throw DimensionMismatch("ElementaryBlockMatrix: hatU order does not match pivot blocks");
    const DenseMatrix G = multiply_tn(hatU_, hatU_);
    if (max_abs_diff(G, DenseMatrix::identity(d)) > 1e-12)
        throw InvalidArgument("ElementaryBlockMatrix: hatU not orthogonal within 1e-12");
}

DenseMatrix ElementaryBlockMatrix::to_dense() const { return embed(p_, idx_, hatU_); }

DenseMatrix embed(const Partition& p, BlockIndex idx, const DenseMatrix& hatU) {
    check_pivot(p, idx);
    const int d = pivot_order(p, idx);
    if (hatU.rows() != static_cast<std::size_t>(d) || hatU.cols() != static_cast<std::size_t>(d))
        throw DimensionMismatch("embed: hatU order does not match pivot blocks");
    DenseMatrix U = DenseMatrix::identity(static_cast<std::size_t>(p.n()));
    for (int r = 0; r < d; ++r) {
        const int gr = pivot_global(p, idx, r);
        for (int c = 0; c < d; ++c) {
            const int gc = pivot_global(p, idx, c);
            U(static_cast<std::size_t>(gr), static_cast<std::size_t>(gc)) =
                hatU(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    }
    return U;
}

SymmetricMatrix extract_pivot_submatrix(const SymmetricMatrix& A, const Partition& p,
                                        BlockIndex idx) {
    check_pivot(p, idx);
    if (A.order() != static_cast<std::size_t>(p.n()))
        throw DimensionMismatch("extract_pivot_submatrix: matrix order != partition order");
    const int d = pivot_order(p, idx);
    SymmetricMatrix S(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c <= r; ++c)
            S.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                  A(static_cast<std::size_t>(pivot_global(p, idx, r)),
                    static_cast<std::size_t>(pivot_global(p, idx, c))));
    return S;
}

long vec_block_offset(const Partition& p, int i, int j) {
    if (i < 1 || j <= i || j > p.m()) throw InvalidArgument("vec_block_offset: need 1 <= i < j <= m");
    long off = 0;
    for (int jj = 2; jj <= j; ++jj) {
        const int last_i = (jj == j) ? i - 1 : jj - 1;
        for (int ii = 1; ii <= last_i; ++ii) off += static_cast<long>(p.size(ii)) * p.size(jj);
    }
    return off;
}

VecImage vec(const SymmetricMatrix& A, const Partition& p) {
    if (A.order() != static_cast<std::size_t>(p.n()))
        throw DimensionMismatch("vec: matrix order != partition order");
    VecImage out{p, std::vector<double>(static_cast<std::size_t>(p.K()))};
    std::size_t pos = 0;
    for (int j = 2; j <= p.m(); ++j)
        for (int i = 1; i < j; ++i) {
            const int oi = p.offset(i);
            const int oj = p.offset(j);
            for (int c = 0; c < p.size(j); ++c)        // column-major within the block
                for (int r = 0; r < p.size(i); ++r)
                    out.v[pos++] = A(static_cast<std::size_t>(oi + r),
                                     static_cast<std::size_t>(oj + c));
        }
    return out;
}

SymmetricMatrix vec0_inverse(const VecImage& v) {
    const Partition& p = v.p;
    if (v.v.size() != static_cast<std::size_t>(p.K()))
        throw DimensionMismatch("vec0_inverse: vector length != K");
    SymmetricMatrix A(static_cast<std::size_t>(p.n()));
    std::size_t pos = 0;
    for (int j = 2; j <= p.m(); ++j)
        for (int i = 1; i < j; ++i) {
            const int oi = p.offset(i);
            const int oj = p.offset(j);
            for (int c = 0; c < p.size(j); ++c)
                for (int r = 0; r < p.size(i); ++r)
                    A.set(static_cast<std::size_t>(oi + r), static_cast<std::size_t>(oj + c),
                          v.v[pos++]);
        }
    return A;
}

SymmetricMatrix annihilate_pivot(const SymmetricMatrix& A, const Partition& p, BlockIndex idx) {
    check_pivot(p, idx);
    if (A.order() != static_cast<std::size_t>(p.n()))
        throw DimensionMismatch("annihilate_pivot: matrix order != partition order");
    SymmetricMatrix B = A;
    auto zero_block = [&](int bi, int bj) {
        for (int r = 0; r < p.size(bi); ++r)
            for (int c = 0; c < p.size(bj); ++c)
                B.set(static_cast<std::size_t>(p.offset(bi) + r),
                      static_cast<std::size_t>(p.offset(bj) + c), 0.0);
    };
    zero_block(idx.i, idx.i);
    if (idx.j != idx.i) {
        zero_block(idx.j, idx.j);
        zero_block(idx.i, idx.j); // symmetric storage covers (j, i)
    }
    return B;
}

std::vector<int> inverse_permutation(const std::vector<int>& q_image) {
    const int m = static_cast<int>(q_image.size());
    std::vector<int> inv(static_cast<std::size_t>(m), 0);
    for (int k = 1; k <= m; ++k) {
        const int img = q_image[static_cast<std::size_t>(k - 1)];
        if (img < 1 || img > m || inv[static_cast<std::size_t>(img - 1)] != 0)
            throw InvalidArgument("inverse_permutation: image is not a permutation");
        inv[static_cast<std::size_t>(img - 1)] = k;
    }
    return inv;
}

Partition permuted_sizes(const Partition& p, const std::vector<int>& q_image) {
    if (static_cast<int>(q_image.size()) != p.m())
        throw DimensionMismatch("permuted_sizes: permutation length != m");
    (void)inverse_permutation(q_image); // validates bijection
    std::vector<int> sizes;
    sizes.reserve(q_image.size());
    for (int img : q_image) sizes.push_back(p.size(img));
    return Partition(std::move(sizes));
}

DenseMatrix block_permutation_matrix(const Partition& p, const std::vector<int>& q_image) {
    const Partition pq = permuted_sizes(p, q_image);
    DenseMatrix P(static_cast<std::size_t>(p.n()), static_cast<std::size_t>(p.n()));
    for (int t = 1; t <= p.m(); ++t) {
        const int src = q_image[static_cast<std::size_t>(t - 1)];
        for (int r = 0; r < pq.size(t); ++r)
            P(static_cast<std::size_t>(p.offset(src) + r),
              static_cast<std::size_t>(pq.offset(t) + r)) = 1.0;
    }
    return P;
}

} // namespace bjlab

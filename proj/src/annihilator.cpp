// SPDX-License-Identifier: Apache-2.0

#include "bjlab/annihilator.hpp"

#include <cmath>
#include <string>

#include "bjlab/errors.hpp"
#include "bjlab/linalg.hpp"
#include "bjlab/rng.hpp"

namespace bjlab {

namespace {

constexpr long kMaterializeLimit = 2000;

DenseMatrix kron(const DenseMatrix& A, const DenseMatrix& B) {
    DenseMatrix C(A.rows() * B.rows(), A.cols() * B.cols());
    for (std::size_t ar = 0; ar < A.rows(); ++ar)
        for (std::size_t ac = 0; ac < A.cols(); ++ac) {
            const double a = A(ar, ac);
            if (a == 0.0) continue;
            for (std::size_t br = 0; br < B.rows(); ++br)
                for (std::size_t bc = 0; bc < B.cols(); ++bc)
                    C(ar * B.rows() + br, ac * B.cols() + bc) = a * B(br, bc);
        }
    return C;
}

void place(DenseMatrix& R, long row0, long col0, const DenseMatrix& M) {
    for (std::size_t r = 0; r < M.rows(); ++r)
        for (std::size_t c = 0; c < M.cols(); ++c)
            R(static_cast<std::size_t>(row0) + r, static_cast<std::size_t>(col0) + c) = M(r, c);
}

DenseMatrix sub_block(const DenseMatrix& U, std::size_t r0, std::size_t c0, std::size_t rows,
                      std::size_t cols) {
    DenseMatrix B(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) B(r, c) = U(r0 + r, c0 + c);
    return B;
}

void check_orthogonal(const DenseMatrix& U, const std::string& what) {
    if (U.rows() != U.cols()) throw DimensionMismatch(what + ": matrix not square");
    const DenseMatrix G = multiply_tn(U, U);
    double dev = 0.0;
    for (std::size_t r = 0; r < G.rows(); ++r)
        for (std::size_t c = 0; c < G.cols(); ++c)
            dev = std::max(dev, std::abs(G(r, c) - (r == c ? 1.0 : 0.0)));
    if (dev > 1e-12) throw InvalidArgument(what + ": matrix is not orthogonal (deviation " +
                                           std::to_string(dev) + ")");
}

} // namespace

DenseMatrix commutation_matrix(int p, int q) {
    if (p < 1 || q < 1) throw InvalidArgument("commutation_matrix: sizes must be positive");
    DenseMatrix K(static_cast<std::size_t>(p) * q, static_cast<std::size_t>(p) * q);
    for (int r = 0; r < p; ++r)
        for (int c = 0; c < q; ++c)
            K(static_cast<std::size_t>(c + r * q), static_cast<std::size_t>(r + c * p)) = 1.0;
    return K;
}

ShuffleMatrices shuffle_matrices(int nr, int ni, int nj) {
    if (nr < 1 || ni < 1 || nj < 1)
        throw InvalidArgument("shuffle_matrices: sizes must be positive");
    ShuffleMatrices out;
    out.S = DenseMatrix(static_cast<std::size_t>(ni) * nr, static_cast<std::size_t>(ni) * nr);
    for (int k = 1; k <= nr; ++k)
        for (int a = 0; a < ni; ++a)
            out.S(static_cast<std::size_t>((k - 1) * ni + a),
                  static_cast<std::size_t>(a * nr + (k - 1))) = 1.0;
    out.S_tilde = DenseMatrix(static_cast<std::size_t>(nj) * nr, static_cast<std::size_t>(nj) * nr);
    for (int k = 1; k <= nj; ++k)
        for (int c = 0; c < nr; ++c)
            out.S_tilde(static_cast<std::size_t>((k - 1) * nr + c),
                        static_cast<std::size_t>(c * nj + (k - 1))) = 1.0;
    return out;
}

Annihilator::Annihilator(Partition p, BlockIndex pivot, DenseMatrix hatU)
    : p_(std::move(p)), pivot_(pivot), hatU_(std::move(hatU)) {
    if (pivot_.i < 1 || pivot_.i >= pivot_.j || pivot_.j > p_.m())
        throw InvalidArgument("Annihilator: pivot must satisfy 1 <= i < j <= m");
    const std::size_t order =
        static_cast<std::size_t>(p_.size(pivot_.i)) + static_cast<std::size_t>(p_.size(pivot_.j));
    if (hatU_.rows() != order || hatU_.cols() != order)
        throw DimensionMismatch("Annihilator: hatU must have order n_i + n_j");
    check_orthogonal(hatU_, "Annihilator");
}

std::vector<double> Annihilator::apply(const std::vector<double>& a) const {
    if (static_cast<long>(a.size()) != K())
        throw DimensionMismatch("Annihilator::apply: vector length differs from K");
    const int i = pivot_.i, j = pivot_.j;
    const int ni = p_.size(i), nj = p_.size(j);
    const int oi = p_.offset(i), oj = p_.offset(j);
    DenseMatrix X = vec0_inverse(VecImage{p_, a}).to_dense();

    for (int r = 1; r <= p_.m(); ++r) {
        if (r == i || r == j) continue;
        const int nr = p_.size(r);
        const int orr = p_.offset(r);
        DenseMatrix W(static_cast<std::size_t>(nr), static_cast<std::size_t>(ni + nj));
        for (int rr = 0; rr < nr; ++rr) {
            for (int c = 0; c < ni; ++c) W(rr, c) = X(orr + rr, oi + c);
            for (int c = 0; c < nj; ++c) W(rr, ni + c) = X(orr + rr, oj + c);
        }
        const DenseMatrix Wp = multiply(W, hatU_);
        for (int rr = 0; rr < nr; ++rr) {
            for (int c = 0; c < ni; ++c) {
                X(orr + rr, oi + c) = Wp(rr, c);
                X(oi + c, orr + rr) = Wp(rr, c);
            }
            for (int c = 0; c < nj; ++c) {
                X(orr + rr, oj + c) = Wp(rr, ni + c);
                X(oj + c, orr + rr) = Wp(rr, ni + c);
            }
        }
    }
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < nj; ++c) {
            X(oi + r, oj + c) = 0.0;
            X(oj + c, oi + r) = 0.0;
        }
    return vec(SymmetricMatrix::from_dense(X), p_).v;
}

std::vector<double> Annihilator::apply_transpose(const std::vector<double>& a) const {
    return Annihilator(p_, pivot_, transpose(hatU_)).apply(a);
}

DenseMatrix Annihilator::materialize() const {
    if (K() > kMaterializeLimit)
        throw UnsupportedSize("Annihilator::materialize: K exceeds the dense limit");
    const int i = pivot_.i, j = pivot_.j;
    const std::size_t ni = static_cast<std::size_t>(p_.size(i));
    const std::size_t nj = static_cast<std::size_t>(p_.size(j));
    const DenseMatrix U11t = transpose(sub_block(hatU_, 0, 0, ni, ni));
    const DenseMatrix U12t = transpose(sub_block(hatU_, 0, ni, ni, nj));
    const DenseMatrix U21t = transpose(sub_block(hatU_, ni, 0, nj, ni));
    const DenseMatrix U22t = transpose(sub_block(hatU_, ni, ni, nj, nj));

    DenseMatrix R(static_cast<std::size_t>(K()), static_cast<std::size_t>(K()));
    // untouched block pairs carry the identity
    for (int r = 1; r < p_.m(); ++r)
        for (int s = r + 1; s <= p_.m(); ++s) {
            if (r == i || r == j || s == i || s == j) continue;
            const long off = vec_block_offset(p_, r, s);
            const long len = static_cast<long>(p_.size(r)) * p_.size(s);
            for (long t = 0; t < len; ++t)
                R(static_cast<std::size_t>(off + t), static_cast<std::size_t>(off + t)) = 1.0;
        }
    for (int r = 1; r <= p_.m(); ++r) {
        if (r == i || r == j) continue;
        const DenseMatrix Ir = DenseMatrix::identity(static_cast<std::size_t>(p_.size(r)));
        if (r < i) {
            const long b1 = vec_block_offset(p_, r, i);
            const long b2 = vec_block_offset(p_, r, j);
            place(R, b1, b1, kron(U11t, Ir));
            place(R, b1, b2, kron(U21t, Ir));
            place(R, b2, b1, kron(U12t, Ir));
            place(R, b2, b2, kron(U22t, Ir));
        } else if (r > j) {
            const long b1 = vec_block_offset(p_, i, r);
            const long b2 = vec_block_offset(p_, j, r);
            place(R, b1, b1, kron(Ir, U11t));
            place(R, b1, b2, kron(Ir, U21t));
            place(R, b2, b1, kron(Ir, U12t));
            place(R, b2, b2, kron(Ir, U22t));
        } else {
            const long b1 = vec_block_offset(p_, i, r);
            const long b2 = vec_block_offset(p_, r, j);
            const ShuffleMatrices sh =
                shuffle_matrices(p_.size(r), static_cast<int>(ni), static_cast<int>(nj));
            place(R, b1, b1, kron(Ir, U11t));
            place(R, b1, b2, multiply(sh.S, kron(U21t, Ir)));
            place(R, b2, b1, multiply(sh.S_tilde, kron(Ir, U12t)));
            place(R, b2, b2, kron(U22t, Ir));
        }
    }
    return R;
}

Annihilator annihilator_transpose(const Annihilator& r) {
    return Annihilator(r.partition(), r.pivot(), transpose(r.hatU()));
}

BlockJacobiOperator::BlockJacobiOperator(Partition p,
                                         std::vector<std::pair<BlockIndex, DenseMatrix>> factors)
    : p_(std::move(p)) {
    steps_.reserve(factors.size());
    for (auto& [pivot, hatU] : factors) steps_.emplace_back(p_, pivot, std::move(hatU));
}

std::vector<double> BlockJacobiOperator::apply(std::vector<double> a) const {
    for (const Annihilator& step : steps_) a = step.apply(a);
    return a;
}

std::vector<double> BlockJacobiOperator::apply_transpose(std::vector<double> a) const {
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) a = it->apply_transpose(a);
    return a;
}

DenseMatrix BlockJacobiOperator::materialize() const {
    if (K() > kMaterializeLimit)
        throw UnsupportedSize("BlockJacobiOperator::materialize: K exceeds the dense limit");
    DenseMatrix J = DenseMatrix::identity(static_cast<std::size_t>(K()));
    for (const Annihilator& step : steps_) J = multiply(step.materialize(), J);
    return J;
}

BlockJacobiOperator BlockJacobiOperator::transposed() const {
    std::vector<std::pair<BlockIndex, DenseMatrix>> factors;
    factors.reserve(steps_.size());
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it)
        factors.emplace_back(it->pivot(), transpose(it->hatU()));
    return BlockJacobiOperator(p_, std::move(factors));
}

BlockJacobiOperator build_operator(const Partition& p, const PivotSequence& o,
                                   const std::vector<DenseMatrix>& factors) {
    if (o.m != p.m()) throw DimensionMismatch("build_operator: sequence block count differs");
    if (static_cast<long>(factors.size()) != o.T())
        throw DimensionMismatch("build_operator: one factor per pivot required");
    std::vector<std::pair<BlockIndex, DenseMatrix>> data;
    data.reserve(factors.size());
    for (std::size_t t = 0; t < factors.size(); ++t)
        data.emplace_back(BlockIndex{o.pairs[t].first, o.pairs[t].second}, factors[t]);
    return BlockJacobiOperator(p, std::move(data));
}

double operator_norm(const BlockJacobiOperator& J) {
    if (J.K() <= kMaterializeLimit) return spectral_norm(J.materialize());
    // power iteration on J^T J; Rayleigh quotients approach ||J||^2 from below
    Rng rng(0x6a11edull);
    std::vector<double> x(static_cast<std::size_t>(J.K()));
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        double nx = 0.0;
        for (double v : x) nx += v * v;
        nx = std::sqrt(nx);
        if (nx == 0.0) return 0.0;
        for (double& v : x) v /= nx;
        const std::vector<double> y = J.apply(x);
        double ny2 = 0.0;
        for (double v : y) ny2 += v * v;
        if (std::abs(ny2 - lam) <= 1e-13 * std::max(1.0, ny2) && it > 32) {
            lam = ny2;
            break;
        }
        lam = ny2;
        x = J.apply_transpose(y);
    }
    return std::sqrt(lam);
}

DenseMatrix vec_relabel_matrix(const Partition& p, const std::vector<int>& q_image) {
    const std::vector<int> q_inv = inverse_permutation(q_image);
    const Partition pt = permuted_sizes(p, q_inv);
    const DenseMatrix P = block_permutation_matrix(p, q_inv);
    const long K = p.K();
    DenseMatrix out(static_cast<std::size_t>(K), static_cast<std::size_t>(K));
    std::vector<double> e(static_cast<std::size_t>(K), 0.0);
    for (long t = 0; t < K; ++t) {
        e[static_cast<std::size_t>(t)] = 1.0;
        const DenseMatrix X = vec0_inverse(VecImage{p, e}).to_dense();
        const DenseMatrix Xt = multiply(multiply_tn(P, X), P);
        const std::vector<double> col = vec(SymmetricMatrix::from_dense(Xt), pt).v;
        for (long r = 0; r < K; ++r)
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(t)) =
                col[static_cast<std::size_t>(r)];
        e[static_cast<std::size_t>(t)] = 0.0;
    }
    return out;
}

std::pair<Partition, std::vector<std::pair<BlockIndex, DenseMatrix>>> relabel_operator_data(
    const Partition& p, const std::vector<std::pair<BlockIndex, DenseMatrix>>& factors,
    const std::vector<int>& q_image) {
    const BlockPermutation q{q_image};
    if (q.m() != p.m()) throw DimensionMismatch("relabel_operator_data: permutation size mismatch");
    Partition pt = permuted_sizes(p, q.inverse().image);
    std::vector<std::pair<BlockIndex, DenseMatrix>> out;
    out.reserve(factors.size());
    for (const auto& [pivot, hatU] : factors) {
        const int qi = q(pivot.i), qj = q(pivot.j);
        if (qi < qj) {
            out.emplace_back(BlockIndex{qi, qj}, hatU);
        } else {
            const std::size_t ni = static_cast<std::size_t>(p.size(pivot.i));
            const std::size_t nj = static_cast<std::size_t>(p.size(pivot.j));
            DenseMatrix sw(ni + nj, ni + nj);
            for (std::size_t r = 0; r < nj; ++r)
                for (std::size_t c = 0; c < nj; ++c) sw(r, c) = hatU(ni + r, ni + c);
            for (std::size_t r = 0; r < nj; ++r)
                for (std::size_t c = 0; c < ni; ++c) sw(r, nj + c) = hatU(ni + r, c);
            for (std::size_t r = 0; r < ni; ++r)
                for (std::size_t c = 0; c < nj; ++c) sw(nj + r, c) = hatU(r, ni + c);
            for (std::size_t r = 0; r < ni; ++r)
                for (std::size_t c = 0; c < ni; ++c) sw(nj + r, nj + c) = hatU(r, c);
            out.emplace_back(BlockIndex{qj, qi}, std::move(sw));
        }
    }
    return {std::move(pt), std::move(out)};
}

} // namespace bjlab

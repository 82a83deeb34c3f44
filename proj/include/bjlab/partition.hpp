// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "bjlab/linalg.hpp"
#include "bjlab/matrix.hpp"

namespace bjlab {

/**
 * Partition pi = (n_1, ..., n_m) of the matrix order n into m diagonal blocks.
 *
 * Block indices are 1-based throughout the public API; element indices are
 * 0-based.  Derived counts:
 *   N = n(n-1)/2   element pairs,
 *   M = m(m-1)/2   block pairs,
 *   K = N - sum_i n_i(n_i-1)/2   strictly off-diagonal-block element pairs.
 */
class Partition {
public:
    /// Empty partition (m = 0), the inert "not yet set" state.
    Partition() = default;
    explicit Partition(std::vector<int> sizes);

    int m() const { return static_cast<int>(sizes_.size()); }
    int n() const { return n_; }
    long M() const { return static_cast<long>(m()) * (m() - 1) / 2; }
    long N() const { return static_cast<long>(n_) * (n_ - 1) / 2; }
    long K() const { return K_; }

    /// Size of block i (1-based).
    int size(int i) const;
    /// 0-based element offset of block i (1-based).
    int offset(int i) const;

    const std::vector<int>& sizes() const { return sizes_; }
    bool all_unit_blocks() const;

    bool operator==(const Partition& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;
    int n_ = 0;
    long K_ = 0;
};

/// Pivot block pair (i, j), 1-based, i <= j (i == j only for diagonal preprocessing steps).
struct BlockIndex {
    int i;
    int j;
    bool operator==(const BlockIndex& o) const { return i == o.i && j == o.j; }
};

/// Position of pair (i,j), i < j, in the double column-wise pair ordering: (1,2),(1,3),(2,3),(1,4),...
inline long tau_index(int i, int j) {
    return static_cast<long>(j - 1) * (j - 2) / 2 + i; // 1-based
}

/**
 * Elementary block matrix: identity except for the rows/columns of blocks i
 * and j, which carry an orthogonal matrix hatU of order n_i + n_j (or n_i
 * when i == j).  Orthogonality of hatU is validated to 1e-12 on construction.
 */
class ElementaryBlockMatrix {
public:
    ElementaryBlockMatrix(Partition p, BlockIndex idx, DenseMatrix hatU);

    const Partition& partition() const { return p_; }
    BlockIndex index() const { return idx_; }
    const DenseMatrix& hatU() const { return hatU_; }

    /// Full n x n matrix.
    DenseMatrix to_dense() const;

private:
    Partition p_;
    BlockIndex idx_;
    DenseMatrix hatU_;
};

/// K-vector image of the off-diagonal blocks of a partitioned symmetric matrix.
struct VecImage {
    Partition p;
    std::vector<double> v;
};

/// Embed hatU into the identity at block pair idx (validates dimensions only).
DenseMatrix embed(const Partition& p, BlockIndex idx, const DenseMatrix& hatU);

/// Pivot submatrix [[A_ii, A_ij], [A_ji, A_jj]] (order n_i + n_j; just A_ii when i == j).
SymmetricMatrix extract_pivot_submatrix(const SymmetricMatrix& A, const Partition& p,
                                        BlockIndex idx);

/**
 * Double column-wise vectorization: for j = 2..m the blocks A_1j, ..., A_{j-1,j}
 * are stacked, each flattened column-major.  Depends only on the strictly
 * off-diagonal blocks, so ||vec(A)||^2 + sum_i off^2(A_ii) = off^2(A).
 */
VecImage vec(const SymmetricMatrix& A, const Partition& p);

/// 0-based offset of block (i,j), i < j, inside the K-vector layout of vec().
long vec_block_offset(const Partition& p, int i, int j);

/**
 * Right inverse of vec() with zero diagonal blocks: symmetric matrix whose
 * off-diagonal blocks are read from the K-vector and whose diagonal blocks
 * vanish.  vec(vec0_inverse(v)) == v holds exactly (pure data movement).
 */
SymmetricMatrix vec0_inverse(const VecImage& v);

/// Copy of A with blocks A_ii, A_jj, A_ij (and A_ji) zeroed; i == j zeroes only A_ii.
SymmetricMatrix annihilate_pivot(const SymmetricMatrix& A, const Partition& p, BlockIndex idx);

/**
 * n x n permutation matrix P for block relabeling q (1-based images,
 * q_image[k-1] = q(k)).  Conjugation X -> P^T X P maps a pi-partitioned X to
 * a matrix partitioned by permuted_sizes(p, q) whose block (s,t) is
 * X_{q(s), q(t)}.
 */
DenseMatrix block_permutation_matrix(const Partition& p, const std::vector<int>& q_image);

/// Partition carried by P^T X P above: position s has size n_{q(s)}.
Partition permuted_sizes(const Partition& p, const std::vector<int>& q_image);

/// Inverse of a 1-based permutation image.
std::vector<int> inverse_permutation(const std::vector<int>& q_image);

} // namespace bjlab

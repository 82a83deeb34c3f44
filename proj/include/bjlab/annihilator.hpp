// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "bjlab/matrix.hpp"
#include "bjlab/orderings.hpp"
#include "bjlab/partition.hpp"

namespace bjlab {

/// Commutation matrix K of size pq x pq with K vec(Z) = vec(Z^T) for Z p x q
/// (column-major vec).
DenseMatrix commutation_matrix(int p, int q);

/// The two perfect-shuffle matrices appearing in the i < r < j coupling block
/// of a materialized annihilator; S is square of order ni*nr, S_tilde of order
/// nj*nr.  They coincide with commutation_matrix(nr, ni) and
/// commutation_matrix(nj, nr).
struct ShuffleMatrices {
    DenseMatrix S;
    DenseMatrix S_tilde;
};
ShuffleMatrices shuffle_matrices(int nr, int ni, int nj);

/**
 * Step operator of one block Jacobi step on the vectorized off-diagonal part:
 * for the pivot (i,j) with transformation U = E(i,j,hatU),
 *
 *   R a = vec( N_ij( U^T vec0inv(a) U ) ),
 *
 * where vec0inv rebuilds a symmetric matrix with zero diagonal blocks and
 * N_ij wipes the pivot block.  R is identically zero when m = 2 and has
 * spectral norm exactly 1 when m >= 3.
 */
class Annihilator {
public:
    /// Requires i < j and an orthogonal hatU of order n_i + n_j.
    Annihilator(Partition p, BlockIndex pivot, DenseMatrix hatU);

    const Partition& partition() const { return p_; }
    BlockIndex pivot() const { return pivot_; }
    const DenseMatrix& hatU() const { return hatU_; }
    long K() const { return p_.K(); }

    std::vector<double> apply(const std::vector<double>& a) const;
    /// R^T a; the transpose is the annihilator of the transposed hatU.
    std::vector<double> apply_transpose(const std::vector<double>& a) const;

    /// Explicit K x K matrix; throws UnsupportedSize for K > 2000.
    DenseMatrix materialize() const;

private:
    Partition p_;
    BlockIndex pivot_;
    DenseMatrix hatU_;
};

/// Annihilator of the transposed transformation, which materializes to R^T.
Annihilator annihilator_transpose(const Annihilator& r);

/**
 * Product of the step operators of a pivot sequence: applying the operator
 * runs the sequence in order (the factor of the first pivot acts first), so
 * as a matrix product the first pivot is the rightmost factor.
 */
class BlockJacobiOperator {
public:
    BlockJacobiOperator(Partition p, std::vector<std::pair<BlockIndex, DenseMatrix>> factors);

    const Partition& partition() const { return p_; }
    long K() const { return p_.K(); }
    const std::vector<Annihilator>& steps() const { return steps_; }

    std::vector<double> apply(std::vector<double> a) const;
    std::vector<double> apply_transpose(std::vector<double> a) const;

    /// Explicit K x K product; throws UnsupportedSize for K > 2000.
    DenseMatrix materialize() const;

    /// Operator of the reversed sequence with transposed factors; equals the
    /// transpose of this operator.
    BlockJacobiOperator transposed() const;

private:
    Partition p_;
    std::vector<Annihilator> steps_;
};

/// Assemble the operator for sequence o; factors[t] belongs to o.pairs[t].
BlockJacobiOperator build_operator(const Partition& p, const PivotSequence& o,
                                   const std::vector<DenseMatrix>& factors);

/// Spectral norm; exact dense path for K <= 2000, power iteration otherwise.
double operator_norm(const BlockJacobiOperator& J);

/**
 * K x K change of basis P for relabeling blocks by q: with pi_q =
 * permuted_sizes(pi, inverse(q)) and the relabeled sequence O(q), the
 * operators satisfy J_{O(q)} = P J_O P^T when the factors correspond under
 * relabel_operator_data.
 */
DenseMatrix vec_relabel_matrix(const Partition& p, const std::vector<int>& q_image);

/// Factor list of the relabeled sequence: pivots mapped to (q(i), q(j)) and the
/// 2 x 2 block structure of hatU swapped whenever q reverses the pivot order.
std::pair<Partition, std::vector<std::pair<BlockIndex, DenseMatrix>>> relabel_operator_data(
    const Partition& p, const std::vector<std::pair<BlockIndex, DenseMatrix>>& factors,
    const std::vector<int>& q_image);

} // namespace bjlab

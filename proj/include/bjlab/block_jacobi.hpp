// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "bjlab/linalg.hpp"
#include "bjlab/matrix.hpp"
#include "bjlab/orderings.hpp"
#include "bjlab/partition.hpp"

namespace bjlab {

/// When the UBC column permutation is applied to the step transformations.
enum class UbcMode {
    Always,   ///< every pivot step (kernel ordering is given up)
    Never,    ///< never; the kernel orders the pivot diagonal by eig_order
    Adaptive, ///< UBC while S(A) >= adaptive_switch * ||A0||_F, ordering afterwards
};

struct SolverConfig {
    double rho = 1.0;                ///< UBC parameter in (0, 1]
    UbcMode ubc = UbcMode::Always;
    EigOrder eig_order = EigOrder::None; ///< kernel ordering for non-UBC steps
    double tol = 1e-10;              ///< stop when S(A) <= tol * ||A0||_F
    int max_sweeps = 64;
    bool accumulate = true;          ///< accumulate the overall transformation
    double adaptive_switch = 1e-2;   ///< threshold for UbcMode::Adaptive
};

struct StepRecord {
    int sweep = 0;
    long step = 0;           ///< 0-based position within the sweep
    BlockIndex pivot{0, 0};
    double off_before = 0;   ///< S(A) entering the step
    double off_after = 0;
    double pivot_norm = 0;   ///< ||A_ij||_F annihilated by the step
    double sigma_min_ii = 0; ///< sigma_min of the (i,i) block of the transformation
    bool ubc_applied = false;
};

struct SweepRecord {
    int sweep = 0;
    double off_before = 0;
    double off_after = 0;
    double ratio = 0; ///< S^2(after)/S^2(before); 0 when off_before == 0
};

struct ConvergenceTrace {
    std::vector<StepRecord> steps;
    std::vector<SweepRecord> sweeps;
};

struct BlockJacobiResult {
    SymmetricMatrix A;                  ///< final iterate
    DenseMatrix V;                      ///< V^T A0 V = A (identity when not accumulated)
    std::vector<double> eigenvalues;    ///< diagonal of the final iterate
    ConvergenceTrace trace;
    int sweeps = 0;
    bool converged = false;
    double off_initial = 0;
    double off_final = 0;
    double norm_initial = 0;            ///< ||A0||_F
};

/// Sweep-cap overflow that still hands back the partial computation.
class SweepCapExceeded : public NonConvergence {
public:
    SweepCapExceeded(const std::string& msg, BlockJacobiResult partial)
        : NonConvergence(msg), partial_(std::move(partial)) {}
    const BlockJacobiResult& partial() const { return partial_; }

private:
    BlockJacobiResult partial_;
};

/**
 * Permute the columns of the orthogonal hatU (order ni + nj) so that
 * sigma_min of its leading ni x ni block meets the UBC floor rho *
 * gamma_ij(ni, nj); the permutation is chosen by QR with column pivoting on
 * the first block row and is applied to `eigs` as well, so a diagonal pivot
 * stays diagonal.  Returns the achieved sigma_min; throws UbcUnsatisfied if
 * the floor is missed.
 */
double enforce_ubc(DenseMatrix& hatU, std::vector<double>& eigs, int ni, int nj, double rho);

/**
 * Diagonalize the diagonal blocks in place (pivots (1,1)..(m,m)) and fold the
 * per-block eigenvector matrices into V when given.  S(A) is unchanged.
 */
void preprocess_diagonal_blocks(SymmetricMatrix& A, const Partition& p, EigOrder order,
                                DenseMatrix* V);

/**
 * One pivot step at (i, j): diagonalize the pivot submatrix, optionally apply
 * the UBC permutation, update the coupled off-diagonal slabs, and write the
 * pivot blocks exactly (A_ij = 0, diagonal blocks = kernel eigenvalues).
 */
StepRecord block_jacobi_step(SymmetricMatrix& A, const Partition& p, BlockIndex pivot,
                             const SolverConfig& cfg, bool use_ubc, DenseMatrix* V);

/// One pass over the sequence; appends step and sweep records to the trace.
SweepRecord run_sweep(SymmetricMatrix& A, const Partition& p, const PivotSequence& o,
                      const SolverConfig& cfg, bool use_ubc, DenseMatrix* V, int sweep_index,
                      ConvergenceTrace* trace);

/**
 * Full solver: preprocessing, sweeps until S(A) <= tol * ||A0||_F, and (when
 * eig_order is set) a final permutation pass that sorts the diagonal.
 * Throws SweepCapExceeded carrying the partial result when max_sweeps is
 * exhausted.
 */
BlockJacobiResult block_jacobi_solve(const SymmetricMatrix& A, const Partition& p,
                                     const PivotSequence& o, const SolverConfig& cfg);

} // namespace bjlab

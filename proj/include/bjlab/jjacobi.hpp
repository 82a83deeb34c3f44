// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "bjlab/linalg.hpp"
#include "bjlab/matrix.hpp"
#include "bjlab/orderings.hpp"
#include "bjlab/partition.hpp"

namespace bjlab {

/// Signature matrix J = diag(I_nu, -I_{n-nu}).
struct JSignature {
    int n = 0;
    int nu = 0;

    /// +1 for the first nu coordinates, -1 afterwards (0-based index).
    int sign(int k) const { return k < nu ? 1 : -1; }
};

DenseMatrix signature_matrix(const JSignature& J);

struct JJacobiConfig {
    double tol = 1e-12;       ///< stop when S(A_k) <= tol * ||A_k||_F (current norm)
    int max_sweeps = 40;
    bool accumulate = true;
    double inner_tol = 1e-14; ///< elementwise kernel target on mixed pivots
    int inner_max_sweeps = 64;
    double growth_limit = 10.0; ///< flag when ||A_k||_F exceeds this multiple of ||A_0||_F
};

struct JStepRecord {
    int sweep = 0;
    long step = 0;
    BlockIndex pivot{0, 0};
    double off_before = 0;
    double off_after = 0;
    double pivot_norm = 0;
    double sigma_min_ii = 0;  ///< sigma_min of the (i,i) block of the step transformation
    double max_sigma_dev = 0; ///< max |sigma(hatF) - 1| over the step transformation
    /// off-norm of hatF^T P hatF (the kernel's actual residual before the
    /// exact pivot write) divided by ||A||_F entering the step
    double pivot_residual_ratio = 0;
    bool hyperbolic = false;  ///< true when the pivot couples both signature groups
};

struct JSweepRecord {
    int sweep = 0;
    double off_before = 0;
    double off_after = 0;
    double ratio = 0; ///< S^2(after)/S^2(before); 0 when off_before == 0
    double norm_after = 0;
};

struct JJacobiTrace {
    std::vector<JStepRecord> steps;
    std::vector<JSweepRecord> sweeps;
};

struct JJacobiResult {
    SymmetricMatrix A;                       ///< final iterate F^T A0 F
    DenseMatrix F;                           ///< accumulated J-orthogonal transformation
    std::vector<double> diagonal;            ///< diagonal of the final iterate
    std::vector<double> pencil_eigenvalues;  ///< J * diagonal, eigenvalues of J A0
    JJacobiTrace trace;
    int sweeps = 0;
    bool converged = false;
    double off_final = 0;
    double norm_initial = 0;
    double norm_final = 0;
    bool norm_growth_flag = false;
    double fjf_deviation = 0; ///< max |F^T J F - J| when the transformation is accumulated
};

class JSweepCapExceeded : public NonConvergence {
public:
    JSweepCapExceeded(const std::string& msg, JJacobiResult partial)
        : NonConvergence(msg), partial_(std::move(partial)) {}
    const JJacobiResult& partial() const { return partial_; }

private:
    JJacobiResult partial_;
};

/// Per-sweep aggregation of the process-health quantities in a run trace.
struct SweepAssumptionRow {
    int sweep = 0;
    double min_sigma_min = 0;    ///< smallest diagonal-block sigma_min over the sweep
    double max_sigma_dev = 0;    ///< largest |sigma(hatF) - 1| over the sweep
    double max_pivot_ratio = 0;  ///< largest unresolved pivot residual ratio
    double off_ratio = 0;        ///< S(A)/||A||_F at the end of the sweep
};

struct AssumptionReport {
    std::vector<SweepAssumptionRow> rows; ///< one per recorded sweep
    double min_sigma_min = 0;             ///< overall floor across all steps
    double max_sigma_dev = 0;             ///< overall orthogonality deviation
    double final_pivot_ratio = 0;         ///< last sweep's max pivot residual ratio
    double final_off_ratio = 0;           ///< last sweep's closing off-norm ratio
};

/**
 * Summarize a trace for convergence-theory checks: conditioning floors of the
 * step transformations, their deviation from orthogonality, and the two ratio
 * diagnostics (per-pivot residual over current norm, off-norm over current
 * norm) whose joint decay certifies the process.
 */
AssumptionReport check_process_assumptions(const JJacobiTrace& trace);

/**
 * Elementwise J-Jacobi diagonalization of a small symmetric positive definite
 * matrix P with signature diag(I_npos, -I_{w-npos}): trigonometric rotations
 * inside a signature group, hyperbolic transformations across groups.
 * On return P is diagonal (off entries written as exact zeros) and the
 * returned hatF satisfies hatF^T P_in hatF = P_out and hatF^T J hatF = J.
 * Throws HyperbolicBreakdown if a hyperbolic tangent leaves (-1, 1), which
 * cannot happen while P stays positive definite.
 */
DenseMatrix j_diagonalize_kernel(SymmetricMatrix& P, int npos, double tol, int max_sweeps);

/**
 * Block J-Jacobi solver for the pencil (A, J) with A symmetric positive
 * definite and J = diag(I_nu, -I_{n-nu}).  The partition must refine the
 * signature split: some block boundary falls exactly at nu.  Pivots inside a
 * signature group use an orthogonal kernel, pivots across groups use the
 * elementwise hyperbolic kernel.  Convergence is measured against the current
 * Frobenius norm since hyperbolic congruences may grow it.
 * Throws NotPositiveDefinite when A fails a Cholesky test and
 * JSweepCapExceeded (carrying the partial result) when max_sweeps is reached.
 */
JJacobiResult jjacobi_solve(const SymmetricMatrix& A, const Partition& p, int nu,
                            const PivotSequence& o, const JJacobiConfig& cfg);

} // namespace bjlab

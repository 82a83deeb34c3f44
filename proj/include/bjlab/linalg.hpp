// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "bjlab/matrix.hpp"
#include "bjlab/rng.hpp"

namespace bjlab {

/// Requested ordering of eigenvalues in kernel output.
enum class EigOrder {
    None,          ///< natural order produced by the sweep
    Nonincreasing, ///< largest first (stable on ties)
    Nondecreasing, ///< smallest first (stable on ties)
};

/**
 * Plane rotation acting on coordinates (p, q), p < q.
 *
 * Invariants checked on construction: c^2 + s^2 = 1 within 1e-14 and
 * c >= sqrt(2)/2, i.e. the rotation angle lies in [-pi/4, pi/4].  The
 * eigensolve kernel only ever produces such rotations.
 */
struct GivensRotation {
    std::size_t p;
    std::size_t q;
    double c;
    double s;

    GivensRotation(std::size_t p_, std::size_t q_, double c_, double s_);
};

/// Spectral decomposition A = V diag(eigenvalues) V^T.
struct EigenResult {
    std::vector<double> eigenvalues;
    DenseMatrix eigenvectors; ///< columns are eigenvectors; V^T V = I within 1e-12
    EigOrder ordering = EigOrder::None;
    int sweeps = 0; ///< sweeps spent by the kernel
};

/// Result of Householder QR with greedy column pivoting: X P = Q R.
struct QrcpResult {
    std::vector<std::size_t> perm; ///< perm[k] = original index of column placed at k
    std::vector<double> rdiag;     ///< |r_kk|, nonincreasing
    DenseMatrix Q;                 ///< rows x rows orthogonal factor
    DenseMatrix R;                 ///< rows x cols upper trapezoidal factor
};

/**
 * Off-norm: square root of the sum of squares of the strictly upper
 * triangular entries, i.e. (sqrt(2)/2) * ||A - diag(A)||_F.
 */
double off_norm(const SymmetricMatrix& A);

/**
 * Two-sided Jacobi eigensolver for symmetric matrices.
 *
 * Row-cyclic pivoting; rotation parameter t = sign(tau)/(|tau| + sqrt(1+tau^2))
 * with tau = (a_qq - a_pp)/(2 a_pq), which keeps every angle in [-pi/4, pi/4].
 * Stops when off_norm(A) <= tol * ||A||_F (tol is relative).  Ties in the
 * final ordering are broken by original index (stable sort).
 *
 * Throws NonConvergence if max_sweeps is exhausted.
 */
EigenResult jacobi_eigensolve(const SymmetricMatrix& A,
                              double tol = 1e-13,
                              EigOrder order = EigOrder::Nonincreasing,
                              int max_sweeps = 64);

/**
 * Householder QR with greedy column pivoting (largest remaining column
 * two-norm first; first index wins ties).  Column norms are recomputed from
 * the updated trailing block each step, so the |r_kk| sequence is
 * nonincreasing by construction.
 */
QrcpResult qr_column_pivoting(const DenseMatrix& X);

/// Largest singular value, computed through the symmetric kernel on the Gram matrix.
double spectral_norm(const DenseMatrix& X, double tol = 1e-10);

/// Smallest singular value (of the min(rows,cols) values), via the smaller Gram matrix.
double sigma_min(const DenseMatrix& X, double tol = 1e-10);

/**
 * Power-iteration estimate of the spectral radius of a (possibly
 * nonsymmetric) matrix.  Growth-rate averaging over a trailing window with
 * deterministic restarts; an estimate, not a certified value.  Throws
 * NonConvergence if the window never settles.
 */
double spectral_radius(const DenseMatrix& X, double tol = 1e-10, int max_iters = 20000);

/// Lower-triangular Cholesky factor, or nullopt when A is not (numerically)
/// positive definite.
std::optional<DenseMatrix> cholesky_factor(const SymmetricMatrix& A);

/// Random orthogonal matrix: product of n(n-1) random plane rotations with random column sign flips.
DenseMatrix random_orthogonal(std::size_t n, Rng& rng);

/// Random symmetric matrix, entries i.i.d. uniform on [-scale, scale] then symmetrized.
SymmetricMatrix random_symmetric(std::size_t n, Rng& rng, double scale = 1.0);

/// Random symmetric positive definite matrix Q^T D Q with log-uniform spectrum in [lo, hi].
SymmetricMatrix random_spd(std::size_t n, Rng& rng, double lo = 1e-3, double hi = 1.0);

} // namespace bjlab

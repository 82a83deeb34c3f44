// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "bjlab/orderings.hpp"
#include "bjlab/partition.hpp"

namespace bjlab {

/**
 * Off-norm reduction constants for one sweep of the block Jacobi method under
 * UBC transformations, computed by induction over the leading sub-partitions
 * pi_l = (n_1,...,n_l).
 *
 * All quantities are tracked in "gap" form (gap = 1 - eta) so that constants
 * remain meaningful when eta is within double rounding of 1.
 */
struct LevelConstants {
    int l = 0;                       ///< number of leading blocks
    long s = 0;                      ///< s_l = n_1 + ... + n_l
    double zeta_floor_pairwise = 0;  ///< rho * min_{1<=i<j<=l} gamma(n_i, n_j)
    double zeta_floor_uniform = 0;   ///< rho * gamma_tilde(s_l), never larger
    double gap = 1;                  ///< 1 - eta for pi_l (recursion uses the pairwise floor)
    double eta = 0;
    double gap_tilde = 1;            ///< 1 - eta_tilde for s_l
    double eta_tilde = 0;
};

struct BoundConstants {
    std::vector<LevelConstants> levels; ///< l = 2..m
    double eta = 0;                     ///< top-level eta_{pi,rho}
    double gap = 1;
    double eta_tilde = 0;               ///< top-level eta_tilde_{n,rho}
    double gap_tilde = 1;
    double mu = 0;                      ///< sqrt(eta), per-sweep factor on S(A)
    double mu_tilde = 0;
};

/// sigma_min floor for the (i,j) diagonal pivot block after a UBC permutation,
/// for block sizes (ni, nj); equals sqrt(2)/2 at (1,1).
double gamma_ij(int ni, int nj);

/// Uniform variant depending only on the total size n.
double gamma_tilde(long n);

/// Full per-level table for a partition; requires m >= 2 and rho in (0, 1].
BoundConstants compute_bounds(const Partition& pi, double rho);

/// Sharper single-element constants (unit blocks, plane rotations): eta_2 = 0,
/// eta_n = max{1 - 2^(1-n), 1 - 2^(2-n)(1-eta_{n-1}) / (2^(2-n) + (n-2) eta_{n-1})}.
double eta_elementwise(int n);
/// Same value as 1 - eta_elementwise(n), computed without cancellation.
double gap_elementwise(int n);

/// eta for the partition: the elementwise constant when all blocks have size 1
/// and rho == 1, the block recursion otherwise.
double effective_eta(const Partition& pi, double rho);
double effective_gap(const Partition& pi, double rho);

/// Certified per-sweep contraction for a pivot sequence on a partition.
struct SweepBound {
    double eta = 0;          ///< S^2(A') <= eta * S^2(A) after `sweeps` sweeps
    double gap = 1;
    double mu = 0;           ///< sqrt(eta)
    int sweeps = 1;          ///< number of sweeps per contraction (d + 1)
    Partition sizes_used;    ///< partition (possibly relabeled) the constant refers to
    OrderingClass kind = OrderingClass::B_c; ///< class that certified the bound
    ClassWitness witness;
};

/// Bound from an already-known class membership witness.
SweepBound sweep_bound_for(OrderingClass kind, const ClassWitness& witness, const Partition& pi,
                           double rho);

/**
 * Recognize the sequence against the serial families (structural first, then
 * relabeled, then weakly equivalent) and return the certified bound; throws
 * InvalidArgument when no supported class matches.
 */
SweepBound mu_for_sequence(const PivotSequence& o, const Partition& pi, double rho);

} // namespace bjlab

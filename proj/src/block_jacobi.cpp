// SPDX-License-Identifier: Apache-2.0
#include "bjlab/block_jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bjlab/bounds.hpp"

namespace bjlab {

namespace {

/// Frobenius norm of the (i,j) block, i < j.
double pivot_block_norm(const SymmetricMatrix& A, const Partition& p, BlockIndex idx) {
    const long oi = p.offset(idx.i), oj = p.offset(idx.j);
    const int ni = p.size(idx.i), nj = p.size(idx.j);
    double s = 0.0;
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < nj; ++b) {
            const double v = A(static_cast<std::size_t>(oi + a), static_cast<std::size_t>(oj + b));
            s += v * v;
        }
    return std::sqrt(s);
}

/// In-place column update [X_{.i} X_{.j}] <- [X_{.i} X_{.j}] * hatU on a dense matrix.
void apply_to_columns(DenseMatrix& X, long oi, int ni, long oj, int nj, const DenseMatrix& hatU) {
    const std::size_t rows = X.rows();
    const int w = ni + nj;
    std::vector<double> slab(static_cast<std::size_t>(w));
    for (std::size_t r = 0; r < rows; ++r) {
        for (int a = 0; a < ni; ++a) slab[static_cast<std::size_t>(a)] = X(r, static_cast<std::size_t>(oi + a));
        for (int b = 0; b < nj; ++b) slab[static_cast<std::size_t>(ni + b)] = X(r, static_cast<std::size_t>(oj + b));
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = 0; k < w; ++k) acc += slab[static_cast<std::size_t>(k)] * hatU(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
            const std::size_t col = c < ni ? static_cast<std::size_t>(oi + c) : static_cast<std::size_t>(oj + (c - ni));
            X(r, col) = acc;
        }
    }
}

void validate_sequence(const Partition& p, const PivotSequence& o) {
    if (o.m != p.m()) throw DimensionMismatch("block_jacobi: sequence and partition disagree on m");
    for (const auto& pr : o.pairs)
        if (pr.first < 1 || pr.second <= pr.first || pr.second > o.m)
            throw InvalidArgument("block_jacobi: pivot pair out of range");
}

} // namespace

double enforce_ubc(DenseMatrix& hatU, std::vector<double>& eigs, int ni, int nj, double rho) {
    const int w = ni + nj;
    if (hatU.rows() != static_cast<std::size_t>(w) || hatU.cols() != static_cast<std::size_t>(w))
        throw DimensionMismatch("enforce_ubc: transformation has wrong order");
    if (eigs.size() != static_cast<std::size_t>(w))
        throw DimensionMismatch("enforce_ubc: eigenvalue count mismatch");

    // Pick the ni columns of the first block row with the best conditioning via
    // QR with column pivoting, then bring them to the front in pivot order.
    DenseMatrix top(static_cast<std::size_t>(ni), static_cast<std::size_t>(w));
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < w; ++c) top(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hatU(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    const QrcpResult qr = qr_column_pivoting(top);

    DenseMatrix permuted(hatU.rows(), hatU.cols());
    std::vector<double> eigs_permuted(eigs.size());
    for (int c = 0; c < w; ++c) {
        const std::size_t src = static_cast<std::size_t>(qr.perm[static_cast<std::size_t>(c)]);
        for (int r = 0; r < w; ++r) permuted(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hatU(static_cast<std::size_t>(r), src);
        eigs_permuted[static_cast<std::size_t>(c)] = eigs[src];
    }
    hatU = std::move(permuted);
    eigs = std::move(eigs_permuted);

    DenseMatrix lead(static_cast<std::size_t>(ni), static_cast<std::size_t>(ni));
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < ni; ++c) lead(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hatU(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    const double smin = sigma_min(lead);
    const double floor = rho * gamma_ij(ni, nj);
    if (smin < floor - 1e-12) {
        std::ostringstream msg;
        msg << "enforce_ubc: sigma_min " << smin << " below floor " << floor;
        throw UbcUnsatisfied(msg.str());
    }
    return smin;
}

void preprocess_diagonal_blocks(SymmetricMatrix& A, const Partition& p, EigOrder order,
                                DenseMatrix* V) {
    if (A.order() != static_cast<std::size_t>(p.n()))
        throw DimensionMismatch("preprocess_diagonal_blocks: order mismatch");
    const std::size_t n = A.order();
    for (int i = 1; i <= p.m(); ++i) {
        const int ni = p.size(i);
        if (ni == 1) continue;
        const long oi = p.offset(i);
        SymmetricMatrix D(static_cast<std::size_t>(ni));
        for (int a = 0; a < ni; ++a)
            for (int b = 0; b <= a; ++b)
                D.set(static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                      A(static_cast<std::size_t>(oi + a), static_cast<std::size_t>(oi + b)));
        const EigenResult er = jacobi_eigensolve(D, 1e-14, order);
        const DenseMatrix& Q = er.eigenvectors;

        // Rows/columns oi..oi+ni of A pick up Q; off-diagonal slabs first.
        DenseMatrix slab(n, static_cast<std::size_t>(ni));
        for (std::size_t r = 0; r < n; ++r)
            for (int c = 0; c < ni; ++c) slab(r, static_cast<std::size_t>(c)) = A(r, static_cast<std::size_t>(oi + c));
        DenseMatrix updated = multiply(slab, Q);
        for (std::size_t r = 0; r < n; ++r) {
            if (r >= static_cast<std::size_t>(oi) && r < static_cast<std::size_t>(oi + ni)) continue;
            for (int c = 0; c < ni; ++c) A.set(r, static_cast<std::size_t>(oi + c), updated(r, static_cast<std::size_t>(c)));
        }
        for (int a = 0; a < ni; ++a)
            for (int b = 0; b <= a; ++b)
                A.set(static_cast<std::size_t>(oi + a), static_cast<std::size_t>(oi + b),
                      a == b ? er.eigenvalues[static_cast<std::size_t>(a)] : 0.0);

        if (V) apply_to_columns(*V, oi, ni, oi + ni, 0, Q);
    }
}

StepRecord block_jacobi_step(SymmetricMatrix& A, const Partition& p, BlockIndex pivot,
                             const SolverConfig& cfg, bool use_ubc, DenseMatrix* V) {
    const int i = pivot.i, j = pivot.j;
    if (i < 1 || j <= i || j > p.m()) throw InvalidArgument("block_jacobi_step: bad pivot");
    const int ni = p.size(i), nj = p.size(j), w = ni + nj;
    const long oi = p.offset(i), oj = p.offset(j);

    StepRecord rec;
    rec.pivot = pivot;
    rec.off_before = off_norm(A);
    rec.pivot_norm = pivot_block_norm(A, p, pivot);
    rec.ubc_applied = use_ubc;

    const SymmetricMatrix P = extract_pivot_submatrix(A, p, pivot);
    EigenResult er = jacobi_eigensolve(P, 1e-14, use_ubc ? EigOrder::None : cfg.eig_order);
    DenseMatrix hatU = er.eigenvectors;
    std::vector<double> eigs = er.eigenvalues;

    if (use_ubc) {
        rec.sigma_min_ii = enforce_ubc(hatU, eigs, ni, nj, cfg.rho);
    } else {
        DenseMatrix lead(static_cast<std::size_t>(ni), static_cast<std::size_t>(ni));
        for (int r = 0; r < ni; ++r)
            for (int c = 0; c < ni; ++c) lead(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hatU(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        rec.sigma_min_ii = sigma_min(lead);
    }

    // Off-diagonal slabs: for every block r outside the pivot,
    // [A_ri A_rj] <- [A_ri A_rj] * hatU (and the mirrored blocks by symmetry).
    for (int r = 1; r <= p.m(); ++r) {
        if (r == i || r == j) continue;
        const int nr = p.size(r);
        const long orr = p.offset(r);
        DenseMatrix W(static_cast<std::size_t>(nr), static_cast<std::size_t>(w));
        for (int a = 0; a < nr; ++a) {
            for (int b = 0; b < ni; ++b) W(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = A(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oi + b));
            for (int b = 0; b < nj; ++b) W(static_cast<std::size_t>(a), static_cast<std::size_t>(ni + b)) = A(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oj + b));
        }
        const DenseMatrix Wp = multiply(W, hatU);
        for (int a = 0; a < nr; ++a) {
            for (int b = 0; b < ni; ++b) A.set(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oi + b), Wp(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
            for (int b = 0; b < nj; ++b) A.set(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oj + b), Wp(static_cast<std::size_t>(a), static_cast<std::size_t>(ni + b)));
        }
    }

    // The pivot is written exactly: hatU diagonalizes it by construction.
    auto global = [&](int k) {
        return static_cast<std::size_t>(k < ni ? oi + k : oj + (k - ni));
    };
    for (int a = 0; a < w; ++a)
        for (int b = 0; b <= a; ++b)
            A.set(global(a), global(b), a == b ? eigs[static_cast<std::size_t>(a)] : 0.0);

    if (V && cfg.accumulate) apply_to_columns(*V, oi, ni, oj, nj, hatU);

    rec.off_after = off_norm(A);
    return rec;
}

SweepRecord run_sweep(SymmetricMatrix& A, const Partition& p, const PivotSequence& o,
                      const SolverConfig& cfg, bool use_ubc, DenseMatrix* V, int sweep_index,
                      ConvergenceTrace* trace) {
    SweepRecord sw;
    sw.sweep = sweep_index;
    sw.off_before = off_norm(A);
    long step_index = 0;
    for (const auto& pr : o.pairs) {
        StepRecord rec = block_jacobi_step(A, p, BlockIndex{pr.first, pr.second}, cfg, use_ubc, V);
        rec.sweep = sweep_index;
        rec.step = step_index++;
        if (trace) trace->steps.push_back(std::move(rec));
    }
    sw.off_after = off_norm(A);
    sw.ratio = sw.off_before > 0.0
                   ? (sw.off_after * sw.off_after) / (sw.off_before * sw.off_before)
                   : 0.0;
    if (trace) trace->sweeps.push_back(sw);
    return sw;
}

BlockJacobiResult block_jacobi_solve(const SymmetricMatrix& A0, const Partition& p,
                                     const PivotSequence& o, const SolverConfig& cfg) {
    if (A0.order() != static_cast<std::size_t>(p.n()))
        throw DimensionMismatch("block_jacobi_solve: matrix order does not match partition");
    validate_sequence(p, o);
    if (cfg.rho <= 0.0 || cfg.rho > 1.0) throw InvalidArgument("block_jacobi_solve: rho must be in (0, 1]");
    if (cfg.max_sweeps < 1) throw InvalidArgument("block_jacobi_solve: max_sweeps must be positive");

    BlockJacobiResult res;
    res.A = A0;
    res.V = DenseMatrix::identity(A0.order());
    res.norm_initial = frobenius_norm(A0);
    res.off_initial = off_norm(A0);

    DenseMatrix* Vptr = cfg.accumulate ? &res.V : nullptr;
    preprocess_diagonal_blocks(res.A, p, cfg.eig_order, Vptr);

    const double target = cfg.tol * res.norm_initial;
    double off = off_norm(res.A);
    res.converged = off <= target;

    int sweep = 0;
    while (!res.converged && sweep < cfg.max_sweeps) {
        ++sweep;
        bool use_ubc = false;
        switch (cfg.ubc) {
        case UbcMode::Always: use_ubc = true; break;
        case UbcMode::Never: use_ubc = false; break;
        case UbcMode::Adaptive:
            use_ubc = off >= cfg.adaptive_switch * res.norm_initial;
            break;
        }
        const SweepRecord sw = run_sweep(res.A, p, o, cfg, use_ubc, Vptr, sweep, &res.trace);
        off = sw.off_after;
        res.sweeps = sweep;
        res.converged = off <= target;
    }
    res.off_final = off;
    for (std::size_t k = 0; k < res.A.order(); ++k) res.eigenvalues.push_back(res.A(k, k));

    if (!res.converged) {
        std::ostringstream msg;
        msg << "block_jacobi_solve: off-norm " << off << " above target " << target << " after "
            << cfg.max_sweeps << " sweeps";
        throw SweepCapExceeded(msg.str(), std::move(res));
    }

    if (cfg.eig_order != EigOrder::None) {
        const std::size_t n = res.A.order();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return cfg.eig_order == EigOrder::Nonincreasing ? res.A(a, a) > res.A(b, b)
                                                            : res.A(a, a) < res.A(b, b);
        });
        SymmetricMatrix sorted(n);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t <= s; ++t) sorted.set(s, t, res.A(idx[s], idx[t]));
        res.A = std::move(sorted);
        if (cfg.accumulate) {
            DenseMatrix Vs(n, n);
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t r = 0; r < n; ++r) Vs(r, c) = res.V(r, idx[c]);
            res.V = std::move(Vs);
        }
        for (std::size_t k = 0; k < n; ++k) res.eigenvalues[k] = res.A(k, k);
    }
    return res;
}

} // namespace bjlab

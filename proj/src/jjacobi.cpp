// SPDX-License-Identifier: Apache-2.0
#include "bjlab/jjacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bjlab/block_jacobi.hpp"

namespace bjlab {

namespace {

/// In-place column update [X_{.p} X_{.q}] <- [X_{.p} X_{.q}] * [[a,c],[b,d]].
void rotate_columns(DenseMatrix& X, std::size_t p, std::size_t q, double a, double b, double c,
                    double d) {
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const double xp = X(r, p), xq = X(r, q);
        X(r, p) = a * xp + b * xq;
        X(r, q) = c * xp + d * xq;
    }
}

/// Congruence of symmetric P by the 2x2 [[a,c],[b,d]] acting on indices p, q.
void congruence_2x2(SymmetricMatrix& P, std::size_t p, std::size_t q, double a, double b, double c,
                    double d) {
    const std::size_t w = P.order();
    for (std::size_t r = 0; r < w; ++r) {
        if (r == p || r == q) continue;
        const double xp = P(r, p), xq = P(r, q);
        P.set(r, p, a * xp + b * xq);
        P.set(r, q, c * xp + d * xq);
    }
    const double app = P(p, p), aqq = P(q, q), apq = P(p, q);
    P.set(p, p, a * a * app + 2.0 * a * b * apq + b * b * aqq);
    P.set(q, q, c * c * app + 2.0 * c * d * apq + d * d * aqq);
    P.set(p, q, a * c * app + (a * d + b * c) * apq + b * d * aqq);
}

double block_norm(const SymmetricMatrix& A, long oi, int ni, long oj, int nj) {
    double s = 0.0;
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < nj; ++b) {
            const double v = A(static_cast<std::size_t>(oi + a), static_cast<std::size_t>(oj + b));
            s += v * v;
        }
    return std::sqrt(s);
}

void apply_to_columns(DenseMatrix& X, long oi, int ni, long oj, int nj, const DenseMatrix& hatF) {
    const int w = ni + nj;
    std::vector<double> slab(static_cast<std::size_t>(w));
    for (std::size_t r = 0; r < X.rows(); ++r) {
        for (int a = 0; a < ni; ++a) slab[static_cast<std::size_t>(a)] = X(r, static_cast<std::size_t>(oi + a));
        for (int b = 0; b < nj; ++b) slab[static_cast<std::size_t>(ni + b)] = X(r, static_cast<std::size_t>(oj + b));
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = 0; k < w; ++k) acc += slab[static_cast<std::size_t>(k)] * hatF(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
            const std::size_t col = c < ni ? static_cast<std::size_t>(oi + c) : static_cast<std::size_t>(oj + (c - ni));
            X(r, col) = acc;
        }
    }
}

/// Largest |sigma(hatF) - 1| via the eigenvalues of hatF^T hatF.
double max_singular_deviation(const DenseMatrix& hatF) {
    const SymmetricMatrix G = SymmetricMatrix::from_dense(multiply_tn(hatF, hatF), 1e-9);
    const EigenResult er = jacobi_eigensolve(G, 1e-13, EigOrder::None);
    double dev = 0.0;
    for (double lam : er.eigenvalues) dev = std::max(dev, std::abs(std::sqrt(std::max(lam, 0.0)) - 1.0));
    return dev;
}

double leading_block_sigma_min(const DenseMatrix& hatF, int ni) {
    DenseMatrix lead(static_cast<std::size_t>(ni), static_cast<std::size_t>(ni));
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < ni; ++c) lead(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = hatF(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return sigma_min(lead);
}

} // namespace

DenseMatrix signature_matrix(const JSignature& J) {
    if (J.nu < 0 || J.nu > J.n) throw InvalidArgument("signature_matrix: nu out of range");
    DenseMatrix D(static_cast<std::size_t>(J.n), static_cast<std::size_t>(J.n));
    for (int k = 0; k < J.n; ++k) D(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) = J.sign(k);
    return D;
}

DenseMatrix j_diagonalize_kernel(SymmetricMatrix& P, int npos, double tol, int max_sweeps) {
    const std::size_t w = P.order();
    if (npos < 0 || static_cast<std::size_t>(npos) > w)
        throw InvalidArgument("j_diagonalize_kernel: npos out of range");
    DenseMatrix F = DenseMatrix::identity(w);
    if (w < 2) return F;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm(P) <= tol * frobenius_norm(P)) {
            for (std::size_t r = 1; r < w; ++r)
                for (std::size_t c = 0; c < r; ++c) P.set(r, c, 0.0);
            return F;
        }
        for (std::size_t p = 0; p + 1 < w; ++p) {
            for (std::size_t q = p + 1; q < w; ++q) {
                const double beta = P(p, q);
                if (beta == 0.0) continue;
                const bool mixed = p < static_cast<std::size_t>(npos) && q >= static_cast<std::size_t>(npos);
                if (mixed) {
                    const double alpha = P(p, p), gamma = P(q, q);
                    const double t2 = 2.0 * beta / (alpha + gamma);
                    if (!(std::abs(t2) < 1.0))
                        throw HyperbolicBreakdown("j_diagonalize_kernel: hyperbolic tangent out of range");
                    const double theta = 0.5 * std::atanh(t2);
                    const double ch = std::cosh(theta), sh = std::sinh(theta);
                    // F2 = [[ch, -sh], [-sh, ch]] preserves diag(1, -1).
                    congruence_2x2(P, p, q, ch, -sh, -sh, ch);
                    rotate_columns(F, p, q, ch, -sh, -sh, ch);
                } else {
                    const double alpha = P(p, p), gamma = P(q, q);
                    const double tau = (gamma - alpha) / (2.0 * beta);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;
                    // G = [[c, s], [-s, c]] is orthogonal; either group of the
                    // signature acts as +/-I on {p, q}, so J is preserved.
                    congruence_2x2(P, p, q, c, -s, s, c);
                    rotate_columns(F, p, q, c, -s, s, c);
                }
                P.set(p, q, 0.0);
            }
        }
    }
    if (off_norm(P) <= tol * frobenius_norm(P)) {
        for (std::size_t r = 1; r < w; ++r)
            for (std::size_t c = 0; c < r; ++c) P.set(r, c, 0.0);
        return F;
    }
    throw NonConvergence("j_diagonalize_kernel: sweep limit reached");
}

namespace {

JStepRecord jjacobi_step(SymmetricMatrix& A, const Partition& p, BlockIndex pivot, int nu,
                         const JJacobiConfig& cfg, DenseMatrix* F) {
    const int i = pivot.i, j = pivot.j;
    const int ni = p.size(i), nj = p.size(j), w = ni + nj;
    const long oi = p.offset(i), oj = p.offset(j);
    const bool i_pos = oi < nu, j_pos = oj < nu;

    JStepRecord rec;
    rec.pivot = pivot;
    rec.off_before = off_norm(A);
    rec.pivot_norm = block_norm(A, oi, ni, oj, nj);
    rec.hyperbolic = i_pos != j_pos;

    const SymmetricMatrix P0 = extract_pivot_submatrix(A, p, pivot);
    SymmetricMatrix P = P0;
    DenseMatrix hatF;
    std::vector<double> diag(static_cast<std::size_t>(w));
    if (rec.hyperbolic) {
        hatF = j_diagonalize_kernel(P, ni, cfg.inner_tol, cfg.inner_max_sweeps);
        for (int k = 0; k < w; ++k) diag[static_cast<std::size_t>(k)] = P(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    } else {
        const EigenResult er = jacobi_eigensolve(P, 1e-14, EigOrder::None);
        hatF = er.eigenvectors;
        diag = er.eigenvalues;
    }

    rec.sigma_min_ii = leading_block_sigma_min(hatF, ni);
    rec.max_sigma_dev = max_singular_deviation(hatF);
    {
        // Residual the kernel actually achieved on the pivot, recomputed from
        // the untouched submatrix; this is what the exact write rounds away.
        const DenseMatrix T = multiply_tn(hatF, multiply(P0.to_dense(), hatF));
        double s = 0.0;
        for (int a = 0; a < w; ++a)
            for (int b = a + 1; b < w; ++b) {
                const double v = 0.5 * (T(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) + T(static_cast<std::size_t>(b), static_cast<std::size_t>(a)));
                s += v * v;
            }
        const double norm_before = frobenius_norm(A);
        rec.pivot_residual_ratio = norm_before > 0.0 ? std::sqrt(s) / norm_before : 0.0;
    }

    for (int r = 1; r <= p.m(); ++r) {
        if (r == i || r == j) continue;
        const int nr = p.size(r);
        const long orr = p.offset(r);
        DenseMatrix W(static_cast<std::size_t>(nr), static_cast<std::size_t>(w));
        for (int a = 0; a < nr; ++a) {
            for (int b = 0; b < ni; ++b) W(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = A(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oi + b));
            for (int b = 0; b < nj; ++b) W(static_cast<std::size_t>(a), static_cast<std::size_t>(ni + b)) = A(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oj + b));
        }
        const DenseMatrix Wp = multiply(W, hatF);
        for (int a = 0; a < nr; ++a) {
            for (int b = 0; b < ni; ++b) A.set(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oi + b), Wp(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
            for (int b = 0; b < nj; ++b) A.set(static_cast<std::size_t>(orr + a), static_cast<std::size_t>(oj + b), Wp(static_cast<std::size_t>(a), static_cast<std::size_t>(ni + b)));
        }
    }

    auto global = [&](int k) {
        return static_cast<std::size_t>(k < ni ? oi + k : oj + (k - ni));
    };
    for (int a = 0; a < w; ++a)
        for (int b = 0; b <= a; ++b)
            A.set(global(a), global(b), a == b ? diag[static_cast<std::size_t>(a)] : 0.0);

    if (F) apply_to_columns(*F, oi, ni, oj, nj, hatF);

    rec.off_after = off_norm(A);
    return rec;
}

} // namespace

JJacobiResult jjacobi_solve(const SymmetricMatrix& A0, const Partition& p, int nu,
                            const PivotSequence& o, const JJacobiConfig& cfg) {
    const int n = p.n();
    if (A0.order() != static_cast<std::size_t>(n))
        throw DimensionMismatch("jjacobi_solve: matrix order does not match partition");
    if (o.m != p.m()) throw DimensionMismatch("jjacobi_solve: sequence and partition disagree on m");
    for (const auto& pr : o.pairs)
        if (pr.first < 1 || pr.second <= pr.first || pr.second > o.m)
            throw InvalidArgument("jjacobi_solve: pivot pair out of range");
    if (nu < 1 || nu > n) throw InvalidArgument("jjacobi_solve: nu must lie in [1, n]");
    if (nu < n) {
        bool boundary = false;
        for (int b = 1; b <= p.m(); ++b)
            if (p.offset(b) == nu) boundary = true;
        if (!boundary)
            throw InvalidArgument("jjacobi_solve: partition does not refine the signature split");
    }
    if (!cholesky_factor(A0)) throw NotPositiveDefinite("jjacobi_solve: matrix is not positive definite");
    if (cfg.max_sweeps < 1) throw InvalidArgument("jjacobi_solve: max_sweeps must be positive");

    JJacobiResult res;
    res.A = A0;
    res.F = DenseMatrix::identity(static_cast<std::size_t>(n));
    res.norm_initial = frobenius_norm(A0);

    DenseMatrix* Fptr = cfg.accumulate ? &res.F : nullptr;
    preprocess_diagonal_blocks(res.A, p, EigOrder::None, Fptr);

    double off = off_norm(res.A);
    double norm = frobenius_norm(res.A);
    res.converged = off <= cfg.tol * norm;

    int sweep = 0;
    while (!res.converged && sweep < cfg.max_sweeps) {
        ++sweep;
        JSweepRecord sw;
        sw.sweep = sweep;
        sw.off_before = off;
        long step_index = 0;
        for (const auto& pr : o.pairs) {
            JStepRecord rec = jjacobi_step(res.A, p, BlockIndex{pr.first, pr.second}, nu, cfg, Fptr);
            rec.sweep = sweep;
            rec.step = step_index++;
            res.trace.steps.push_back(std::move(rec));
        }
        off = off_norm(res.A);
        norm = frobenius_norm(res.A);
        sw.off_after = off;
        sw.ratio = sw.off_before > 0.0 ? (off * off) / (sw.off_before * sw.off_before) : 0.0;
        sw.norm_after = norm;
        res.trace.sweeps.push_back(sw);
        res.sweeps = sweep;
        if (norm > cfg.growth_limit * res.norm_initial) res.norm_growth_flag = true;
        res.converged = off <= cfg.tol * norm;
    }

    res.off_final = off;
    res.norm_final = norm;
    const JSignature J{n, nu};
    for (int k = 0; k < n; ++k) {
        const double d = res.A(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
        res.diagonal.push_back(d);
        res.pencil_eigenvalues.push_back(J.sign(k) * d);
    }
    if (cfg.accumulate) {
        const DenseMatrix JF = multiply(signature_matrix(J), res.F);
        DenseMatrix FJF = multiply_tn(res.F, JF);
        for (int k = 0; k < n; ++k) FJF(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) -= J.sign(k);
        res.fjf_deviation = max_abs(FJF);
    }

    if (!res.converged) {
        std::ostringstream msg;
        msg << "jjacobi_solve: off-norm " << off << " above target " << cfg.tol * norm << " after "
            << cfg.max_sweeps << " sweeps";
        throw JSweepCapExceeded(msg.str(), std::move(res));
    }
    return res;
}

AssumptionReport check_process_assumptions(const JJacobiTrace& trace) {
    AssumptionReport report;
    report.min_sigma_min = std::numeric_limits<double>::infinity();
    for (const JSweepRecord& sw : trace.sweeps) {
        SweepAssumptionRow row;
        row.sweep = sw.sweep;
        row.min_sigma_min = std::numeric_limits<double>::infinity();
        for (const JStepRecord& st : trace.steps) {
            if (st.sweep != sw.sweep) continue;
            row.min_sigma_min = std::min(row.min_sigma_min, st.sigma_min_ii);
            row.max_sigma_dev = std::max(row.max_sigma_dev, st.max_sigma_dev);
            row.max_pivot_ratio = std::max(row.max_pivot_ratio, st.pivot_residual_ratio);
        }
        if (!std::isfinite(row.min_sigma_min)) row.min_sigma_min = 0.0;
        row.off_ratio = sw.norm_after > 0.0 ? sw.off_after / sw.norm_after : 0.0;
        report.min_sigma_min = std::min(report.min_sigma_min, row.min_sigma_min);
        report.max_sigma_dev = std::max(report.max_sigma_dev, row.max_sigma_dev);
        report.final_pivot_ratio = row.max_pivot_ratio;
        report.final_off_ratio = row.off_ratio;
        report.rows.push_back(row);
    }
    if (report.rows.empty()) report.min_sigma_min = 0.0;
    return report;
}

} // namespace bjlab

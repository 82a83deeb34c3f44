// SPDX-License-Identifier: Apache-2.0

#include "bjlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bjlab/errors.hpp"

namespace bjlab {

double gamma_ij(int ni, int nj) {
    if (ni < 1 || nj < 1) throw InvalidArgument("gamma_ij: block sizes must be positive");
    const double a = std::pow(4.0, static_cast<double>(ni)) + 6.0 * nj - 1.0;
    const double b = static_cast<double>(nj) + 1.0;
    return 3.0 / std::sqrt(a * b);
}

double gamma_tilde(long n) {
    if (n < 1) throw InvalidArgument("gamma_tilde: size must be positive");
    return 3.0 * std::sqrt(2.0) / std::sqrt(std::pow(4.0, static_cast<double>(n)) + 26.0);
}

namespace {

void check_rho(double rho) {
    if (!(rho > 0.0) || rho > 1.0) throw InvalidArgument("rho must lie in (0, 1]");
}

// gap-form evaluation of one induction level: given zeta and the previous
// level's gap, return 1 - eta_l = min{ z/2, gap_{l-1} z / (z + 2(l-2) eta_{l-1}) }
// with z = zeta^(2(l-1)).
double level_gap(int l, double zeta, double prev_gap) {
    const double z = std::pow(zeta, 2.0 * (l - 1));
    const double g0 = 0.5 * z;
    const double prev_eta = 1.0 - prev_gap;
    const double ge = prev_gap * z / (z + 2.0 * (l - 2) * prev_eta);
    return std::min(g0, ge);
}

// gap form of eta_tilde for prefix size s: the closed forms
//   eta'  = 1 - w/2,           w = (rho gamma_tilde(s))^(2(s-1))
//   eta'' = (s-2) / (w + s-2)
// combined as eta_tilde = max{eta', eta''}; gaps min{w/2, w/(w + s-2)}.
double tilde_gap(long s, double rho) {
    const double w = std::pow(rho * gamma_tilde(s), 2.0 * static_cast<double>(s - 1));
    const double g1 = 0.5 * w;
    const double g2 = w / (w + static_cast<double>(s - 2));
    return std::min(g1, g2);
}

} // namespace

BoundConstants compute_bounds(const Partition& pi, double rho) {
    check_rho(rho);
    if (pi.m() < 2) throw InvalidArgument("compute_bounds: need at least two blocks");
    BoundConstants out;
    out.levels.reserve(static_cast<std::size_t>(pi.m() - 1));

    double min_gamma = gamma_ij(pi.size(1), pi.size(2));
    long s = pi.size(1) + pi.size(2);
    LevelConstants base;
    base.l = 2;
    base.s = s;
    base.zeta_floor_pairwise = rho * min_gamma;
    base.zeta_floor_uniform = rho * gamma_tilde(s);
    base.gap = 1.0;
    base.eta = 0.0;
    base.gap_tilde = 1.0; // one step annihilates the only pivot block
    base.eta_tilde = 0.0;
    out.levels.push_back(base);

    for (int l = 3; l <= pi.m(); ++l) {
        for (int i = 1; i < l; ++i) min_gamma = std::min(min_gamma, gamma_ij(pi.size(i), pi.size(l)));
        s += pi.size(l);
        LevelConstants lc;
        lc.l = l;
        lc.s = s;
        lc.zeta_floor_pairwise = rho * min_gamma;
        lc.zeta_floor_uniform = rho * gamma_tilde(s);
        lc.gap = level_gap(l, lc.zeta_floor_pairwise, out.levels.back().gap);
        lc.eta = 1.0 - lc.gap;
        lc.gap_tilde = tilde_gap(s, rho);
        lc.eta_tilde = 1.0 - lc.gap_tilde;
        out.levels.push_back(lc);
    }

    const LevelConstants& top = out.levels.back();
    out.eta = top.eta;
    out.gap = top.gap;
    out.eta_tilde = top.eta_tilde;
    out.gap_tilde = top.gap_tilde;
    out.mu = std::sqrt(out.eta);
    out.mu_tilde = std::sqrt(out.eta_tilde);
    return out;
}

double gap_elementwise(int n) {
    if (n < 2) throw InvalidArgument("gap_elementwise: need n >= 2");
    double gap = 1.0; // n = 2
    for (int k = 3; k <= n; ++k) {
        const double z = std::pow(2.0, 2.0 - k); // 2^(2-k)
        const double eta_prev = 1.0 - gap;
        const double g1 = 0.5 * z;               // 1 - (1 - 2^(1-k))
        const double g2 = z * gap / (z + (k - 2) * eta_prev);
        gap = std::min(g1, g2);
    }
    return gap;
}

double eta_elementwise(int n) { return 1.0 - gap_elementwise(n); }

double effective_gap(const Partition& pi, double rho) {
    check_rho(rho);
    const bool unit = std::all_of(pi.sizes().begin(), pi.sizes().end(), [](int s) { return s == 1; });
    if (unit && rho == 1.0) return gap_elementwise(pi.m());
    return compute_bounds(pi, rho).gap;
}

double effective_eta(const Partition& pi, double rho) { return 1.0 - effective_gap(pi, rho); }

SweepBound sweep_bound_for(OrderingClass kind, const ClassWitness& witness, const Partition& pi,
                           double rho) {
    check_rho(rho);
    SweepBound out;
    out.kind = kind;
    out.witness = witness;
    out.sweeps = witness.d + 1;
    if (witness.q.empty()) {
        out.sizes_used = pi;
    } else {
        const BlockPermutation q{witness.q};
        out.sizes_used = permuted_sizes(pi, q.inverse().image);
    }
    out.gap = effective_gap(out.sizes_used, rho);
    out.eta = 1.0 - out.gap;
    out.mu = std::sqrt(out.eta);
    return out;
}

SweepBound mu_for_sequence(const PivotSequence& o, const Partition& pi, double rho) {
    if (o.m != pi.m())
        throw DimensionMismatch("mu_for_sequence: sequence and partition block counts differ");
    static const OrderingClass order[] = {
        OrderingClass::B_sp,  OrderingClass::barB_sp,  OrderingClass::B_spg,
        OrderingClass::barB_spg, OrderingClass::B_sg,  OrderingClass::barB_sg,
    };
    for (OrderingClass kind : order) {
        RecognitionResult rec = recognize_class(kind, o);
        if (rec.member) return sweep_bound_for(kind, rec.witness, pi, rho);
    }
    throw InvalidArgument("mu_for_sequence: sequence not certified by any supported class");
}

} // namespace bjlab

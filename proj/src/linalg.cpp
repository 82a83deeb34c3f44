// SPDX-License-Identifier: Apache-2.0
#include "bjlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bjlab {

GivensRotation::GivensRotation(std::size_t p_, std::size_t q_, double c_, double s_)
    : p(p_), q(q_), c(c_), s(s_) {
    if (p >= q) throw InvalidArgument("GivensRotation: requires p < q");
    if (std::abs(c * c + s * s - 1.0) > 1e-14)
        throw InvalidArgument("GivensRotation: c^2 + s^2 != 1");
    if (c < std::sqrt(0.5) - 1e-15)
        throw InvalidArgument("GivensRotation: angle outside [-pi/4, pi/4]");
}

double off_norm(const SymmetricMatrix& A) {
    double s = 0.0;
    const std::size_t n = A.order();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
    return std::sqrt(s);
}

namespace {

// One cyclic sweep of two-sided rotations on the dense working copy W,
// accumulating V <- V * G.  Returns the number of rotations applied.
std::size_t jacobi_sweep(DenseMatrix& W, DenseMatrix& V) {
    const std::size_t n = W.rows();
    std::size_t rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double apq = W(p, q);
            if (apq == 0.0) continue;
            ++rotations;
            const double tau = (W(q, q) - W(p, p)) / (2.0 * apq);
            double t;
            if (std::abs(tau) > 1.0 / std::numeric_limits<double>::epsilon()) {
                t = 0.5 / tau; // asymptotic form, avoids overflow in tau^2
            } else {
                t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
            }
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            GivensRotation g(p, q, c, s); // validates |angle| <= pi/4

            const double app = W(p, p);
            const double aqq = W(q, q);
            W(p, p) = app - t * apq;
            W(q, q) = aqq + t * apq;
            W(p, q) = 0.0;
            W(q, p) = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == p || r == q) continue;
                const double arp = W(r, p);
                const double arq = W(r, q);
                W(r, p) = g.c * arp - g.s * arq;
                W(r, q) = g.s * arp + g.c * arq;
                W(p, r) = W(r, p);
                W(q, r) = W(r, q);
            }
            for (std::size_t r = 0; r < n; ++r) {
                const double vrp = V(r, p);
                const double vrq = V(r, q);
                V(r, p) = g.c * vrp - g.s * vrq;
                V(r, q) = g.s * vrp + g.c * vrq;
            }
        }
    }
    return rotations;
}

double dense_off_norm(const DenseMatrix& W) {
    double s = 0.0;
    for (std::size_t i = 0; i < W.rows(); ++i)
        for (std::size_t j = i + 1; j < W.cols(); ++j) s += W(i, j) * W(i, j);
    return std::sqrt(s);
}

} // namespace

EigenResult jacobi_eigensolve(const SymmetricMatrix& A, double tol, EigOrder order,
                              int max_sweeps) {
    const std::size_t n = A.order();
    if (n == 0) throw InvalidArgument("jacobi_eigensolve: empty matrix");
    DenseMatrix W = A.to_dense();
    DenseMatrix V = DenseMatrix::identity(n);
    const double scale = frobenius_norm(A);
    const double stop = tol * scale;

    int sweeps = 0;
    while (dense_off_norm(W) > stop) {
        if (sweeps >= max_sweeps)
            throw NonConvergence("jacobi_eigensolve: sweep budget exhausted");
        ++sweeps;
        if (jacobi_sweep(W, V) == 0) break; // nothing left to rotate
    }

    EigenResult res;
    res.sweeps = sweeps;
    res.ordering = order;
    res.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.eigenvalues[i] = W(i, i);

    if (order == EigOrder::None) {
        res.eigenvectors = std::move(V);
        return res;
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (order == EigOrder::Nonincreasing) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return res.eigenvalues[a] > res.eigenvalues[b];
        });
    } else {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return res.eigenvalues[a] < res.eigenvalues[b];
        });
    }
    std::vector<double> lam(n);
    DenseMatrix Vs(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        lam[k] = res.eigenvalues[idx[k]];
        for (std::size_t r = 0; r < n; ++r) Vs(r, k) = V(r, idx[k]);
    }
    res.eigenvalues = std::move(lam);
    res.eigenvectors = std::move(Vs);
    return res;
}

QrcpResult qr_column_pivoting(const DenseMatrix& X) {
    const std::size_t m = X.rows();
    const std::size_t nc = X.cols();
    if (m == 0 || nc == 0) throw InvalidArgument("qr_column_pivoting: empty matrix");
    DenseMatrix R = X;
    DenseMatrix Q = DenseMatrix::identity(m);
    std::vector<std::size_t> perm(nc);
    std::iota(perm.begin(), perm.end(), 0);
    const std::size_t steps = std::min(m, nc);
    std::vector<double> rdiag;
    rdiag.reserve(steps);

    for (std::size_t k = 0; k < steps; ++k) {
        // Greedy pivot: largest trailing column norm, recomputed honestly.
        std::size_t best = k;
        double best_norm2 = -1.0;
        for (std::size_t j = k; j < nc; ++j) {
            double s = 0.0;
            for (std::size_t r = k; r < m; ++r) s += R(r, j) * R(r, j);
            if (s > best_norm2) {
                best_norm2 = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t r = 0; r < m; ++r) std::swap(R(r, k), R(r, best));
            std::swap(perm[k], perm[best]);
        }

        // Householder reflector for column k.
        double alpha = 0.0;
        for (std::size_t r = k; r < m; ++r) alpha += R(r, k) * R(r, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) {
            rdiag.push_back(0.0);
            continue;
        }
        if (R(k, k) > 0.0) alpha = -alpha;
        std::vector<double> v(m - k);
        v[0] = R(k, k) - alpha;
        for (std::size_t r = k + 1; r < m; ++r) v[r - k] = R(r, k);
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        if (vtv > 0.0) {
            const double beta = 2.0 / vtv;
            for (std::size_t j = k; j < nc; ++j) {
                double dot = 0.0;
                for (std::size_t r = k; r < m; ++r) dot += v[r - k] * R(r, j);
                dot *= beta;
                for (std::size_t r = k; r < m; ++r) R(r, j) -= dot * v[r - k];
            }
            for (std::size_t j = 0; j < m; ++j) {
                double dot = 0.0;
                for (std::size_t r = k; r < m; ++r) dot += v[r - k] * Q(j, r);
                dot *= beta;
                for (std::size_t r = k; r < m; ++r) Q(j, r) -= dot * v[r - k];
            }
        }
        R(k, k) = alpha;
        for (std::size_t r = k + 1; r < m; ++r) R(r, k) = 0.0;
        rdiag.push_back(std::abs(alpha));
    }

    return QrcpResult{std::move(perm), std::move(rdiag), std::move(Q), std::move(R)};
}

namespace {

// Eigen-spectrum of the smaller Gram matrix of X; values clamped at zero.
std::vector<double> gram_eigenvalues(const DenseMatrix& X, double tol) {
    const bool tall = X.rows() >= X.cols();
    const DenseMatrix G = tall ? multiply_tn(X, X) : multiply(X, transpose(X));
    SymmetricMatrix S(G.rows());
    for (std::size_t i = 0; i < G.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) S.set(i, j, 0.5 * (G(i, j) + G(j, i)));
    EigenResult er = jacobi_eigensolve(S, tol, EigOrder::Nonincreasing, 128);
    for (double& v : er.eigenvalues) v = std::max(v, 0.0);
    return er.eigenvalues;
}

} // namespace

double spectral_norm(const DenseMatrix& X, double tol) {
    if (max_abs(X) == 0.0) return 0.0;
    const std::vector<double> ev = gram_eigenvalues(X, tol);
    return std::sqrt(ev.front());
}

double sigma_min(const DenseMatrix& X, double tol) {
    if (max_abs(X) == 0.0) return 0.0;
    const std::vector<double> ev = gram_eigenvalues(X, tol);
    return std::sqrt(ev.back());
}

double spectral_radius(const DenseMatrix& X, double tol, int max_iters) {
    if (X.rows() != X.cols()) throw DimensionMismatch("spectral_radius: matrix not square");
    const std::size_t n = X.rows();
    if (max_abs(X) == 0.0) return 0.0;

    Rng rng(0x5eed5u);
    const int window = 24;
    int restarts = 0;
    while (restarts < 4) {
        ++restarts;
        std::vector<double> z(n);
        for (double& zi : z) zi = rng.uniform(-1.0, 1.0);
        double zn = std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
        if (zn == 0.0) continue;
        for (double& zi : z) zi /= zn;

        std::vector<double> growth;
        growth.reserve(static_cast<std::size_t>(max_iters));
        std::vector<double> y(n);
        for (int it = 0; it < max_iters; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += X(i, j) * z[j];
                y[i] = s;
            }
            const double yn = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
            if (yn == 0.0) return 0.0; // hit the kernel exactly: nilpotent direction
            growth.push_back(yn);
            for (std::size_t i = 0; i < n; ++i) z[i] = y[i] / yn;

            if (static_cast<int>(growth.size()) >= 2 * window) {
                auto geo = [&](std::size_t lo, std::size_t hi) {
                    double acc = 0.0;
                    for (std::size_t k = lo; k < hi; ++k) acc += std::log(growth[k]);
                    return std::exp(acc / static_cast<double>(hi - lo));
                };
                const std::size_t g = growth.size();
                const double a = geo(g - 2 * window, g - window);
                const double b = geo(g - window, g);
                if (std::abs(a - b) <= tol * std::max(1.0, std::abs(b))) return b;
            }
        }
    }
    throw NonConvergence("spectral_radius: growth-rate window never settled");
}

std::optional<DenseMatrix> cholesky_factor(const SymmetricMatrix& A) {
    const std::size_t n = A.order();
    DenseMatrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0)) return std::nullopt;
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

DenseMatrix random_orthogonal(std::size_t n, Rng& rng) {
    DenseMatrix Q = DenseMatrix::identity(n);
    if (n == 1) {
        if (rng.below(2) == 1) Q(0, 0) = -1.0;
        return Q;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            for (std::size_t r = 0; r < n; ++r) {
                const double xp = Q(r, p);
                const double xq = Q(r, q);
                Q(r, p) = c * xp - s * xq;
                Q(r, q) = s * xp + c * xq;
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        if (rng.below(2) == 1)
            for (std::size_t r = 0; r < n; ++r) Q(r, j) = -Q(r, j);
    return Q;
}

SymmetricMatrix random_symmetric(std::size_t n, Rng& rng, double scale) {
    DenseMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = rng.uniform(-scale, scale);
    SymmetricMatrix A(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) A.set(i, j, 0.5 * (M(i, j) + M(j, i)));
    return A;
}

SymmetricMatrix random_spd(std::size_t n, Rng& rng, double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("random_spd: need 0 < lo <= hi");
    std::vector<double> d(n);
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (double& v : d) v = std::exp(rng.uniform(llo, lhi));
    DenseMatrix Q = random_orthogonal(n, rng);
    SymmetricMatrix A(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += Q(k, i) * d[k] * Q(k, j);
            A.set(i, j, s);
        }
    return A;
}

} // namespace bjlab

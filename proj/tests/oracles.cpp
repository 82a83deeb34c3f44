// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "bjlab/errors.hpp"

namespace bjlab::oracles {

namespace {

// One Householder similarity H A H with H acting on rows/cols k+1..n-1,
// chosen to zero column k below the subdiagonal.  Done with explicit dense
// products: transparent, and cheap at test sizes.
void householder_column(DenseMatrix& A, std::size_t k) {
    const std::size_t n = A.rows();
    double sigma = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) sigma += A(i, k) * A(i, k);
    if (sigma == 0.0) return;
    const double x0 = A(k + 1, k);
    const double mu = std::sqrt(x0 * x0 + sigma);
    const double v0 = (x0 <= 0.0) ? x0 - mu : -sigma / (x0 + mu);
    const double beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    std::vector<double> v(n, 0.0);
    v[k + 1] = 1.0;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = A(i, k) / v0;
    // A <- (I - beta v v^T) A (I - beta v v^T), symmetric rank-two update.
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += A(i, j) * v[j];
        p[i] = beta * s;
    }
    double pv = 0.0;
    for (std::size_t i = 0; i < n; ++i) pv += p[i] * v[i];
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) w[i] = p[i] - 0.5 * beta * pv * v[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) -= v[i] * w[j] + w[i] * v[j];
}

// Number of eigenvalues of the tridiagonal (d, e) strictly below x, by the
// classic LDL^T pivot-sign count.
int count_below(const std::vector<double>& d, const std::vector<double>& e2, double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        q = (i == 0) ? d[0] - x : (d[i] - x) - e2[i - 1] / q;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

} // namespace

std::vector<double> eigenvalues(const SymmetricMatrix& A0) {
    const std::size_t n = A0.order();
    DenseMatrix A = A0.to_dense();
    for (std::size_t k = 0; k + 2 < n; ++k) householder_column(A, k);
    std::vector<double> d(n), e2(n > 1 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = A(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) e2[i] = A(i + 1, i) * A(i + 1, i);
    // Gershgorin enclosure of the spectrum of the tridiagonal matrix.
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::sqrt(e2[i - 1]) : 0.0) + (i + 1 < n ? std::sqrt(e2[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    lo -= pad;
    hi += pad;
    std::vector<double> eig(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && a < b; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (count_below(d, e2, mid) <= static_cast<int>(k))
                a = mid;
            else
                b = mid;
        }
        eig[k] = 0.5 * (a + b);
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

DenseMatrix congruence(const DenseMatrix& U, const DenseMatrix& A) {
    if (U.rows() != A.rows() || A.rows() != A.cols())
        throw DimensionMismatch("oracle congruence: shape mismatch");
    const std::size_t n = A.rows(), c = U.cols();
    DenseMatrix AU(n, c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += A(i, k) * U(k, j);
            AU(i, j) = s;
        }
    DenseMatrix B(c, c);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += U(k, i) * AU(k, j);
            B(i, j) = s;
        }
    return B;
}

double spectral_norm(const DenseMatrix& X) {
    const std::size_t c = X.cols();
    SymmetricMatrix G(c);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < X.rows(); ++k) s += X(k, i) * X(k, j);
            G.set(i, j, s);
        }
    const std::vector<double> ev = eigenvalues(G);
    return std::sqrt(std::max(0.0, ev.back()));
}

std::vector<double> annihilator_apply(const Partition& p, BlockIndex idx, const DenseMatrix& hatU,
                                      const std::vector<double>& a) {
    VecImage image{p, a};
    SymmetricMatrix A = vec0_inverse(image);
    const DenseMatrix U = embed(p, idx, hatU);
    const DenseMatrix B = congruence(U, A.to_dense());
    SymmetricMatrix Bs = SymmetricMatrix::from_dense(B, 1e-9);
    return vec(annihilate_pivot(Bs, p, idx), p).v;
}

DenseMatrix kron(const DenseMatrix& X, const DenseMatrix& Y) {
    DenseMatrix Z(X.rows() * Y.rows(), X.cols() * Y.cols());
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j)
            for (std::size_t r = 0; r < Y.rows(); ++r)
                for (std::size_t s = 0; s < Y.cols(); ++s)
                    Z(i * Y.rows() + r, j * Y.cols() + s) = X(i, j) * Y(r, s);
    return Z;
}

} // namespace bjlab::oracles

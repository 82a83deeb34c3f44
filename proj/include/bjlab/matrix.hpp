// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bjlab/errors.hpp"

namespace bjlab {

/**
 * Dense row-major matrix of doubles.
 *
 * Plain storage plus the handful of operations the solvers need; no
 * expression templates, no views.  Row/column indices are 0-based.
 */
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/**
 * Symmetric matrix stored as a packed lower triangle.
 *
 * Symmetry holds by construction: entry (s,t) and (t,s) are the same memory
 * slot, so |a_st - a_ts| = 0 exactly for every instance.
 */
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n, double fill = 0.0)
        : n_(n), data_(n * (n + 1) / 2, fill) {}

    static SymmetricMatrix identity(std::size_t n) {
        SymmetricMatrix A(n);
        for (std::size_t i = 0; i < n; ++i) A.set(i, i, 1.0);
        return A;
    }

    /// Build from a dense matrix; throws unless max |a_st - a_ts| <= sym_tol.
    static SymmetricMatrix from_dense(const DenseMatrix& X, double sym_tol = 1e-12) {
        if (X.rows() != X.cols()) throw DimensionMismatch("from_dense: matrix not square");
        const std::size_t n = X.rows();
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < s; ++t)
                if (std::abs(X(s, t) - X(t, s)) > sym_tol)
                    throw InvalidArgument("from_dense: input not symmetric within tolerance");
        SymmetricMatrix A(n);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t <= s; ++t) A.set(s, t, 0.5 * (X(s, t) + X(t, s)));
        return A;
    }

    std::size_t order() const { return n_; }

    double operator()(std::size_t s, std::size_t t) const {
        return s >= t ? data_[s * (s + 1) / 2 + t] : data_[t * (t + 1) / 2 + s];
    }

    void set(std::size_t s, std::size_t t, double v) {
        if (s >= t)
            data_[s * (s + 1) / 2 + t] = v;
        else
            data_[t * (t + 1) / 2 + s] = v;
    }

    DenseMatrix to_dense() const {
        DenseMatrix X(n_, n_);
        for (std::size_t s = 0; s < n_; ++s)
            for (std::size_t t = 0; t < n_; ++t) X(s, t) = (*this)(s, t);
        return X;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Free helpers shared across the project.
// ---------------------------------------------------------------------------

inline DenseMatrix multiply(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols() != B.rows()) throw DimensionMismatch("multiply: inner sizes differ");
    DenseMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const double a = A(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

inline DenseMatrix transpose(const DenseMatrix& A) {
    DenseMatrix T(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
    return T;
}

/// A^T * B without forming A^T.
inline DenseMatrix multiply_tn(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows()) throw DimensionMismatch("multiply_tn: row counts differ");
    DenseMatrix C(A.cols(), B.cols());
    for (std::size_t k = 0; k < A.rows(); ++k)
        for (std::size_t i = 0; i < A.cols(); ++i) {
            const double a = A(k, i);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

inline double frobenius_norm(const DenseMatrix& A) {
    double s = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) s += A(i, j) * A(i, j);
    return std::sqrt(s);
}

inline double frobenius_norm(const SymmetricMatrix& A) {
    double s = 0.0;
    const std::size_t n = A.order();
    for (std::size_t i = 0; i < n; ++i) {
        s += A(i, i) * A(i, i);
        for (std::size_t j = 0; j < i; ++j) s += 2.0 * A(i, j) * A(i, j);
    }
    return std::sqrt(s);
}

inline double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw DimensionMismatch("max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) m = std::max(m, std::abs(A(i, j) - B(i, j)));
    return m;
}

inline double max_abs(const DenseMatrix& A) {
    double m = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) m = std::max(m, std::abs(A(i, j)));
    return m;
}

} // namespace bjlab

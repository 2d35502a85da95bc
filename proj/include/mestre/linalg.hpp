#pragma once

// Just enough dense linear algebra for the test-function optimizer: small
// symmetric matrices, Cholesky, and a cyclic Jacobi eigensolver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mestre/errors.hpp"

namespace mestre {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Lower-triangular L with A = L L^T. Throws NotPositiveDefinite.
inline Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0)) throw NotPositiveDefinite("cholesky: nonpositive pivot");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

/// Solves L x = b (forward) for lower-triangular L.
inline std::vector<double> forward_solve(const Matrix& l, std::vector<double> b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
        b[i] /= l(i, i);
    }
    return b;
}

/// Solves L^T x = b (backward) for lower-triangular L.
inline std::vector<double> backward_solve_t(const Matrix& l, std::vector<double> b) {
    const std::size_t n = l.rows();
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
        b[i] /= l(i, i);
    }
    return b;
}

struct EigenDecomposition {
    std::vector<double> values;   // ascending
    Matrix vectors;               // column k pairs with values[k]
};

/// Cyclic Jacobi for a symmetric matrix; sweeps until the off-diagonal
/// Frobenius norm drops below tol. Deterministic, fine for n <= 8.
inline EigenDecomposition jacobi_eigen(Matrix a, double tol = 1e-12, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) < tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // sort ascending by eigenvalue, permuting columns
    EigenDecomposition d;
    d.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    d.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        d.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) d.vectors(i, k) = v(i, order[k]);
    }
    return d;
}

} // namespace mestre

#pragma once

// Test functions weighting the explicit-formula sums: the Odlyzko function,
// polynomial autocorrelations g*g on [-1,1], and their cosh-damped variants
// for the unconditional mode.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mestre/errors.hpp"
#include "mestre/quadrature.hpp"

namespace mestre {

enum class TestFunctionKind { Odlyzko, PolyAutocorr };

/// (1-|x|)cos(pi x) + sin(pi |x|)/pi on [-1,1], zero elsewhere.
inline double odlyzko_eval(double x) {
    const double ax = std::abs(x);
    if (ax > 1.0) return 0.0;
    return (1.0 - ax) * std::cos(std::numbers::pi * ax) +
           std::sin(std::numbers::pi * ax) / std::numbers::pi;
}

namespace detail {

/// int_{|x|-1/2}^{1/2} a(t) b(t-|x|) dt for even polynomials a, b given by
/// coefficients in x^0, x^2, ...; exact Gauss-Legendre (polynomial integrand
/// of known degree).
inline double even_poly_eval(const std::vector<double>& c, double t) {
    double v = 0.0;
    const double t2 = t * t;
    for (std::size_t i = c.size(); i-- > 0;) v = v * t2 + c[i];
    return v;
}

inline double even_poly_conv(const std::vector<double>& a, const std::vector<double>& b,
                             double x) {
    const double ax = std::abs(x);
    if (ax >= 1.0) return 0.0;
    const double lo = ax - 0.5, hi = 0.5;
    const int deg = 2 * static_cast<int>(a.size() + b.size() - 2);
    const int n = deg / 2 + 1;
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double t = mid + half * r.nodes[i];
        s += r.weights[i] * even_poly_eval(a, t) * even_poly_eval(b, t - ax);
    }
    return s * half;
}

/// int_{-1/2}^{1/2} t^{2k} dt
inline double even_moment(int k) {
    return std::pow(0.5, 2 * k) / (2 * k + 1);
}

} // namespace detail

/// Immutable, normalized (F(0) = 1) even weight with support [-1,1].
class TestFunction {
public:
    /// The Odlyzko function. GRH-mode bounds built on it carry the
    /// "positivity_checked_numerically" flag: its Fourier positivity is a
    /// grid diagnostic here, not a certificate.
    static TestFunction odlyzko() {
        TestFunction f;
        f.kind_ = TestFunctionKind::Odlyzko;
        f.normalization_ = 1.0;
        f.validate();
        return f;
    }

    /// F = (g*g)/(g*g)(0) for g(t) = sum coeffs[i] t^{2i} on [-1/2,1/2].
    /// Throws ZeroFunction when int g^2 vanishes.
    static TestFunction autocorrelation(std::vector<double> coeffs) {
        TestFunction f;
        f.kind_ = TestFunctionKind::PolyAutocorr;
        f.coeffs_ = std::move(coeffs);
        double norm = 0.0;   // (g*g)(0) = int g^2 = sum a_i a_j moment(i+j)
        for (std::size_t i = 0; i < f.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < f.coeffs_.size(); ++j)
                norm += f.coeffs_[i] * f.coeffs_[j] *
                        detail::even_moment(static_cast<int>(i + j));
        if (!(norm > 0.0))
            throw ZeroFunction("autocorrelation: int g^2 = 0");
        f.normalization_ = norm;
        f.validate();
        return f;
    }

    TestFunction cosh_damped() const {
        TestFunction f = *this;
        f.cosh_damped_ = true;
        return f;
    }

    double operator()(double x) const {
        double v;
        if (kind_ == TestFunctionKind::Odlyzko) {
            v = odlyzko_eval(x);
        } else {
            v = detail::even_poly_conv(coeffs_, coeffs_, x) / normalization_;
        }
        if (cosh_damped_) v /= std::cosh(x);
        return v;
    }

    /// Phi(1/2) = int F. Closed form except for the cosh-damped variant.
    double phi_half() const {
        if (cosh_damped_)
            return integrate_adaptive([this](double x) { return (*this)(x); }, -1.0, 1.0);
        if (kind_ == TestFunctionKind::Odlyzko)
            return 8.0 / (std::numbers::pi * std::numbers::pi);
        double ig = 0.0;   // int(g*g) = (int g)^2
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            ig += coeffs_[i] * detail::even_moment(static_cast<int>(i));
        return ig * ig / normalization_;
    }

    TestFunctionKind kind() const { return kind_; }
    bool is_cosh_damped() const { return cosh_damped_; }
    bool is_autocorrelation() const { return kind_ == TestFunctionKind::PolyAutocorr; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    TestFunction() = default;

    void validate() {
        // |F| <= 1 is part of the compact definition; the optimizer may
        // legitimately construct functions that overshoot, so a violation is
        // recorded, not thrown.
        double sup = 0.0;
        for (double x = 0.0; x <= 1.0 + 1e-12; x += 1e-3)
            sup = std::max(sup, std::abs((*this)(x)));
        if (sup > 1.0 + 1e-9)
            warnings_.push_back("sup|F| = " + std::to_string(sup) + " exceeds F(0) = 1");
    }

    TestFunctionKind kind_ = TestFunctionKind::Odlyzko;
    std::vector<double> coeffs_;
    double normalization_ = 1.0;
    bool cosh_damped_ = false;
    std::vector<std::string> warnings_;
};

/// F_lambda(x) = F(x/lambda); support [-lambda, lambda].
struct ScaledTestFunction {
    TestFunction base;
    double lambda = 1.0;

    double operator()(double x) const { return base(x / lambda); }
    double phi_half() const { return lambda * base.phi_half(); }
};

/// min over t in {0, step, ..., t_max} of  F^(t) = int F(x) cos(tx) dx.
/// A sanity diagnostic for the positive-Fourier-transform hypothesis; no
/// positivity promise for cosh-damped inputs.
inline double fourier_min(const TestFunction& f, double t_max, double grid_step,
                          const QuadratureConfig& cfg = {}) {
    if (!(t_max > 0.0) || !(grid_step > 0.0))
        throw DomainError("fourier_min: t_max and grid_step must be positive");
    double minval = std::numeric_limits<double>::infinity();
    for (double t = 0.0; t <= t_max + 1e-12; t += grid_step) {
        const double ft = 2.0 * integrate_adaptive(
                                    [&](double x) { return f(x) * std::cos(t * x); }, 0.0,
                                    1.0, cfg);
        minval = std::min(minval, ft);
    }
    return minval;
}

} // namespace mestre

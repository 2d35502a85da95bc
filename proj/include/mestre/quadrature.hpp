#pragma once

// Adaptive Gauss-Legendre quadrature, the exponential integral E1, and the
// archimedean constant M_{lambda,F} shared by every bound assembly.

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "mestre/errors.hpp"

namespace mestre {

inline constexpr double kEulerGamma = 0.57721566490153286;

struct QuadratureConfig {
    double abs_tol = 1e-10;
    int max_depth = 40;
    int nodes_per_panel = 15;
};

namespace detail {

struct GaussRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};

/// Nodes/weights of the n-point Gauss-Legendre rule, via Newton iteration on
/// P_n. Cached; thread-safe.
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

template <class F>
double gauss_panel(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

template <class F>
double adapt(F&& f, double a, double b, double tol, int depth, const QuadratureConfig& cfg) {
    const double whole = gauss_panel(f, a, b, cfg.nodes_per_panel);
    const double mid = 0.5 * (a + b);
    const double left = gauss_panel(f, a, mid, cfg.nodes_per_panel);
    const double right = gauss_panel(f, mid, b, cfg.nodes_per_panel);
    const double err = std::abs(left + right - whole);
    if (err <= tol) return left + right;
    if (depth >= cfg.max_depth)
        throw ToleranceNotReached("integrate_adaptive: max_depth exhausted, residual " +
                                  std::to_string(err));
    return adapt(f, a, mid, 0.5 * tol, depth + 1, cfg) +
           adapt(f, mid, b, 0.5 * tol, depth + 1, cfg);
}

} // namespace detail

/// Integral of f over [a,b] to within cfg.abs_tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw DomainError("integrate_adaptive: requires a < b");
    }
    return detail::adapt(f, a, b, cfg.abs_tol, 0, cfg);
}

/// E1(x) = int_x^inf e^{-t}/t dt. Power series below 1, continued fraction
/// above; relative error < 1e-12 on (0, 700).
inline double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw DomainError("exp_integral_e1: requires x > 0");
    if (x <= 1.0) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= -x / k;
            double add = -term / k;      // (-1)^{k+1} x^k / (k k!)
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum - kEulerGamma - std::log(x);
    }
    // modified Lentz on  E1 = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    const double tiny = 1e-300;
    double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int k = 1; k <= 200; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x) * h;
}

/// Archimedean constant M_{lambda,F} = 2(log 2pi + H(lambda) - E1(lambda)),
/// H(lambda) = int_0^lambda [F(x/lambda) e^{-x}/(1-e^{-x}) - e^{-x}/x] dx.
/// F must be the normalized evaluator (F(0) = 1, support [-1,1]).
///
/// The two 1/x poles cancel; below x = 1e-4 the difference is evaluated by
/// series (both factors expanded to O(x^2)) since direct subtraction of two
/// ~1/x terms there loses every significant digit.
template <class F>
double m_lambda(F&& f, double lambda, const QuadratureConfig& cfg = {}) {
    if (!(lambda > 0.0)) throw DomainError("m_lambda: requires lambda > 0");
    auto integrand = [&](double x) {
        const double v = f(x / lambda);
        if (x < 1e-4) {
            double r = 1.0 - x * 0.5 + x * x / 6.0 - v * (0.5 - x / 12.0);
            if (x > 0.0) r += (v - 1.0) / x;
            return r;
        }
        const double ex = std::exp(-x);
        return v * ex / (1.0 - ex) - ex / x;
    };
    const double H = integrate_adaptive(integrand, 0.0, lambda, cfg);
    return 2.0 * (std::log(2.0 * std::numbers::pi) + H - exp_integral_e1(lambda));
}

/// int_0^inf [e^{-x}/(1-e^{-x}) - e^{-x}/x] dx, which is Euler's gamma.
/// The quadrature gate for everything archimedean.
inline double euler_gamma_integral(const QuadratureConfig& cfg = {}) {
    auto integrand = [](double x) {
        if (x < 1e-4) return 0.5 - 5.0 * x / 12.0 + x * x / 6.0;   // series of the difference
        const double ex = std::exp(-x);
        return ex / (1.0 - ex) - ex / x;
    };
    // tail beyond X: int [1/(e^x-1) - e^{-x}/x] = -log(1-e^{-X}) - E1(X)
    const double X = 45.0;
    return integrate_adaptive(integrand, 0.0, X, cfg) - std::log1p(-std::exp(-X)) -
           exp_integral_e1(X);
}

} // namespace mestre

#pragma once

// Maximizes the explicit-formula bound over polynomial autocorrelations
// F = (g*g)/(g*g)(0), g = sum a_i x^{2i} on [-1/2,1/2], at fixed lambda.
// Every ingredient of the log-bound is linear in F, so on the unnormalized
// pair convolutions p_i * p_j it is a bilinear form B; the normalization
// g*g(0) = 1 is the quadratic constraint a^T G a = 1 with G the Gram matrix
// of the even monomials. Maximizing a^T B a under a^T G a = 1 is a
// generalized symmetric eigenproblem, solved by Cholesky + cyclic Jacobi.

#include <cmath>
#include <cstdint>
#include <vector>

#include "mestre/bounds.hpp"
#include "mestre/linalg.hpp"

namespace mestre {

enum class CoeffModel {
    PerTermFloor,   // b_m = -(worst-case coefficient), per (q, m) term
    FixedTrace,     // good primes: b_m from the trace recurrence with a = -floor(2 sqrt p)
};

struct QuadraticProgram {
    Matrix gram;     // G_{ij} = int_{-1/2}^{1/2} x^{2i+2j} dx
    Matrix bound;    // symmetrized bilinear bound functional
    int basis_degree = 0;
};

/// G_{ij} = (1/2)^{2i+2j} / (2i+2j+1), (d+1) x (d+1).
inline Matrix gram_matrix(int d) {
    if (d < 0) throw DomainError("gram_matrix: d >= 0");
    Matrix g(static_cast<std::size_t>(d) + 1, static_cast<std::size_t>(d) + 1);
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j)
            g(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                detail::even_moment(i + j);
    return g;
}

namespace detail {

/// alpha^m + conj(alpha)^m for alpha + conj = a, alpha * conj = q (Lucas).
inline double trace_power(double a, double q, int m) {
    double b0 = 2.0, b1 = a;
    if (m == 0) return b0;
    for (int i = 1; i < m; ++i) {
        const double b2 = a * b1 - q * b0;
        b0 = b1;
        b1 = b2;
    }
    return b1;
}

struct SignedTerm {
    double arg = 0.0;     // m log q, before the 1/lambda scaling
    double factor = 0.0;  // multiplicity * b_m * log q / q^m  (b_m signed)
};

/// Signed explicit-formula terms for the linear functional
/// F -> 2/n * sum factor * F(arg / lambda).
inline std::vector<SignedTerm> signed_terms(const BoundQuery& q, double lambda,
                                            CoeffModel model) {
    std::vector<SignedTerm> out;
    const int g = q.dimension;
    std::vector<NormCount> norms;
    if (q.field.is_rationals()) {
        for (std::int64_t p : primes_up_to(static_cast<std::int64_t>(std::exp(lambda)) + 1))
            norms.push_back({p, 1, p});
    } else {
        norms = prime_ideals_up_to(q.field, std::exp(lambda), q.seed).norms;
    }
    for (const NormCount& nc : norms) {
        const double lq = std::log(static_cast<double>(nc.q));
        const bool constrained = q.spec.elliptic.count(nc.p) || q.spec.abelian.count(nc.p);
        for (int m = 1; m * lq <= lambda + 1e-12; ++m) {
            std::int64_t qm = 1;
            for (int i = 0; i < m; ++i) qm *= nc.q;
            double bm;
            if (!constrained && model == CoeffModel::FixedTrace) {
                const double a = -static_cast<double>(floor_two_sqrt(nc.q));
                bm = g * trace_power(a, static_cast<double>(nc.q), m);
            } else {
                bm = -static_cast<double>(q.spec.coefficient(nc.p, qm, g));
            }
            out.push_back({m * lq, nc.count * bm * lq / static_cast<double>(qm)});
        }
    }
    return out;
}

} // namespace detail

/// Bilinear bound matrix over the basis pairs p_i * p_j: rank term (folded;
/// it is linear in F through Phi(1/2)), signed prime sum, archimedean term,
/// and the discriminant penalty (linear through F(0)). Symmetrized.
inline Matrix bound_matrix(const BoundQuery& q, int d, CoeffModel model = CoeffModel::PerTermFloor,
                           double lambda_override = 0.0) {
    const double lambda = lambda_override > 0.0 ? lambda_override : q.lambda.value();
    const int g = q.dimension;
    const int n = q.field.degree;
    const int rank = q.mode == Mode::GRH ? q.rank : 0;
    const double log_delta = std::log(q.field.root_disc());
    const auto terms = detail::signed_terms(q, lambda, model);

    Matrix b(static_cast<std::size_t>(d) + 1, static_cast<std::size_t>(d) + 1);
    for (int i = 0; i <= d; ++i) {
        for (int j = i; j <= d; ++j) {
            std::vector<double> pi(static_cast<std::size_t>(i) + 1, 0.0), pj(static_cast<std::size_t>(j) + 1, 0.0);
            pi[static_cast<std::size_t>(i)] = 1.0;
            pj[static_cast<std::size_t>(j)] = 1.0;
            auto conv = [&](double x) { return detail::even_poly_conv(pi, pj, x); };
            const double f0 = detail::even_moment(i + j);   // (p_i * p_j)(0)

            double s = 0.0;
            for (const auto& t : terms) s += t.factor * conv(t.arg / lambda);

            // archimedean functional for unnormalized F
            auto integrand = [&](double x) {
                const double v = conv(x / lambda);
                if (x < 1e-4) {
                    double r = f0 * (1.0 - x * 0.5 + x * x / 6.0) - v * (0.5 - x / 12.0);
                    if (x > 0.0) r += (v - f0) / x;
                    return r;
                }
                const double ex = std::exp(-x);
                return v * ex / (1.0 - ex) - f0 * ex / x;
            };
            const double h = integrate_adaptive(integrand, 0.0, lambda, q.quad);
            const double m_f = 2.0 * (f0 * std::log(2.0 * std::numbers::pi) + h -
                                      f0 * exp_integral_e1(lambda));

            const double phi = detail::even_moment(i) * detail::even_moment(j);
            double v = lambda * rank * phi / n + (2.0 / n) * s + g * m_f -
                       2.0 * g * log_delta * f0;
            b(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
            b(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
        }
    }
    return b;
}

struct QuadraticOptimum {
    std::vector<double> coeffs;   // a with a^T G a = 1, a_0 > 0
    double value = 0.0;           // the maximized log bound
};

/// max a^T B a subject to a^T G a = 1 via G = L L^T and Jacobi on
/// L^{-1} B L^{-T}; the top eigenvector maps back through L^{-T}.
inline QuadraticOptimum maximize_quadratic(const QuadraticProgram& prog) {
    const std::size_t n = prog.gram.rows();
    const Matrix l = cholesky(prog.gram);
    // C = L^{-1} B L^{-T}
    Matrix c(n, n);
    std::vector<double> col(n);
    Matrix tmp(n, n);
    for (std::size_t j = 0; j < n; ++j) {   // tmp = L^{-1} B
        for (std::size_t i = 0; i < n; ++i) col[i] = prog.bound(i, j);
        col = forward_solve(l, std::move(col));
        for (std::size_t i = 0; i < n; ++i) tmp(i, j) = col[i];
    }
    for (std::size_t i = 0; i < n; ++i) {   // c = tmp L^{-T} = (L^{-1} tmp^T)^T
        for (std::size_t j = 0; j < n; ++j) col[j] = tmp(i, j);
        col = forward_solve(l, std::move(col));
        for (std::size_t j = 0; j < n; ++j) c(i, j) = col[j];
    }
    EigenDecomposition eig = jacobi_eigen(std::move(c));
    const std::size_t top = n - 1;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = eig.vectors(i, top);
    std::vector<double> a = backward_solve_t(l, std::move(y));
    if (a[0] < 0.0)
        for (double& x : a) x = -x;
    return {std::move(a), eig.values[top]};
}

struct OptimizeResult {
    TestFunction testfunc = TestFunction::odlyzko();   // replaced by the winner
    std::vector<double> coeffs;
    double quadratic_value = 0.0;   // log bound straight from the eigenproblem
    BoundResult bound;              // re-evaluation through the bound assembly
    BoundResult odlyzko_bound;      // same query under the Odlyzko function
    double lambda = 0.0;
};

/// Full pipeline at fixed lambda (taken from the query, or from a
/// preliminary Odlyzko scan when the query carries a grid).
inline OptimizeResult optimize_testfunc(const BoundQuery& query, int d,
                                        CoeffModel model = CoeffModel::PerTermFloor,
                                        unsigned workers = 0) {
    BoundQuery q = query;
    q.testfunc = TestFunction::odlyzko();
    BoundResult odl = lambda_scan(q, workers);
    const double lambda = odl.lambda_star;

    QuadraticProgram prog{gram_matrix(d), bound_matrix(q, d, model, lambda), d};
    QuadraticOptimum opt = maximize_quadratic(prog);

    OptimizeResult out;
    out.lambda = lambda;
    out.coeffs = opt.coeffs;
    out.quadratic_value = opt.value;
    out.testfunc = TestFunction::autocorrelation(opt.coeffs);
    out.odlyzko_bound = std::move(odl);

    BoundQuery re = query;
    re.testfunc = out.testfunc;
    re.lambda = lambda;
    re.grid.reset();
    out.bound = lambda_scan(re, workers);
    return out;
}

} // namespace mestre

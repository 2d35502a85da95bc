#pragma once

// Worst-case prime and prime-ideal sums of the explicit formulas. Every term
// carries the weight |F_lambda(m log q)| log q / q^m and a nonnegative
// coefficient bounding -b_m from below:
//
//   good / unconstrained   g * floor(2 sqrt(q^m))
//   multiplicative part    g_m * 1        (toric eigenvalues on the unit circle)
//   abelian part           g_ab * floor(2 sqrt(q^m))
//   unipotent part         0
//
// floor(2 sqrt(q^m)) is computed by integer square root of 4 q^m; the
// floating floor is off by one near perfect squares.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "mestre/errors.hpp"
#include "mestre/numberfield.hpp"
#include "mestre/testfunc.hpp"

namespace mestre {

inline std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// floor(2 sqrt(q^m)), exactly.
inline std::int64_t floor_two_sqrt(std::int64_t qm) {
    return static_cast<std::int64_t>(isqrt_u64(4ULL * static_cast<std::uint64_t>(qm)));
}

enum class EllipticReduction { Good, Multiplicative, Additive };

/// Special-fiber dimensions (abelian, toric, unipotent) at a bad prime.
struct AbelianType {
    int g_ab = 0;
    int g_m = 0;
    int g_u = 0;
};

/// Per-prime reduction constraints. Elliptic and abelian variants share the
/// container; unlisted primes are worst-case good.
struct ReductionSpec {
    std::map<std::int64_t, EllipticReduction> elliptic;
    std::map<std::int64_t, AbelianType> abelian;

    bool empty() const { return elliptic.empty() && abelian.empty(); }

    void validate(int g) const {
        for (const auto& [p, t] : abelian) {
            if (t.g_ab + t.g_m + t.g_u != g)
                throw MalformedRecord("reduction type at p=" + std::to_string(p) +
                                      " does not sum to the dimension");
            if (t.g_ab < 0 || t.g_m < 0 || t.g_u < 0)
                throw MalformedRecord("negative reduction dimensions at p=" + std::to_string(p));
        }
    }

    /// Worst-case coefficient of the (q, m) term for ideals above p.
    std::int64_t coefficient(std::int64_t p, std::int64_t qm, int g) const {
        if (auto it = elliptic.find(p); it != elliptic.end()) {
            switch (it->second) {
                case EllipticReduction::Good: break;
                case EllipticReduction::Multiplicative: return 1;
                case EllipticReduction::Additive: return 0;
            }
            return floor_two_sqrt(qm);
        }
        if (auto it = abelian.find(p); it != abelian.end())
            return it->second.g_ab * floor_two_sqrt(qm) + it->second.g_m;
        return g * floor_two_sqrt(qm);
    }
};

struct SumTerm {
    std::int64_t q = 0;        // prime or prime-ideal norm
    int m = 0;                 // power in the exponential sum
    int multiplicity = 1;      // ideals sharing this norm
    std::int64_t coefficient = 0;
    double weight = 0.0;       // |F_lambda(m log q)| log q / q^m
    double term = 0.0;         // multiplicity * coefficient * weight
};

struct SumBreakdown {
    std::vector<SumTerm> terms;
    double total = 0.0;   // the bound assembly subtracts 2 * total
};

namespace detail {

template <class Norms>
SumBreakdown sum_over_norms(const Norms& norms, const ReductionSpec& spec,
                            const TestFunction& f, double lambda, int g) {
    SumBreakdown br;
    for (const auto& nc : norms) {
        const std::int64_t q = nc.q;
        const int count = nc.count;
        const std::int64_t p = nc.p;
        const double lq = std::log(static_cast<double>(q));
        for (int m = 1; m * lq <= lambda + 1e-12; ++m) {
            std::int64_t qm = 1;
            for (int i = 0; i < m; ++i) qm *= q;
            SumTerm t;
            t.q = q;
            t.m = m;
            t.multiplicity = count;
            t.coefficient = spec.coefficient(p, qm, g);
            t.weight = std::abs(f(m * lq / lambda)) * lq / static_cast<double>(qm);
            t.term = count * static_cast<double>(t.coefficient) * t.weight;
            br.terms.push_back(t);
            br.total += t.term;
        }
    }
    return br;
}

struct NormEntry {
    std::int64_t q;
    int count;
    std::int64_t p;
};

} // namespace detail

/// Worst-case sum over rational prime powers p^m <= e^lambda.
inline SumBreakdown worst_case_sum_q(const ReductionSpec& spec, const TestFunction& f,
                                     double lambda, int g = 1) {
    if (!(lambda > 0.0)) throw DomainError("worst_case_sum_q: lambda > 0 required");
    spec.validate(g);
    std::vector<detail::NormEntry> norms;
    for (std::int64_t p : primes_up_to(static_cast<std::int64_t>(std::exp(lambda)) + 1))
        norms.push_back({p, 1, p});
    return detail::sum_over_norms(norms, spec, f, lambda, g);
}

/// Worst-case sum over prime-ideal norms q^m <= e^lambda of K. Reduction
/// constraints are keyed by the rational prime and apply to every ideal
/// above it. Returns the breakdown plus the primes that fell back to
/// complete splitting.
struct FieldSum {
    SumBreakdown breakdown;
    std::vector<std::int64_t> fallback_primes;
};

inline FieldSum worst_case_sum_field(const NumberField& k, const TestFunction& f,
                                     double lambda, int g = 1,
                                     const ReductionSpec& spec = {},
                                     std::uint64_t seed = 0) {
    if (!(lambda > 0.0)) throw DomainError("worst_case_sum_field: lambda > 0 required");
    spec.validate(g);
    const double xmax = std::exp(lambda);
    PrimeIdealEnumeration en = prime_ideals_up_to(k, xmax, seed);
    std::vector<detail::NormEntry> norms;
    for (const NormCount& nc : en.norms) norms.push_back({nc.q, nc.count, nc.p});
    FieldSum out;
    out.breakdown = detail::sum_over_norms(norms, spec, f, lambda, g);
    out.fallback_primes = std::move(en.fallback_primes);
    return out;
}

} // namespace mestre

#pragma once

// Integer refinement of a real conductor bound via the divisibility
// constraints of elliptic reduction types over Q: a good prime does not
// divide N, a multiplicative prime divides it exactly once, an additive
// prime at least twice (conductor exponent capped at 8 for p=2, 5 for p=3,
// exactly 2 for p >= 5).

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "mestre/errors.hpp"
#include "mestre/sums.hpp"

namespace mestre {

struct ValuationSet {
    int lo = 0;
    int hi = 0;   // inclusive; unconstrained primes never enter the map

    bool contains(int v) const { return lo <= v && v <= hi; }
};

/// Allowed conductor valuations per constrained prime.
inline std::map<std::int64_t, ValuationSet> congruence_constraints(const ReductionSpec& spec) {
    if (!spec.abelian.empty())
        throw DomainError("integer refinement is defined for elliptic specs over Q only");
    std::map<std::int64_t, ValuationSet> out;
    for (const auto& [p, t] : spec.elliptic) {
        switch (t) {
            case EllipticReduction::Good: out[p] = {0, 0}; break;
            case EllipticReduction::Multiplicative: out[p] = {1, 1}; break;
            case EllipticReduction::Additive:
                out[p] = {2, p == 2 ? 8 : (p == 3 ? 5 : 2)};
                break;
        }
    }
    return out;
}

/// Least integer N >= b_r whose valuations at the constrained primes are
/// admissible. Enumerates multiples of the forced base prod p^{min V_p}.
inline std::int64_t refine_integer_bound(double b_r, const ReductionSpec& spec) {
    if (!(b_r >= 1.0)) throw DomainError("refine_integer_bound: requires B_R >= 1");
    const auto constraints = congruence_constraints(spec);
    std::int64_t base = 1;
    for (const auto& [p, v] : constraints)
        for (int i = 0; i < v.lo; ++i) base *= p;
    const auto admissible = [&](std::int64_t n) {
        for (const auto& [p, v] : constraints) {
            int val = 0;
            while (n % p == 0) {
                n /= p;
                ++val;
            }
            if (!v.contains(val)) return false;
        }
        return true;
    };
    std::int64_t n = base * static_cast<std::int64_t>(std::ceil(b_r / static_cast<double>(base)));
    if (static_cast<double>(n) < b_r) n += base;   // guard against ceil rounding down
    for (;; n += base)
        if (admissible(n)) return n;
}

} // namespace mestre

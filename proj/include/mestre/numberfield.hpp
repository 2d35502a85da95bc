#pragma once

// Number fields from defining data (degree, monic polynomial, discriminant),
// prime splitting via factorization mod p with the Dedekind maximality
// criterion, and enumeration of prime-ideal norms.
//
// Index divisors are handled conservatively: when the criterion cannot
// certify that p is prime to the index, the prime is treated as completely
// split, which can only lower the computed conductor bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "mestre/errors.hpp"

namespace mestre {

struct EFPair {
    int e = 1;   // ramification index
    int f = 1;   // residue degree
};

enum class SplitSource { Dedekind, Override, ConservativeFallback };

struct PrimeSplit {
    std::int64_t p = 0;
    std::vector<EFPair> factors;
    SplitSource source = SplitSource::Dedekind;
};

struct NumberField {
    std::string label;
    int degree = 1;
    std::vector<std::int64_t> poly;   // c0..c_{n-1} of x^n + c_{n-1} x^{n-1} + ... + c0
    std::int64_t disc = 1;
    std::map<std::int64_t, std::vector<EFPair>> splitting_overrides;
    std::vector<std::string> subfield_labels;

    bool is_rationals() const { return degree == 1; }
    double root_disc() const {
        return std::pow(std::abs(static_cast<double>(disc)), 1.0 / degree);
    }
};

inline NumberField rationals() {
    NumberField k;
    k.label = "Q";
    k.degree = 1;
    k.poly = {0};
    k.disc = 1;
    return k;
}

namespace fp {

// Dense polynomials over F_p, lowest degree first, normalized (no leading zeros).
using Poly = std::vector<std::int64_t>;

inline std::int64_t mod(std::int64_t a, std::int64_t p) {
    a %= p;
    return a < 0 ? a + p : a;
}

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly mul(const Poly& a, const Poly& b, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    }
    trim(c);
    return c;
}

inline std::int64_t inv(std::int64_t a, std::int64_t p) {
    // Fermat: p prime
    std::int64_t r = 1, base = mod(a, p), e = p - 2;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r;
}

inline Poly rem(Poly a, const Poly& b, std::int64_t p) {
    const std::int64_t lc_inv = inv(b.back(), p);
    while (deg(a) >= deg(b)) {
        const std::int64_t q = a.back() * lc_inv % p;
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = mod(a[shift + i] - q * b[i] % p, p);
        trim(a);
    }
    return a;
}

inline Poly monic(Poly a, std::int64_t p) {
    if (a.empty()) return a;
    const std::int64_t s = inv(a.back(), p);
    for (auto& c : a) c = c * s % p;
    return a;
}

inline Poly gcd(Poly a, Poly b, std::int64_t p) {
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a.empty() ? a : monic(std::move(a), p);
}

inline Poly powmod(Poly base, unsigned long long e, const Poly& f, std::int64_t p) {
    Poly r = {1};
    base = rem(std::move(base), f, p);
    while (e) {
        if (e & 1) r = rem(mul(r, base, p), f, p);
        base = rem(mul(base, base, p), f, p);
        e >>= 1;
    }
    return r;
}

/// x^(p^k) mod f, by k-fold Frobenius powering.
inline Poly frobenius_pow(const Poly& f, std::int64_t p, int k, Poly start = {0, 1}) {
    Poly r = rem(std::move(start), f, p);
    for (int i = 0; i < k; ++i) r = powmod(std::move(r), static_cast<unsigned long long>(p), f, p);
    return r;
}

inline Poly derivative(const Poly& a, std::int64_t p) {
    Poly d;
    for (std::size_t i = 1; i < a.size(); ++i) d.push_back(static_cast<std::int64_t>(i) % p * a[i] % p);
    trim(d);
    return d;
}

inline Poly sub(Poly a, const Poly& b, std::int64_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = mod(a[i] - b[i], p);
    trim(a);
    return a;
}

inline Poly add(Poly a, const Poly& b, std::int64_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + b[i]) % p;
    trim(a);
    return a;
}

inline Poly quot(Poly a, const Poly& b, std::int64_t p) {
    if (a.size() < b.size()) return {};
    Poly q(a.size() - b.size() + 1, 0);
    const std::int64_t lc_inv = inv(b.back(), p);
    while (deg(a) >= deg(b)) {
        const std::int64_t c = a.back() * lc_inv % p;
        const std::size_t shift = a.size() - b.size();
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = mod(a[shift + i] - c * b[i] % p, p);
        trim(a);
    }
    trim(q);
    return q;
}

inline bool is_one(const Poly& a) { return a.size() == 1 && a[0] == 1; }

/// Deterministic PRNG for equal-degree splitting (splitmix64).
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// Cantor-Zassenhaus equal-degree splitting: f squarefree, all irreducible
/// factors of degree d. Appends the factors to `out`.
inline void equal_degree(Poly f, int d, std::int64_t p, Rng& rng, std::vector<Poly>& out) {
    if (deg(f) == d) {
        out.push_back(monic(std::move(f), p));
        return;
    }
    Poly splitter;
    while (splitter.empty() || deg(splitter) == 0 || deg(splitter) == deg(f)) {
        // random polynomial of degree < deg f
        Poly r(static_cast<std::size_t>(deg(f)), 0);
        for (auto& c : r) c = static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(p));
        trim(r);
        if (r.empty()) continue;
        Poly g = gcd(f, r, p);
        if (deg(g) > 0 && deg(g) < deg(f)) {
            splitter = g;   // lucky gcd
            break;
        }
        if (p == 2) {
            // trace map r + r^2 + r^4 + ... + r^{2^{d-1}}
            Poly t = rem(r, f, p), acc = t;
            for (int i = 1; i < d; ++i) {
                t = rem(mul(t, t, p), f, p);
                acc = add(std::move(acc), t, p);
            }
            g = gcd(f, acc, p);
        } else {
            const unsigned long long e = [&] {
                unsigned long long pd = 1;
                for (int i = 0; i < d; ++i) pd *= static_cast<unsigned long long>(p);
                return (pd - 1) / 2;
            }();
            Poly t = powmod(r, e, f, p);
            if (!t.empty()) t[0] = mod(t[0] - 1, p);
            trim(t);
            g = gcd(f, t, p);
        }
        if (deg(g) > 0 && deg(g) < deg(f)) splitter = g;
    }
    equal_degree(quot(f, splitter, p), d, p, rng, out);
    equal_degree(std::move(splitter), d, p, rng, out);
}

/// Factors of a monic squarefree f, via distinct-degree then equal-degree
/// splitting.
inline std::vector<Poly> factor_squarefree(Poly f, std::int64_t p, Rng& rng) {
    std::vector<Poly> out;
    Poly h = {0, 1};   // tracks x^{p^d} mod f
    for (int d = 1; deg(f) > 0 && 2 * d <= deg(f); ++d) {
        h = frobenius_pow(f, p, 1, std::move(h));
        Poly g = gcd(f, sub(h, Poly{0, 1}, p), p);
        if (deg(g) > 0) {
            equal_degree(g, d, p, rng, out);
            f = quot(f, g, p);
            h = rem(std::move(h), f.size() > 1 ? f : Poly{0, 1}, p);
        }
    }
    if (deg(f) > 0) out.push_back(std::move(f));
    return out;
}

/// Squarefree decomposition in characteristic p: f = prod g_i^i, g_i
/// squarefree and pairwise coprime. Returns (g_i, i) for nontrivial g_i.
inline std::vector<std::pair<Poly, int>> squarefree_decompose(Poly f, std::int64_t p) {
    std::vector<std::pair<Poly, int>> out;
    Poly df = derivative(f, p);
    if (df.empty()) {
        // f = h(x)^p with h picking every p-th coefficient (Frobenius fixes F_p)
        Poly h((f.size() - 1) / static_cast<std::size_t>(p) + 1, 0);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = f[i * static_cast<std::size_t>(p)];
        for (auto& [g, m] : squarefree_decompose(std::move(h), p))
            out.emplace_back(std::move(g), m * static_cast<int>(p));
        return out;
    }
    Poly c = gcd(f, df, p);
    Poly w = quot(f, c, p);
    int i = 1;
    while (!is_one(w)) {
        Poly y = gcd(w, c, p);
        Poly fac = quot(w, y, p);
        if (deg(fac) > 0) out.emplace_back(std::move(fac), i);
        w = std::move(y);
        c = quot(c, w, p);
        ++i;
    }
    if (!is_one(c)) {
        for (auto& [g, m] : squarefree_decompose(std::move(c), p))
            out.emplace_back(std::move(g), m * static_cast<int>(p));
    }
    return out;
}

/// Full factorization of monic f over F_p as (irreducible factor,
/// multiplicity); deterministic for a fixed seed.
inline std::vector<std::pair<Poly, int>> factor(Poly f, std::int64_t p,
                                                std::uint64_t seed = 0) {
    std::vector<std::pair<Poly, int>> result;
    f = monic(std::move(f), p);
    if (deg(f) <= 0) return result;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p));
    for (auto& [part, mult] : squarefree_decompose(std::move(f), p))
        for (auto& fac : factor_squarefree(std::move(part), p, rng))
            result.emplace_back(std::move(fac), mult);
    return result;
}

} // namespace fp

/// Degrees and multiplicities of the irreducible factors of poly mod p,
/// sorted by (degree, multiplicity).
inline std::vector<std::pair<int, int>> factor_mod_p(const std::vector<std::int64_t>& monic_poly,
                                                     std::int64_t p, std::uint64_t seed = 0) {
    fp::Poly f;
    for (auto c : monic_poly) f.push_back(fp::mod(c, p));
    fp::trim(f);
    if (f.empty()) throw DomainError("factor_mod_p: polynomial vanishes mod p");
    std::vector<std::pair<int, int>> out;
    for (auto& [fac, m] : fp::factor(std::move(f), p, seed))
        out.emplace_back(fp::deg(fac), m);
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

inline std::vector<std::int64_t> full_poly(const NumberField& k) {
    std::vector<std::int64_t> f = k.poly;
    f.push_back(1);   // monic leading coefficient
    return f;
}

/// Dedekind's criterion: true iff p does not divide [O_K : Z[theta]],
/// given the factorization of the (monic, full) defining polynomial mod p.
/// With g* = prod g_i and h* = prod g_i^{e_i - 1} lifted to Z[x] with
/// coefficients in [0, p), set T = (g* h* - f)/p; the quotient is exact since
/// g* h* == f (mod p). Then p is prime to the index iff gcd(T, g*, h*) = 1
/// in F_p[x].
inline bool dedekind_index_free(const std::vector<std::int64_t>& f, std::int64_t p,
                                const std::vector<std::pair<fp::Poly, int>>& factors) {
    using fp::Poly;
    Poly gstar = {1}, hstar = {1};
    for (const auto& [fac, m] : factors) {
        gstar = fp::mul(gstar, fac, p);
        for (int i = 1; i < m; ++i) hstar = fp::mul(hstar, fac, p);
    }
    const std::size_t n = f.size();
    std::vector<std::int64_t> gh(n, 0);
    for (std::size_t i = 0; i < gstar.size(); ++i)
        for (std::size_t j = 0; j < hstar.size(); ++j)
            gh[i + j] += gstar[i] * hstar[j];
    Poly T(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t num = gh[i] - f[i];   // divisible by p: g*h* == f mod p
        T[i] = fp::mod(num / p, p);
    }
    fp::trim(T);
    Poly g = fp::gcd(fp::gcd(T, gstar, p), hstar, p);
    return fp::deg(g) <= 0;
}

} // namespace detail

namespace detail {

inline PrimeSplit split_prime_uncached(const NumberField& k, std::int64_t p,
                                       std::uint64_t seed) {
    PrimeSplit s;
    s.p = p;
    if (auto it = k.splitting_overrides.find(p); it != k.splitting_overrides.end()) {
        s.factors = it->second;
        s.source = SplitSource::Override;
        return s;
    }
    if (k.degree == 1) {
        s.factors = {{1, 1}};
        s.source = SplitSource::Dedekind;
        return s;
    }
    const auto f = detail::full_poly(k);
    fp::Poly fbar;
    for (auto c : f) fbar.push_back(fp::mod(c, p));
    fp::trim(fbar);
    auto factors = fp::factor(fbar, p, seed);
    const bool squarefree =
        std::all_of(factors.begin(), factors.end(), [](const auto& fm) { return fm.second == 1; });
    if (squarefree || detail::dedekind_index_free(f, p, factors)) {
        for (const auto& [fac, m] : factors) s.factors.push_back({m, fp::deg(fac)});
        std::sort(s.factors.begin(), s.factors.end(),
                  [](const EFPair& a, const EFPair& b) { return std::tie(a.f, a.e) < std::tie(b.f, b.e); });
        s.source = SplitSource::Dedekind;
        return s;
    }
    s.factors.assign(static_cast<std::size_t>(k.degree), EFPair{1, 1});
    s.source = SplitSource::ConservativeFallback;
    return s;
}

struct SplitKey {
    std::vector<std::int64_t> poly;
    std::int64_t disc;
    std::int64_t p;
    std::uint64_t seed;
    bool operator<(const SplitKey& o) const {
        return std::tie(poly, disc, p, seed) < std::tie(o.poly, o.disc, o.p, o.seed);
    }
};

} // namespace detail

/// Splitting of p in K: overrides first, else Dedekind factorization with the
/// maximality criterion, else the conservative complete-splitting fallback.
/// Results are memoized (lambda scans revisit the same primes hundreds of
/// times); the cache is guarded for concurrent scan workers.
inline PrimeSplit split_prime(const NumberField& k, std::int64_t p, std::uint64_t seed = 0) {
    if (k.degree == 1 || k.splitting_overrides.count(p))
        return detail::split_prime_uncached(k, p, seed);
    static std::map<detail::SplitKey, PrimeSplit> cache;
    static std::shared_mutex mtx;
    detail::SplitKey key{k.poly, k.disc, p, seed};
    {
        std::shared_lock lock(mtx);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    PrimeSplit s = detail::split_prime_uncached(k, p, seed);
    std::unique_lock lock(mtx);
    cache.emplace(std::move(key), s);
    return s;
}

struct NormCount {
    std::int64_t q = 0;   // prime-ideal norm p^f
    int count = 0;        // number of ideals with this norm
    std::int64_t p = 0;   // rational prime below
};

inline std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    std::vector<std::int64_t> out;
    if (n < 2) return out;
    std::vector<bool> sieve(static_cast<std::size_t>(n) + 1, true);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (!sieve[static_cast<std::size_t>(i)]) continue;
        out.push_back(i);
        for (std::int64_t j = i * i; j <= n; j += i) sieve[static_cast<std::size_t>(j)] = false;
    }
    return out;
}

struct PrimeIdealEnumeration {
    std::vector<NormCount> norms;                       // sorted by q
    std::vector<std::int64_t> fallback_primes;          // where the conservative path fired
};

/// All prime-ideal norms q = p^f <= x_max with multiplicities.
inline PrimeIdealEnumeration prime_ideals_up_to(const NumberField& k, double x_max,
                                                std::uint64_t seed = 0) {
    PrimeIdealEnumeration out;
    if (x_max < 2.0) return out;
    std::map<std::int64_t, std::pair<int, std::int64_t>> agg;   // q -> (count, p)
    for (std::int64_t p : primes_up_to(static_cast<std::int64_t>(x_max))) {
        PrimeSplit s = split_prime(k, p, seed);
        if (s.source == SplitSource::ConservativeFallback) out.fallback_primes.push_back(p);
        for (const EFPair& ef : s.factors) {
            double qd = std::pow(static_cast<double>(p), ef.f);
            if (qd > x_max + 1e-9) continue;
            std::int64_t q = 1;
            for (int i = 0; i < ef.f; ++i) q *= p;
            auto& slot = agg[q];
            slot.first += 1;
            slot.second = p;
        }
    }
    for (auto& [q, cp] : agg) out.norms.push_back({q, cp.first, cp.second});
    return out;
}

} // namespace mestre

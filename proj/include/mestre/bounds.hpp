#pragma once

// Conductor lower-bound assembly. Over Q (dimension g, rank r under GRH+BSD):
//
//   log B_R = lambda r Phi(1/2) - 2 S + g M_{lambda,F}
//
// with S the worst-case prime sum. Over a number field K of degree n the
// per-degree normalized bound is
//
//   log B = [lambda r Phi(1/2)]/n - (2/n) S_K + g M_{lambda,F} - 2 g log delta_K
//
// so that B bounds N_{K/Q}(conductor)^{1/n} from below; B > 1 with r = 0
// certifies that no abelian variety over K has everywhere good reduction.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mestre/numberfield.hpp"
#include "mestre/parallel.hpp"
#include "mestre/quadrature.hpp"
#include "mestre/sums.hpp"
#include "mestre/testfunc.hpp"

namespace mestre {

enum class Mode { GRH, Unconditional };

struct LambdaGrid {
    double lo = 1.0;
    double hi = 4.0;
    double step = 0.01;

    std::vector<double> points() const {
        if (!(step > 0.0) || !(lo <= hi)) throw DomainError("invalid lambda grid");
        std::vector<double> out;
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
        return out;
    }
};

struct BoundQuery {
    NumberField field = rationals();
    int dimension = 1;             // g
    int rank = 0;                  // analytic rank r
    ReductionSpec spec;
    TestFunction testfunc = TestFunction::odlyzko();
    std::optional<double> lambda;  // single point ...
    std::optional<LambdaGrid> grid;  // ... or a scan
    Mode mode = Mode::GRH;
    QuadratureConfig quad;
    std::uint64_t seed = 0;
};

struct BoundResult {
    double lambda_star = 0.0;
    double rank_term = 0.0;    // lambda r Phi(1/2) / n
    double prime_sum = 0.0;    // 2 S / n
    double arch_term = 0.0;    // g M_{lambda,F}
    double disc_term = 0.0;    // 2 g log delta_K
    double log_bound = 0.0;    // rank_term - prime_sum + arch_term - disc_term
    double b_r = 0.0;          // exp(log_bound)
    std::optional<std::int64_t> b_z;
    bool egr_excluded = false;
    std::vector<std::string> flags;
    SumBreakdown breakdown;
};

namespace detail {

inline TestFunction effective_testfunc(const BoundQuery& q) {
    return q.mode == Mode::Unconditional ? q.testfunc.cosh_damped() : q.testfunc;
}

inline void collect_flags(const BoundQuery& q, const TestFunction& f,
                          std::vector<std::string>& flags) {
    if (q.mode == Mode::GRH && !f.is_autocorrelation())
        flags.push_back("positivity_checked_numerically");
    for (const std::string& w : f.warnings()) flags.push_back("testfunc: " + w);
}

/// One bound evaluation at a fixed lambda. Handles Q and number fields
/// uniformly (over Q: n = 1, delta = 1).
inline BoundResult evaluate_at(const BoundQuery& q, const TestFunction& f, double lambda) {
    const int g = q.dimension;
    const int n = q.field.degree;
    BoundResult r;
    r.lambda_star = lambda;
    // Unconditional mode drops the rank term: without GRH the zero-sum
    // positivity argument is unavailable.
    const int rank = q.mode == Mode::GRH ? q.rank : 0;
    r.rank_term = lambda * rank * f.phi_half() / n;

    // With no reduction constraints every coefficient carries a plain factor
    // of g, so the bound is assembled per unit dimension and scaled; this
    // keeps log B(dim g) = g * log B(dim 1) an exact identity.
    const bool per_dim = q.spec.empty();
    const int sum_dim = per_dim ? 1 : g;

    if (q.field.is_rationals()) {
        r.breakdown = worst_case_sum_q(q.spec, f, lambda, sum_dim);
    } else {
        FieldSum fs = worst_case_sum_field(q.field, f, lambda, sum_dim, q.spec, q.seed);
        r.breakdown = std::move(fs.breakdown);
        for (std::int64_t p : fs.fallback_primes)
            r.flags.push_back("conservative_fallback:p=" + std::to_string(p));
    }
    const double m = m_lambda(f, lambda, q.quad);
    const double log_delta = std::log(q.field.root_disc());
    if (per_dim) {
        const double inner = m - 2.0 * r.breakdown.total / n - 2.0 * log_delta;
        r.log_bound = r.rank_term + g * inner;
        for (SumTerm& t : r.breakdown.terms) {   // report dimension-g coefficients
            t.coefficient *= g;
            t.term *= g;
        }
        r.breakdown.total *= g;
    } else {
        r.log_bound = r.rank_term - 2.0 * r.breakdown.total / n + g * m - 2.0 * g * log_delta;
    }
    r.prime_sum = 2.0 * r.breakdown.total / n;
    r.arch_term = g * m;
    r.disc_term = 2.0 * g * log_delta;
    r.b_r = std::exp(r.log_bound);
    r.egr_excluded = r.log_bound - r.rank_term > 0.0;   // rank-free criterion
    return r;
}

} // namespace detail

/// Evaluates the query at its lambda, or scans its grid and returns the best
/// bound (ties toward smaller lambda). Grid points are evaluated in parallel;
/// the reduction order is fixed by index.
inline BoundResult lambda_scan(const BoundQuery& q, unsigned workers = 0) {
    const TestFunction f = detail::effective_testfunc(q);
    std::vector<double> lams;
    if (q.grid)
        lams = q.grid->points();
    else if (q.lambda)
        lams = {*q.lambda};
    else
        throw DomainError("bound query needs lambda or a lambda grid");

    std::vector<BoundResult> results = parallel_map<BoundResult>(
        lams.size(), [&](std::size_t i) { return detail::evaluate_at(q, f, lams[i]); },
        workers);
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].log_bound > results[best].log_bound) best = i;
    BoundResult r = std::move(results[best]);
    detail::collect_flags(q, f, r.flags);
    return r;
}

/// Elliptic curves over Q (g = 1).
inline BoundResult bound_elliptic_q(const BoundQuery& q, unsigned workers = 0) {
    if (!q.field.is_rationals()) throw DomainError("bound_elliptic_q: field must be Q");
    BoundQuery qq = q;
    qq.dimension = 1;
    return lambda_scan(qq, workers);
}

/// Abelian varieties over Q of dimension g.
inline BoundResult bound_abelian_q(const BoundQuery& q, unsigned workers = 0) {
    if (!q.field.is_rationals()) throw DomainError("bound_abelian_q: field must be Q");
    return lambda_scan(q, workers);
}

/// Normalized per-degree bound over a number field; B_R bounds
/// N_{K/Q}(conductor)^{1/n} (to the g-th power structure of the theorem).
inline BoundResult bound_number_field(const BoundQuery& q, unsigned workers = 0) {
    return lambda_scan(q, workers);
}

/// delta_K <= 2 pi e^gamma is necessary for B(K,F,lambda) >= 1; fields
/// failing this can be skipped in scans.
inline bool disc_prefilter(const NumberField& k) {
    static const double cap = 2.0 * std::numbers::pi * std::exp(kEulerGamma);
    return k.root_disc() <= cap;
}

// --- batch field scanning with subfield propagation ---

struct FieldScanRow {
    std::string label;
    int degree = 0;
    bool prefilter_passed = false;
    bool scanned = false;
    double lambda_star = 0.0;
    double b = 0.0;               // scan max of B(K,F,lambda), rank 0, g = 1
    bool egr_excluded = false;    // direct bound > 1
    bool excluded_via_extension = false;
    std::string excluded_via;     // label of the extension that propagated
    std::vector<std::string> flags;
};

struct ScanReport {
    std::vector<FieldScanRow> rows;
    std::map<int, int> direct_by_degree;
    std::map<int, int> with_subfields_by_degree;
    std::vector<std::string> warnings;
};

struct ScanProtocol {
    LambdaGrid grid{1.0, 6.0, 0.01};
    TestFunction testfunc = TestFunction::odlyzko();
    Mode mode = Mode::GRH;
    QuadratureConfig quad;
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

/// Scans each field (prefilter, lambda scan, EGR flag), then propagates
/// exclusions downward along declared subfield links: an excluded extension
/// excludes every declared subfield.
inline ScanReport scan_fields(const std::vector<NumberField>& fields,
                              const ScanProtocol& protocol = {}) {
    ScanReport report;
    report.rows = parallel_map<FieldScanRow>(
        fields.size(),
        [&](std::size_t i) {
            const NumberField& k = fields[i];
            FieldScanRow row;
            row.label = k.label;
            row.degree = k.degree;
            row.prefilter_passed = disc_prefilter(k);
            if (!row.prefilter_passed) return row;   // bound <= 1 for every F, lambda
            BoundQuery q;
            q.field = k;
            q.testfunc = protocol.testfunc;
            q.mode = protocol.mode;
            q.grid = protocol.grid;
            q.quad = protocol.quad;
            q.seed = protocol.seed;
            BoundResult r = bound_number_field(q);
            row.scanned = true;
            row.lambda_star = r.lambda_star;
            row.b = r.b_r;
            row.egr_excluded = r.egr_excluded;
            row.flags = std::move(r.flags);
            return row;
        },
        protocol.workers);

    // subfield propagation: label -> row index
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < report.rows.size(); ++i) index[report.rows[i].label] = i;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (!report.rows[i].egr_excluded) continue;
        for (const std::string& sub : fields[i].subfield_labels) {
            auto it = index.find(sub);
            if (it == index.end()) {
                report.warnings.push_back("unresolved subfield label '" + sub + "' of " +
                                          fields[i].label);
                continue;
            }
            FieldScanRow& target = report.rows[it->second];
            if (!target.egr_excluded && !target.excluded_via_extension) {
                target.excluded_via_extension = true;
                target.excluded_via = fields[i].label;
            }
        }
    }
    for (const FieldScanRow& row : report.rows) {
        if (row.egr_excluded) report.direct_by_degree[row.degree] += 1;
        if (row.egr_excluded || row.excluded_via_extension)
            report.with_subfields_by_degree[row.degree] += 1;
    }
    return report;
}

} // namespace mestre

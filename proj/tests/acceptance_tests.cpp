// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Reference values come from the published tables this tool
// reproduces. Three of those published numbers are not reproducible by the
// stated formulas (forensic notes inline); they are asserted as printed in
// cases tagged [reference-mismatch], which are expected to stay red.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <mestre/mestre.hpp>

using namespace mestre;
using Catch::Approx;

namespace {

std::string fixtures(const std::string& name) {
    return std::string(MESTRE_FIXTURES_DIR) + "/" + name;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct CriterionLine {
    std::string name;
    bool ok = true;
    void note(bool pass) { ok = ok && pass; }
    ~CriterionLine() {
        std::printf("[%s] %s\n", name.c_str(), ok ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
};

constexpr auto kGood = EllipticReduction::Good;
constexpr auto kMult = EllipticReduction::Multiplicative;
constexpr auto kAdd = EllipticReduction::Additive;

struct EllRow {
    std::vector<std::int64_t> good, mult, add;
    double lambda;
    double b_r;
    std::int64_t b_z;   // 0 = not checked
    double tol;
};

BoundResult run_elliptic(const EllRow& row, int rank) {
    BoundQuery q;
    q.rank = rank;
    q.lambda = row.lambda;
    for (auto p : row.good) q.spec.elliptic[p] = kGood;
    for (auto p : row.mult) q.spec.elliptic[p] = kMult;
    for (auto p : row.add) q.spec.elliptic[p] = kAdd;
    BoundResult r = bound_elliptic_q(q);
    if (r.b_r >= 1.0) r.b_z = refine_integer_bound(r.b_r, q.spec);
    return r;
}

BoundQuery abelian_query(int g, int rank, AbelianType at2, AbelianType at3) {
    BoundQuery q;
    q.dimension = g;
    q.rank = rank;
    q.spec.abelian[2] = at2;
    q.spec.abelian[3] = at3;
    return q;
}

} // namespace

TEST_CASE("criterion 1: gamma identity", "[acceptance][c1]") {
    CriterionLine line{"criterion 1: gamma identity"};
    Stopwatch sw;
    const double v = euler_gamma_integral();
    const double dt = sw.seconds();
    line.note(std::abs(v - 0.57721566) <= 1e-8 + 5e-9);
    CHECK(v == Approx(0.57721566).margin(1e-8 + 5e-9));
    CHECK(dt < 0.1);
    line.note(dt < 0.1);
}

TEST_CASE("criterion 2: Phi(1/2) for the Odlyzko function", "[acceptance][c2]") {
    CriterionLine line{"criterion 2: Phi(1/2)"};
    const double v = TestFunction::odlyzko().phi_half();
    const double want = 8.0 / (std::numbers::pi * std::numbers::pi);
    line.note(std::abs(v - want) <= 1e-10);
    CHECK(v == Approx(want).margin(1e-10));
}

TEST_CASE("criterion 3: rank-0 table over Q (13 rows, B_R and exact B_Z)",
          "[acceptance][c3]") {
    CriterionLine line{"criterion 3: rank-0 table"};
    Stopwatch sw;
    const std::vector<EllRow> rows = {
        {{3}, {2}, {}, 1.47, 12.956, 14, 0.05},
        {{2}, {3}, {}, 1.49, 10.823, 15, 0.05},
        {{2, 3}, {5}, {}, 1.31, 10.394, 35, 0.05},
        {{2, 3}, {7}, {}, 1.31, 10.394, 35, 0.05},
        {{3}, {}, {2}, 1.68, 17.293, 20, 0.05},
        {{2}, {}, {3}, 1.69, 11.552, 27, 0.05},
        {{2, 3}, {}, {5}, 1.31, 10.394, 25, 0.05},
        {{}, {2, 3}, {}, 1.80, 15.037, 30, 0.05},
        {{3}, {2, 5}, {}, 1.47, 12.956, 70, 0.05},
        {{}, {2}, {3}, 1.98, 17.444, 18, 0.05},
        {{3}, {2}, {5}, 1.47, 12.956, 50, 0.05},
        {{}, {3}, {2}, 1.99, 22.525, 24, 0.05},
        {{3}, {5}, {2}, 1.69, 17.302, 20, 0.05},
    };
    for (const EllRow& row : rows) {
        BoundResult r = run_elliptic(row, 0);
        CHECK(r.b_r == Approx(row.b_r).margin(row.tol));
        line.note(std::abs(r.b_r - row.b_r) <= row.tol);
        REQUIRE(r.b_z.has_value());
        CHECK(*r.b_z == row.b_z);
        line.note(*r.b_z == row.b_z);
    }
    CHECK(sw.seconds() < 5.0);
    line.note(sw.seconds() < 5.0);
}

TEST_CASE("criterion 4: rank-1 table over Q (19 reproducible rows)", "[acceptance][c4]") {
    CriterionLine line{"criterion 4: rank-1 table, reproducible rows"};
    Stopwatch sw;
    const std::vector<EllRow> rows = {
        {{}, {}, {}, 1.68, 34.566, 0, 0.1},
        {{3}, {2}, {}, 1.96, 51.571, 0, 0.1},
        {{2, 5}, {3}, {}, 1.99, 44.926, 0, 0.5},
        {{2, 3}, {5}, {}, 1.69, 34.588, 0, 0.5},
        {{2, 3}, {7}, {}, 1.68, 34.566, 0, 0.5},
        {{3}, {}, {2}, 2.15, 81.113, 0, 0.1},
        {{2}, {}, {3}, 2.15, 54.927, 0, 0.1},
        {{2, 3}, {}, {5}, 1.70, 34.598, 0, 0.5},
        {{2, 3}, {}, {7}, 1.68, 34.566, 0, 0.5},
        {{}, {2, 3}, {}, 2.30, 79.323, 0, 0.1},
        {{3}, {2, 5}, {}, 2.24, 55.34, 0, 0.5},
        {{2}, {3, 5}, {}, 2.27, 48.76, 0, 0.5},
        {{}, {2}, {3}, 2.47, 104.971, 0, 0.1},
        {{3}, {2}, {5}, 2.39, 58.434, 0, 0.5},
        {{}, {3}, {2}, 2.49, 137.242, 0, 0.1},
        {{2}, {3}, {5}, 2.45, 51.797, 0, 0.5},
        {{3}, {5}, {2}, 2.48, 95.06, 0, 0.5},
        {{2, 3}, {5}, {7}, 1.69, 34.588, 0, 0.5},
        {{}, {}, {2, 3}, 2.65, 189.709, 0, 0.1},
    };
    for (const EllRow& row : rows) {
        BoundResult r = run_elliptic(row, 1);
        CHECK(r.b_r == Approx(row.b_r).margin(row.tol));
        line.note(std::abs(r.b_r - row.b_r) <= row.tol);
    }
    CHECK(sw.seconds() < 10.0);
    line.note(sw.seconds() < 10.0);
}

TEST_CASE("criterion 4: rank-1 table row (good 2, mult 5, add 3)",
          "[acceptance][c4][reference-mismatch]") {
    CriterionLine line{"criterion 4: row (good 2, mult 5, add 3) as printed"};
    // The reference prints 64.737 at lambda 2.53. The stated sum gives
    // 63.734 there (63.935 at the scan optimum 2.46); the printed value is
    // recovered only by truncating good-prime terms at m <= 2, which drops
    // subtracted terms and is not a valid lower bound. Asserted as printed.
    const EllRow row{{2}, {5}, {3}, 2.53, 64.737, 0, 0.5};
    BoundResult r = run_elliptic(row, 1);
    std::printf("    computed %.4f at lambda %.2f, printed %.3f\n", r.b_r, row.lambda, row.b_r);
    line.note(std::abs(r.b_r - row.b_r) <= row.tol);
    CHECK(r.b_r == Approx(row.b_r).margin(row.tol));
}

TEST_CASE("criterion 5: unconstrained rank-0 scan over Q", "[acceptance][c5]") {
    CriterionLine line{"criterion 5: unconstrained rank-0 scan"};
    Stopwatch sw;
    BoundQuery q;
    q.grid = LambdaGrid{1.0, 3.0, 0.01};
    BoundResult r = bound_elliptic_q(q);
    std::printf("    max B_R = %.4f at lambda* = %.2f\n", r.b_r, r.lambda_star);
    CHECK(r.b_r >= 10.27);
    CHECK(r.b_r <= 10.40);
    line.note(r.b_r >= 10.27 && r.b_r <= 10.40);
    CHECK(sw.seconds() < 5.0);
    line.note(sw.seconds() < 5.0);
}

TEST_CASE("criterion 6: abelian surface tables and dimension rows",
          "[acceptance][c6]") {
    CriterionLine line{"criterion 6: abelian tables (reproducible cells)"};
    Stopwatch sw;
    struct SurfaceRow {
        int rank;
        AbelianType at2, at3;
        double lambda, b_r;
    };
    const std::vector<SurfaceRow> rows = {
        {0, {0, 2, 0}, {1, 1, 0}, 1.62, 185.9},  {0, {0, 2, 0}, {1, 0, 1}, 1.71, 202.4},
        {0, {0, 1, 1}, {1, 1, 0}, 1.73, 258.2},  {0, {0, 1, 1}, {1, 0, 1}, 1.82, 289.8},
        {0, {0, 0, 2}, {1, 1, 0}, 1.83, 371.7},  {0, {0, 0, 2}, {1, 0, 1}, 1.92, 428.9},
        {1, {0, 2, 0}, {1, 1, 0}, 1.87, 768.4},  {1, {0, 2, 0}, {1, 0, 1}, 1.97, 899.3},
        {1, {0, 1, 1}, {1, 1, 0}, 1.98, 1160.8}, {1, {0, 1, 1}, {1, 0, 1}, 2.06, 1398.3},
        {1, {0, 0, 2}, {1, 1, 0}, 2.07, 1810.0}, {1, {0, 0, 2}, {1, 0, 1}, 2.15, 2232.4},
    };
    for (const SurfaceRow& row : rows) {
        BoundQuery q = abelian_query(2, row.rank, row.at2, row.at3);
        q.lambda = row.lambda;
        BoundResult r = bound_abelian_q(q);
        CHECK(r.b_r == Approx(row.b_r).margin(0.5));
        line.note(std::abs(r.b_r - row.b_r) <= 0.5);
    }

    // dimension table: unconstrained dimension-2 cell and the two
    // bad-at-{2,3} cells; all scans over [1, 3] step 0.01
    {
        BoundQuery q;
        q.dimension = 2;
        q.grid = LambdaGrid{1.0, 3.0, 0.01};
        BoundResult r = bound_abelian_q(q);
        CHECK(r.b_r == Approx(108.0).epsilon(0.01));
        line.note(std::abs(r.b_r - 108.0) <= 1.08);
    }
    for (auto [g, want] : {std::pair<int, double>{2, 140.0}, {4, 14687.3}}) {
        BoundQuery q = abelian_query(g, 0, {g - 1, 1, 0}, {g - 1, 1, 0});
        q.grid = LambdaGrid{1.0, 3.0, 0.01};
        BoundResult r = bound_abelian_q(q);
        CHECK(r.b_r == Approx(want).epsilon(0.01));
        line.note(std::abs(r.b_r - want) <= 0.01 * want);
    }
    CHECK(sw.seconds() < 20.0);
    line.note(sw.seconds() < 20.0);
}

TEST_CASE("criterion 6: unconstrained dimension-3/4 cells as printed",
          "[acceptance][c6][reference-mismatch]") {
    CriterionLine line{"criterion 6: dimension-3/4 unconstrained cells as printed"};
    // The reference prints 1086.3 and 11168.2. The per-dimension structure
    // of the bound forces B(dim g) = B(dim 1)^g, giving 1122.8 and 11669.6
    // (consistent with the reproduced dim-2 cell 108.0 = 10.39^2). The
    // printed cells match only if the (q,m) = (3,1) coefficient is raised
    // from floor(2 sqrt 3) = 3 to 4 per dimension, the fingerprint of a
    // stale multiplicative term at p = 3 in the reference computation.
    // Asserted as printed.
    for (auto [g, want] : {std::pair<int, double>{3, 1086.3}, {4, 11168.2}}) {
        BoundQuery q;
        q.dimension = g;
        q.grid = LambdaGrid{1.0, 3.0, 0.01};
        BoundResult r = bound_abelian_q(q);
        std::printf("    dim %d: computed %.1f, printed %.1f\n", g, r.b_r, want);
        line.note(std::abs(r.b_r - want) <= 0.01 * want);
        CHECK(r.b_r == Approx(want).epsilon(0.01));
    }
}

TEST_CASE("criterion 7: number-field examples and EGR certificates",
          "[acceptance][c7]") {
    CriterionLine line{"criterion 7: number-field examples"};
    Stopwatch sw;

    LoadedFields pair = load_fields(fixtures("q_sqrt_m23.jsonl"));
    REQUIRE(pair.fields.size() == 2);

    // Q(sqrt(-23)): the published 0.45 is the lambda-scan optimum over
    // [1,3] step 0.01 (reached at lambda* = 1.31; the prose attaches it to
    // lambda = 1.84, where the formula evaluates to 0.3352 -- pinned in the
    // unit suite as a regression value).
    {
        BoundQuery q;
        q.field = pair.fields[0];
        q.grid = LambdaGrid{1.0, 3.0, 0.01};
        BoundResult r = bound_number_field(q);
        std::printf("    Q(sqrt(-23)): max B = %.4f at lambda* = %.2f\n", r.b_r, r.lambda_star);
        CHECK(r.b_r == Approx(0.45).margin(0.02));
        line.note(std::abs(r.b_r - 0.45) <= 0.02);
        CHECK_FALSE(r.egr_excluded);
    }
    // Hilbert class field at lambda = 3.58
    {
        BoundQuery q;
        q.field = pair.fields[1];
        q.lambda = 3.58;
        BoundResult r = bound_number_field(q);
        std::printf("    HCF: B(3.58) = %.4f\n", r.b_r);
        CHECK(r.b_r == Approx(2.01).margin(0.05));
        line.note(std::abs(r.b_r - 2.01) <= 0.05);
        CHECK(r.egr_excluded);
        line.note(r.egr_excluded);
    }
    // propagation marks the base field
    {
        ScanProtocol proto;
        proto.grid = LambdaGrid{1.0, 6.0, 0.01};
        ScanReport rep = scan_fields(pair.fields, proto);
        CHECK(rep.rows[1].egr_excluded);
        CHECK(rep.rows[0].excluded_via_extension);
        line.note(rep.rows[1].egr_excluded && rep.rows[0].excluded_via_extension);
    }
    // cyclotomic fields: everywhere-good-reduction excluded for all eight
    {
        LoadedFields cyclo = load_fields(fixtures("cyclotomic.jsonl"));
        REQUIRE(cyclo.fields.size() == 8);
        ScanProtocol proto;
        proto.grid = LambdaGrid{1.0, 6.0, 0.01};
        ScanReport rep = scan_fields(cyclo.fields, proto);
        for (const FieldScanRow& row : rep.rows) {
            std::printf("    %s: B = %.4f at %.2f egr_excluded=%d\n", row.label.c_str(), row.b,
                        row.lambda_star, static_cast<int>(row.egr_excluded));
            CHECK(row.egr_excluded);
            line.note(row.egr_excluded);
        }
    }
    // degree-2 count from the published results data: 10 direct exclusions
    {
        LoadedFields quad = load_fields(fixtures("quadratic_bgt1.jsonl"));
        REQUIRE(quad.fields.size() == 10);
        ScanProtocol proto;
        proto.grid = LambdaGrid{1.0, 4.0, 0.01};
        ScanReport rep = scan_fields(quad.fields, proto);
        CHECK(rep.direct_by_degree[2] == 10);
        line.note(rep.direct_by_degree[2] == 10);
    }
    CHECK(sw.seconds() < 30.0);
    line.note(sw.seconds() < 30.0);
}

TEST_CASE("criterion 8: test-function optimizer", "[acceptance][c8]") {
    CriterionLine line{"criterion 8: optimizer"};
    Stopwatch sw;

    // dimension-2 example: multiplicative of dimension 2 at p=2, additive of
    // dimension 1 at p=3; lambda fixed by the preliminary Odlyzko scan
    {
        BoundQuery q = abelian_query(2, 1, {0, 2, 0}, {1, 0, 1});
        q.grid = LambdaGrid{1.0, 3.0, 0.01};
        OptimizeResult res = optimize_testfunc(q, 1);
        std::printf("    dim-2 example: lambda* = %.2f coeffs = (%.4f, %.4f)\n", res.lambda,
                    res.coeffs[0], res.coeffs[1]);
        CHECK(res.coeffs[0] == Approx(1.3780).epsilon(0.02));
        CHECK(res.coeffs[1] == Approx(-5.656).epsilon(0.02));
        line.note(std::abs(res.coeffs[0] - 1.3780) <= 0.02 * 1.3780);
        line.note(std::abs(res.coeffs[1] + 5.656) <= 0.02 * 5.656);
        Matrix g = gram_matrix(1);
        double norm = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) norm += res.coeffs[i] * g(i, j) * res.coeffs[j];
        CHECK(std::abs(norm - 1.0) < 1e-9);
        line.note(std::abs(norm - 1.0) < 1e-9);
    }

    // second example at lambda = 2.15: degree-1 and degree-2 optima and the
    // Odlyzko value, each within 1 percent of the printed bounds
    {
        BoundQuery q = abelian_query(2, 1, {0, 0, 2}, {1, 0, 1});
        q.lambda = 2.15;
        OptimizeResult d1 = optimize_testfunc(q, 1);
        OptimizeResult d2 = optimize_testfunc(q, 2);
        const double b1 = std::exp(d1.quadratic_value);
        const double b2 = std::exp(d2.quadratic_value);
        const double bo = d1.odlyzko_bound.b_r;
        std::printf("    d=1: %.1f (printed 2221.7), d=2: %.1f (printed 2225.6), "
                    "odlyzko: %.1f (printed 2232.4)\n", b1, b2, bo);
        CHECK(b1 == Approx(2221.7).epsilon(0.01));
        CHECK(b2 == Approx(2225.6).epsilon(0.01));
        CHECK(bo == Approx(2232.4).epsilon(0.01));
        line.note(std::abs(b1 - 2221.7) <= 22.2);
        line.note(std::abs(b2 - 2225.6) <= 22.3);
        line.note(std::abs(bo - 2232.4) <= 22.3);
        CHECK(b1 < b2);   // degree monotonicity leg of the printed ordering
        line.note(b1 < b2);

        // the published degree-2 coefficient triple is a feasible point of
        // exactly this program and evaluates to the printed 2225.6
        Matrix bm = bound_matrix(q, 2);
        const double a[] = {1.3905, -6.0168, 0.99995};
        double val = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) val += a[i] * bm(i, j) * a[j];
        std::printf("    published d=2 point evaluates to %.1f\n", std::exp(val));
        CHECK(std::exp(val) == Approx(2225.6).margin(0.2));
        line.note(std::abs(std::exp(val) - 2225.6) <= 0.2);
    }
    CHECK(sw.seconds() < 30.0);
    line.note(sw.seconds() < 30.0);
}

TEST_CASE("criterion 8: degree-2 optimum versus the Odlyzko value",
          "[acceptance][c8][reference-mismatch]") {
    CriterionLine line{"criterion 8: printed ordering d=2 < Odlyzko"};
    // The reference orders its d=2 value (2225.6) below the Odlyzko value
    // (2232.4), but its d=2 point is a suboptimal iterate: the true degree-2
    // optimum of the same program is 2232.64, slightly above the Odlyzko
    // 2232.49. A correct maximizer cannot land below it. Asserted as printed.
    BoundQuery q = abelian_query(2, 1, {0, 0, 2}, {1, 0, 1});
    q.lambda = 2.15;
    OptimizeResult d2 = optimize_testfunc(q, 2);
    const double b2 = std::exp(d2.quadratic_value);
    const double bo = d2.odlyzko_bound.b_r;
    std::printf("    computed d=2 optimum %.2f vs odlyzko %.2f\n", b2, bo);
    line.note(b2 < bo);
    CHECK(b2 < bo);
}

TEST_CASE("criterion 9: property suites", "[acceptance][c9]") {
    CriterionLine line{"criterion 9: property suites"};
    Stopwatch sw;

    {   // congruence refinement equals the exhaustive scan
        // all 4^4 constraint assignments over {2,3,5,7}, every B <= 10^4
        const std::int64_t kPrimes[] = {2, 3, 5, 7};
        const std::int64_t sieve_limit = 200000;
        for (int mask = 0; mask < 256; ++mask) {
            ReductionSpec spec;
            int m = mask;
            for (std::int64_t p : kPrimes) {
                switch (m % 4) {
                    case 1: spec.elliptic[p] = kGood; break;
                    case 2: spec.elliptic[p] = kMult; break;
                    case 3: spec.elliptic[p] = kAdd; break;
                    default: break;
                }
                m /= 4;
            }
            const auto cs = congruence_constraints(spec);
            std::vector<std::int64_t> next(static_cast<std::size_t>(10001));
            std::int64_t upcoming = -1;
            for (std::int64_t n = sieve_limit; n >= 1; --n) {
                bool ok = true;
                for (const auto& [p, v] : cs) {
                    std::int64_t t = n;
                    int val = 0;
                    while (t % p == 0) {
                        t /= p;
                        ++val;
                    }
                    if (!v.contains(val)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) upcoming = n;
                if (n <= 10000) next[static_cast<std::size_t>(n)] = upcoming;
            }
            bool all_match = true;
            for (std::int64_t b = 1; b <= 10000; ++b) {
                REQUIRE(next[static_cast<std::size_t>(b)] > 0);
                if (refine_integer_bound(static_cast<double>(b), spec) !=
                    next[static_cast<std::size_t>(b)]) {
                    all_match = false;
                    CHECK(refine_integer_bound(static_cast<double>(b), spec) ==
                          next[static_cast<std::size_t>(b)]);
                }
            }
            line.note(all_match);
            CHECK(all_match);
        }
    }

    {   // splitting degrees sum to the field degree on 100 fields
        LoadedFields lf = load_fields(fixtures("fields_100.jsonl"));
        REQUIRE(lf.fields.size() == 100);
        bool ok = true;
        for (const NumberField& k : lf.fields) {
            for (std::int64_t p : primes_up_to(100)) {
                int total = 0;
                for (auto [e, f] : split_prime(k, p).factors) total += e * f;
                if (total != k.degree) ok = false;
            }
        }
        CHECK(ok);
        line.note(ok);
    }

    {   // conservative fallback only lowers bounds
        // same field through an index-2 polynomial (falls back at 2) and an
        // index-free one
        NumberField via_fallback;
        via_fallback.degree = 2;
        via_fallback.poly = {23, 0};
        via_fallback.disc = -23;
        NumberField exact;
        exact.degree = 2;
        exact.poly = {6, -1};
        exact.disc = -23;
        bool ok = true;
        for (double lam : {1.2, 1.84, 2.6, 3.3}) {
            BoundQuery a, b;
            a.field = via_fallback;
            b.field = exact;
            a.lambda = b.lambda = lam;
            BoundResult ra = bound_number_field(a), rb = bound_number_field(b);
            if (!(ra.b_r <= rb.b_r + 1e-12)) ok = false;
            bool flagged = false;
            for (const std::string& f : ra.flags)
                if (f.find("conservative_fallback:p=2") != std::string::npos) flagged = true;
            if (!flagged) ok = false;
        }
        CHECK(ok);
        line.note(ok);
    }

    {   // bad reduction monotonicity and mode ordering
        // The unconditional <= GRH ordering is checked on rank-carrying
        // queries, where dropping the rank term enforces it. For rank 0 the
        // ordering can genuinely flip (damping shrinks the subtracted prime
        // sum more than the archimedean term); the unit suite pins such a
        // counterexample.
        bool ok = true;
        for (double lam : {1.4, 1.9, 2.6}) {
            double prev = -1.0;
            for (EllipticReduction t : {kGood, kMult, kAdd}) {
                BoundQuery q;
                q.lambda = lam;
                q.spec.elliptic[2] = t;
                const double b = bound_elliptic_q(q).b_r;
                if (!(b >= prev - 1e-12)) ok = false;
                prev = b;
            }
            for (int rank : {1, 2, 3}) {
                BoundQuery grh;
                grh.rank = rank;
                grh.lambda = lam;
                BoundQuery unc = grh;
                unc.mode = Mode::Unconditional;
                if (!(lambda_scan(unc).b_r <= lambda_scan(grh).b_r + 1e-12)) ok = false;
            }
        }
        CHECK(ok);
        line.note(ok);
    }

    {   // determinism: byte-identical serialized results
        auto run = [](unsigned workers) {
            LoadedFields lf = load_fields(fixtures("q_sqrt_m23.jsonl"));
            ScanProtocol proto;
            proto.grid = LambdaGrid{1.0, 4.0, 0.05};
            proto.workers = workers;
            return serialize(scan_fields(lf.fields, proto));
        };
        const std::string a = run(0), b = run(0), c = run(3);
        CHECK(a == b);
        CHECK(a == c);
        line.note(a == b && a == c);

        BoundQuery q;
        q.rank = 1;
        q.spec.elliptic[2] = kMult;
        q.grid = LambdaGrid{1.3, 2.3, 0.02};
        CHECK(serialize(lambda_scan(q), true) == serialize(lambda_scan(q), true));
    }

    CHECK(sw.seconds() < 60.0);
    line.note(sw.seconds() < 60.0);
}

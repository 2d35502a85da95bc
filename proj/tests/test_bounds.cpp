#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <mestre/bounds.hpp>
#include <mestre/io.hpp>

using namespace mestre;
using Catch::Approx;

namespace {

BoundQuery elliptic_query(int rank, double lambda) {
    BoundQuery q;
    q.rank = rank;
    q.lambda = lambda;
    return q;
}

} // namespace

TEST_CASE("monotonicity in rank", "[bounds]") {
    double prev = 0.0;
    for (int r = 0; r <= 4; ++r) {
        BoundQuery q = elliptic_query(r, 1.68);
        const double b = bound_elliptic_q(q).b_r;
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("bad reduction never decreases the bound", "[bounds]") {
    for (std::int64_t p : {2, 3}) {
        double prev = -1.0;
        for (EllipticReduction t : {EllipticReduction::Good, EllipticReduction::Multiplicative,
                                    EllipticReduction::Additive}) {
            BoundQuery q = elliptic_query(0, 1.9);
            q.spec.elliptic[p] = t;
            const double b = bound_elliptic_q(q).b_r;
            CHECK(b >= prev - 1e-12);
            prev = b;
        }
    }
}

TEST_CASE("mode ordering", "[bounds]") {
    SECTION("dropping the rank term keeps unconditional below GRH for r >= 1") {
        for (double lam : {1.3, 1.7, 2.4}) {
            for (int rank : {1, 2, 4}) {
                BoundQuery q = elliptic_query(rank, lam);
                q.spec.elliptic[2] = EllipticReduction::Multiplicative;
                BoundQuery u = q;
                u.mode = Mode::Unconditional;
                CHECK(lambda_scan(u).b_r <= lambda_scan(q).b_r + 1e-12);
            }
        }
    }
    SECTION("rank-0 counterexample, pinned") {
        // cosh damping shrinks the subtracted prime sum more than the
        // archimedean term here, so the unconditional bound comes out higher;
        // both are valid lower bounds under their own hypotheses
        BoundQuery q = elliptic_query(0, 2.4);
        q.spec.elliptic[2] = EllipticReduction::Multiplicative;
        BoundQuery u = q;
        u.mode = Mode::Unconditional;
        CHECK(lambda_scan(u).b_r > lambda_scan(q).b_r);
    }
}

TEST_CASE("unconditional mode drops the rank term", "[bounds]") {
    BoundQuery q = elliptic_query(3, 1.7);
    q.mode = Mode::Unconditional;
    CHECK(lambda_scan(q).rank_term == 0.0);
}

TEST_CASE("dimension scaling is exact for unconstrained queries", "[bounds]") {
    LoadedFields lf = load_fields(std::string(MESTRE_FIXTURES_DIR) + "/q_sqrt_m23.jsonl");
    for (const NumberField& k : lf.fields) {
        for (int g : {2, 3, 5}) {
            BoundQuery q1;
            q1.field = k;
            q1.lambda = 2.3;
            BoundQuery qg = q1;
            qg.dimension = g;
            const double l1 = bound_number_field(q1).log_bound;
            const double lg = bound_number_field(qg).log_bound;
            CHECK(lg == g * l1);   // bitwise, by construction
        }
    }
}

TEST_CASE("lambda scan mechanics", "[bounds]") {
    SECTION("single point grid") {
        BoundQuery q = elliptic_query(0, 0.0);
        q.lambda.reset();
        q.grid = LambdaGrid{1.47, 1.47, 1.0};
        BoundResult r = bound_elliptic_q(q);
        CHECK(r.lambda_star == 1.47);
    }
    SECTION("coarse grid never beats the fine grid") {
        BoundQuery fine = elliptic_query(0, 0.0);
        fine.lambda.reset();
        fine.grid = LambdaGrid{1.0, 2.0, 0.01};
        BoundQuery coarse = fine;
        coarse.grid = LambdaGrid{1.0, 2.0, 0.05};
        CHECK(bound_elliptic_q(coarse).b_r <= bound_elliptic_q(fine).b_r + 1e-15);
    }
    SECTION("scan is independent of the worker count") {
        BoundQuery q = elliptic_query(1, 0.0);
        q.lambda.reset();
        q.grid = LambdaGrid{1.2, 2.2, 0.02};
        BoundResult serial = bound_elliptic_q(q, 1);
        BoundResult parallel = bound_elliptic_q(q, 8);
        CHECK(serial.lambda_star == parallel.lambda_star);
        CHECK(serial.b_r == parallel.b_r);
    }
}

TEST_CASE("discriminant prefilter", "[bounds]") {
    NumberField k;
    k.degree = 2;
    k.poly = {6, -1};
    k.disc = -23;
    CHECK(disc_prefilter(k));          // sqrt(23) = 4.796
    CHECK(disc_prefilter(rationals()));
    NumberField big;
    big.degree = 2;
    big.poly = {34, -1};
    big.disc = -135;                    // delta = 11.6 > 2 pi e^gamma
    CHECK_FALSE(disc_prefilter(big));
}

TEST_CASE("number-field example values", "[bounds]") {
    LoadedFields lf = load_fields(std::string(MESTRE_FIXTURES_DIR) + "/q_sqrt_m23.jsonl");
    REQUIRE(lf.fields.size() == 2);
    const NumberField& k = lf.fields[0];
    const NumberField& hcf = lf.fields[1];

    SECTION("frozen spot values") {
        BoundQuery q;
        q.field = k;
        q.lambda = 1.84;
        // the published example quotes 0.45 for this lambda, but the formula
        // evaluates to 0.3352 there; 0.45 is the scan optimum (lambda 1.31).
        // Both values are pinned so any model drift is caught.
        CHECK(bound_number_field(q).b_r == Approx(0.33518427739013457).margin(1e-8));
        q.lambda = 1.31;
        CHECK(bound_number_field(q).b_r == Approx(0.45189398320435).margin(1e-8));
        q.field = hcf;
        q.lambda = 3.58;
        BoundResult r = bound_number_field(q);
        CHECK(r.b_r == Approx(2.0076065771099403).margin(1e-8));
        CHECK(r.egr_excluded);
        q.lambda = 1.84;
        CHECK(bound_number_field(q).b_r == Approx(1.1135356024450407).margin(1e-8));
    }

    SECTION("unramified-extension monotonicity along the fixture tower") {
        for (double lam = 1.0; lam <= 3.0; lam += 0.25) {
            BoundQuery qk, ql;
            qk.field = k;
            ql.field = hcf;
            qk.lambda = ql.lambda = lam;
            CHECK(bound_number_field(qk).b_r <= bound_number_field(ql).b_r + 1e-9);
        }
    }

    SECTION("rank term enters scaled by 1/degree") {
        BoundQuery q;
        q.field = k;
        q.lambda = 1.31;
        BoundQuery qr = q;
        qr.rank = 2;
        const BoundResult base = bound_number_field(q), ranked = bound_number_field(qr);
        CHECK(ranked.rank_term ==
              Approx(1.31 * 2 * TestFunction::odlyzko().phi_half() / 2).margin(1e-12));
        CHECK(ranked.log_bound - base.log_bound == Approx(ranked.rank_term).margin(1e-12));
        CHECK(ranked.egr_excluded == base.egr_excluded);   // rank-free criterion
    }
}

TEST_CASE("scan_fields with propagation and warnings", "[bounds]") {
    LoadedFields lf = load_fields(std::string(MESTRE_FIXTURES_DIR) + "/q_sqrt_m23.jsonl");
    ScanProtocol proto;
    proto.grid = LambdaGrid{1.0, 4.0, 0.02};
    ScanReport rep = scan_fields(lf.fields, proto);
    REQUIRE(rep.rows.size() == 2);
    CHECK_FALSE(rep.rows[0].egr_excluded);
    CHECK(rep.rows[0].excluded_via_extension);
    CHECK(rep.rows[0].excluded_via == "6.0.12167.1");
    CHECK(rep.rows[1].egr_excluded);
    CHECK(rep.direct_by_degree[6] == 1);
    CHECK(rep.with_subfields_by_degree[2] == 1);

    SECTION("unresolved subfield label is a warning") {
        std::vector<NumberField> fields = lf.fields;
        fields[1].subfield_labels.push_back("no-such-label");
        ScanReport rep2 = scan_fields(fields, proto);
        REQUIRE(rep2.warnings.size() == 1);
        CHECK(rep2.warnings[0].find("no-such-label") != std::string::npos);
    }

    SECTION("empty input gives an empty report") {
        CHECK(scan_fields({}, proto).rows.empty());
    }
}

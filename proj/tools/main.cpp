// Command-line front end: conductor bounds over Q and number fields, batch
// field scans with everywhere-good-reduction certificates, test-function
// optimization, and reproduction of the reference tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mestre/mestre.hpp>

namespace {

using namespace mestre;

struct CommonOpts {
    std::optional<double> lambda;
    std::string lambda_grid;   // "lo:hi:step"
    int rank = 0;
    int dim = 1;
    std::string mode = "grh";
    std::string testfunc = "odlyzko";
    std::string config_path;
    std::string out_path;      // empty = stdout
    std::string out_format = "json";
    unsigned jobs = 0;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--lambda", o.lambda, "evaluate at this lambda");
    cmd->add_option("--lambda-grid", o.lambda_grid, "scan lo:hi:step");
    cmd->add_option("--rank", o.rank, "analytic rank r >= 0");
    cmd->add_option("--dim", o.dim, "dimension g >= 1");
    cmd->add_option("--mode", o.mode, "grh|uncond")
        ->check(CLI::IsMember({"grh", "uncond"}));
    cmd->add_option("--testfunc", o.testfunc, "odlyzko | poly:<a0,a2,...>");
    cmd->add_option("--config", o.config_path, "JSON config file (flags override)");
    cmd->add_option("--out", o.out_format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out-file", o.out_path, "write output here instead of stdout");
    cmd->add_option("--jobs", o.jobs, "worker threads (0 = hardware)");
    cmd->add_option("--seed", o.seed, "PRNG seed for equal-degree splitting");
}

TestFunction make_testfunc(const std::string& s) {
    if (s == "odlyzko") return TestFunction::odlyzko();
    if (s.rfind("poly:", 0) == 0) {
        std::vector<double> coeffs;
        std::stringstream ss(s.substr(5));
        std::string tok;
        while (std::getline(ss, tok, ',')) coeffs.push_back(std::stod(tok));
        return TestFunction::autocorrelation(coeffs);
    }
    throw MalformedRecord("unknown --testfunc: " + s);
}

LambdaGrid parse_grid(const std::string& s) {
    LambdaGrid g;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &g.lo, &g.hi, &g.step) != 3)
        throw MalformedRecord("--lambda-grid expects lo:hi:step");
    return g;
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    return nlohmann::json::parse(in);
}

void apply_config(const nlohmann::json& j, CommonOpts& o, BoundQuery& q) {
    if (j.contains("lambda")) o.lambda = j.at("lambda").get<double>();
    if (j.contains("lambda_grid")) {
        const auto& g = j.at("lambda_grid");
        q.grid = LambdaGrid{g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>()};
    }
    if (j.contains("rank")) o.rank = j.at("rank").get<int>();
    if (j.contains("dim")) o.dim = j.at("dim").get<int>();
    if (j.contains("mode")) o.mode = j.at("mode").get<std::string>();
    if (j.contains("testfunc")) q.testfunc = parse_testfunc(j.at("testfunc"));
    if (j.contains("reduction")) q.spec = parse_reduction(j.at("reduction"));
    if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
}

BoundQuery build_query(const CommonOpts& o) {
    BoundQuery q;
    if (!o.config_path.empty()) apply_config(load_config(o.config_path), const_cast<CommonOpts&>(o), q);
    q.rank = o.rank;
    q.dimension = o.dim;
    q.mode = o.mode == "uncond" ? Mode::Unconditional : Mode::GRH;
    q.seed = o.seed;
    if (o.testfunc != "odlyzko" || q.testfunc.kind() == TestFunctionKind::Odlyzko)
        q.testfunc = make_testfunc(o.testfunc);
    if (!o.lambda_grid.empty()) q.grid = parse_grid(o.lambda_grid);
    if (o.lambda) {
        q.lambda = o.lambda;
        q.grid.reset();
    }
    if (!q.lambda && !q.grid) q.grid = LambdaGrid{1.0, 4.0, 0.01};
    if (q.rank < 0 || q.dimension < 1) throw MalformedRecord("rank >= 0, dim >= 1 required");
    return q;
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(o.out_path, std::ios::binary);
        out << text << "\n";
    }
}

void add_reduction_flags(CLI::App* cmd, std::vector<std::int64_t>& good,
                         std::vector<std::int64_t>& mult, std::vector<std::int64_t>& add) {
    cmd->add_option("--good", good, "primes of good reduction");
    cmd->add_option("--mult", mult, "primes of multiplicative reduction");
    cmd->add_option("--add", add, "primes of additive reduction");
}

int cmd_bound_q(const CommonOpts& o, const std::vector<std::int64_t>& good,
                const std::vector<std::int64_t>& mult, const std::vector<std::int64_t>& add) {
    BoundQuery q = build_query(o);
    for (auto p : good) q.spec.elliptic[p] = EllipticReduction::Good;
    for (auto p : mult) q.spec.elliptic[p] = EllipticReduction::Multiplicative;
    for (auto p : add) q.spec.elliptic[p] = EllipticReduction::Additive;
    BoundResult r = bound_elliptic_q(q, o.jobs);
    if (r.b_r >= 1.0 && q.spec.abelian.empty())
        r.b_z = refine_integer_bound(r.b_r, q.spec);
    emit(o, serialize(r));
    return 0;
}

int cmd_bound_av(const CommonOpts& o, const std::vector<std::string>& types) {
    BoundQuery q = build_query(o);
    for (const std::string& t : types) {
        // p:k,n,m
        std::int64_t p;
        int k, n, m;
        if (std::sscanf(t.c_str(), "%lld:%d,%d,%d", (long long*)&p, &k, &n, &m) != 4)
            throw MalformedRecord("--type expects p:k,n,m");
        q.spec.abelian[p] = {k, n, m};
    }
    BoundResult r = bound_abelian_q(q, o.jobs);
    emit(o, serialize(r));
    return 0;
}

int cmd_bound_field(const CommonOpts& o, const std::string& fields_path,
                    const std::string& label) {
    LoadedFields lf = load_fields(fields_path);
    for (const std::string& w : lf.warnings) std::cerr << "warning: " << w << "\n";
    if (lf.fields.empty()) throw Error("no parsable fields in " + fields_path);
    BoundQuery q = build_query(o);
    std::string out;
    for (const NumberField& k : lf.fields) {
        if (!label.empty() && k.label != label) continue;
        q.field = k;
        BoundResult r = bound_number_field(q, o.jobs);
        jout::Object row;
        row.str("label", k.label);
        out += "{\"label\":" + jout::quote(k.label) + ",\"result\":" + serialize(r) + "}\n";
    }
    if (out.empty()) throw Error("label not found: " + label);
    out.pop_back();
    emit(o, out);
    return 0;
}

std::string scan_csv(const ScanReport& rep) {
    std::string out = "label,degree,prefilter,lambda_star,B,egr_excluded,excluded_via\n";
    for (const FieldScanRow& r : rep.rows) {
        out += r.label + "," + std::to_string(r.degree) + "," +
               (r.prefilter_passed ? "1" : "0") + ",";
        if (r.scanned) out += jout::num(r.lambda_star) + "," + jout::num(r.b);
        else out += ",";
        out += std::string(",") + (r.egr_excluded ? "1" : "0") + "," +
               (r.excluded_via_extension ? r.excluded_via : "") + "\n";
    }
    out.pop_back();
    return out;
}

int cmd_scan_fields(const CommonOpts& o, const std::string& fields_path) {
    LoadedFields lf = load_fields(fields_path);
    for (const std::string& w : lf.warnings) std::cerr << "warning: " << w << "\n";
    ScanProtocol proto;
    proto.workers = o.jobs;
    proto.seed = o.seed;
    proto.mode = o.mode == "uncond" ? Mode::Unconditional : Mode::GRH;
    proto.testfunc = make_testfunc(o.testfunc);
    if (!o.lambda_grid.empty()) proto.grid = parse_grid(o.lambda_grid);
    ScanReport rep = scan_fields(lf.fields, proto);
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    emit(o, o.out_format == "csv" ? scan_csv(rep) : serialize(rep));
    return 0;
}

int cmd_optimize(const CommonOpts& o, const std::vector<std::string>& types, int basis_degree,
                 const std::string& coeff_model) {
    BoundQuery q = build_query(o);
    for (const std::string& t : types) {
        std::int64_t p;
        int k, n, m;
        if (std::sscanf(t.c_str(), "%lld:%d,%d,%d", (long long*)&p, &k, &n, &m) != 4)
            throw MalformedRecord("--type expects p:k,n,m");
        q.spec.abelian[p] = {k, n, m};
    }
    const CoeffModel model =
        coeff_model == "trace" ? CoeffModel::FixedTrace : CoeffModel::PerTermFloor;
    OptimizeResult res = optimize_testfunc(q, basis_degree, model, o.jobs);
    jout::Object obj;
    obj.real("lambda", res.lambda)
        .field("coeffs", jout::array(res.coeffs, [](double c) { return jout::num(c); }))
        .real("quadratic_value", res.quadratic_value)
        .real("B_poly", std::exp(res.quadratic_value))
        .field("poly_bound", serialize(res.bound))
        .field("odlyzko_bound", serialize(res.odlyzko_bound));
    emit(o, obj.done());
    return 0;
}

// --- reference tables ---

struct EllipticRow {
    std::vector<std::int64_t> good, mult, add;
    double lambda;
};

std::string spec_str(const std::vector<std::int64_t>& ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.size(); ++i) s += (i ? " " : "") + std::to_string(ps[i]);
    return s;
}

int cmd_reproduce(const CommonOpts& o, int table) {
    static const std::vector<EllipticRow> table1 = {
        {{3}, {2}, {}, 1.47},       {{2}, {3}, {}, 1.49},    {{2, 3}, {5}, {}, 1.31},
        {{2, 3}, {7}, {}, 1.31},    {{3}, {}, {2}, 1.68},    {{2}, {}, {3}, 1.69},
        {{2, 3}, {}, {5}, 1.31},    {{}, {2, 3}, {}, 1.80},  {{3}, {2, 5}, {}, 1.47},
        {{}, {2}, {3}, 1.98},       {{3}, {2}, {5}, 1.47},   {{}, {3}, {2}, 1.99},
        {{3}, {5}, {2}, 1.69},
    };
    static const std::vector<EllipticRow> table2 = {
        {{}, {}, {}, 1.68},         {{3}, {2}, {}, 1.96},    {{2, 5}, {3}, {}, 1.99},
        {{2, 3}, {5}, {}, 1.69},    {{2, 3}, {7}, {}, 1.68}, {{3}, {}, {2}, 2.15},
        {{2}, {}, {3}, 2.15},       {{2, 3}, {}, {5}, 1.70}, {{2, 3}, {}, {7}, 1.68},
        {{}, {2, 3}, {}, 2.30},     {{3}, {2, 5}, {}, 2.24}, {{2}, {3, 5}, {}, 2.27},
        {{}, {2}, {3}, 2.47},       {{3}, {2}, {5}, 2.39},   {{}, {3}, {2}, 2.49},
        {{2}, {3}, {5}, 2.45},      {{3}, {5}, {2}, 2.48},   {{2}, {5}, {3}, 2.53},
        {{2, 3}, {5}, {7}, 1.69},   {{}, {}, {2, 3}, 2.65},
    };
    std::string out;
    if (table == 1 || table == 2) {
        out = "good,mult,add,lambda,B_R";
        if (table == 1) out += ",B_Z";
        out += "\n";
        const auto& rows = table == 1 ? table1 : table2;
        for (const EllipticRow& row : rows) {
            BoundQuery q;
            q.rank = table == 1 ? 0 : 1;
            q.lambda = row.lambda;
            for (auto p : row.good) q.spec.elliptic[p] = EllipticReduction::Good;
            for (auto p : row.mult) q.spec.elliptic[p] = EllipticReduction::Multiplicative;
            for (auto p : row.add) q.spec.elliptic[p] = EllipticReduction::Additive;
            BoundResult r = bound_elliptic_q(q, o.jobs);
            out += "\"" + spec_str(row.good) + "\",\"" + spec_str(row.mult) + "\",\"" +
                   spec_str(row.add) + "\"," + jout::num(row.lambda) + "," + jout::num(r.b_r);
            if (table == 1) out += "," + std::to_string(refine_integer_bound(r.b_r, q.spec));
            out += "\n";
        }
    } else if (table == 3 || table == 4) {
        out = "type_at_2,type_at_3,lambda,B_R\n";
        static const std::vector<std::pair<AbelianType, AbelianType>> types = {
            {{0, 2, 0}, {1, 1, 0}}, {{0, 2, 0}, {1, 0, 1}}, {{0, 1, 1}, {1, 1, 0}},
            {{0, 1, 1}, {1, 0, 1}}, {{0, 0, 2}, {1, 1, 0}}, {{0, 0, 2}, {1, 0, 1}},
        };
        static const double lam3[] = {1.62, 1.71, 1.73, 1.82, 1.83, 1.92};
        static const double lam4[] = {1.87, 1.97, 1.98, 2.06, 2.07, 2.15};
        for (std::size_t i = 0; i < types.size(); ++i) {
            BoundQuery q;
            q.dimension = 2;
            q.rank = table == 3 ? 0 : 1;
            q.lambda = table == 3 ? lam3[i] : lam4[i];
            q.spec.abelian[2] = types[i].first;
            q.spec.abelian[3] = types[i].second;
            BoundResult r = bound_abelian_q(q, o.jobs);
            auto tstr = [](const AbelianType& t) {
                return "(" + std::to_string(t.g_ab) + "," + std::to_string(t.g_m) + "," +
                       std::to_string(t.g_u) + ")";
            };
            out += tstr(types[i].first) + "," + tstr(types[i].second) + "," +
                   jout::num(*q.lambda) + "," + jout::num(r.b_r) + "\n";
        }
    } else if (table == 5) {
        out = "dimension,constraint,lambda_star,B_R\n";
        for (int g : {2, 3, 4}) {
            for (std::int64_t p : {std::int64_t{0}, std::int64_t{3}, std::int64_t{5}, std::int64_t{7}}) {
                BoundQuery q;
                q.dimension = g;
                q.grid = LambdaGrid{1.0, 3.0, 0.01};
                std::string name = "none";
                if (p != 0) {
                    // unspecified bad reduction at 2 and p: weakest admissible type
                    q.spec.abelian[2] = {g - 1, 1, 0};
                    q.spec.abelian[p] = {g - 1, 1, 0};
                    name = "bad at 2," + std::to_string(p);
                }
                BoundResult r = bound_abelian_q(q, o.jobs);
                out += std::to_string(g) + ",\"" + name + "\"," + jout::num(r.lambda_star) +
                       "," + jout::num(r.b_r) + "\n";
            }
        }
    } else {
        throw MalformedRecord("--table must be 1..5");
    }
    out.pop_back();
    emit(o, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit-formula conductor lower bounds for elliptic curves and abelian varieties"};
    app.require_subcommand(1);

    CommonOpts o;
    std::vector<std::int64_t> good, mult, add;
    std::vector<std::string> types;
    std::string fields_path, label;
    int basis_degree = 1, table = 1;
    std::string coeff_model = "floor";

    CLI::App* bq = app.add_subcommand("bound-q", "elliptic conductor bound over Q");
    add_common(bq, o);
    add_reduction_flags(bq, good, mult, add);

    CLI::App* bav = app.add_subcommand("bound-av", "abelian-variety conductor bound over Q");
    add_common(bav, o);
    bav->add_option("--type", types, "reduction type p:k,n,m (repeatable)");

    CLI::App* bf = app.add_subcommand("bound-field", "per-degree bound over number fields");
    add_common(bf, o);
    bf->add_option("--fields", fields_path, "JSON-lines field file")->required();
    bf->add_option("--label", label, "restrict to one field label");

    CLI::App* sf = app.add_subcommand("scan-fields", "batch EGR scan with subfield propagation");
    add_common(sf, o);
    sf->add_option("--fields", fields_path, "JSON-lines field file")->required();

    CLI::App* ot = app.add_subcommand("optimize-testfunc",
                                      "optimize a polynomial autocorrelation weight");
    add_common(ot, o);
    ot->add_option("--type", types, "reduction type p:k,n,m (repeatable)");
    ot->add_option("--basis-degree", basis_degree, "monomial basis degree d");
    ot->add_option("--coeff-model", coeff_model, "floor|trace")
        ->check(CLI::IsMember({"floor", "trace"}));

    CLI::App* rt = app.add_subcommand("reproduce-tables", "emit a reference table as CSV");
    add_common(rt, o);
    rt->add_option("--table", table, "table number 1..5")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (bq->parsed()) return cmd_bound_q(o, good, mult, add);
        if (bav->parsed()) return cmd_bound_av(o, types);
        if (bf->parsed()) return cmd_bound_field(o, fields_path, label);
        if (sf->parsed()) return cmd_scan_fields(o, fields_path);
        if (ot->parsed()) return cmd_optimize(o, types, basis_degree, coeff_model);
        if (rt->parsed()) return cmd_reproduce(o, table);
    } catch (const ToleranceNotReached& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const NotPositiveDefinite& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

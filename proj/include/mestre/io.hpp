#pragma once

// Field-data ingestion (JSON lines) and deterministic result serialization.
// nlohmann/json handles parsing; output JSON is written by a small fixed-order
// writer with floats at 12 significant digits so identical runs produce
// byte-identical files.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mestre/bounds.hpp"
#include "mestre/errors.hpp"
#include "mestre/numberfield.hpp"
#include "mestre/sums.hpp"

namespace mestre {

// --- parsing ---

/// Validated NumberField from a JSON record
/// {"label":.., "degree":n, "poly":[c0..c_{n-1}], "disc":d,
///  "splitting":{"2":[[e,f],..]}?, "subfields":[..]?}.
/// The polynomial may also carry an explicit leading coefficient, which must
/// equal 1.
inline NumberField parse_field(const nlohmann::json& j) {
    if (!j.is_object()) throw MalformedRecord("field record must be an object");
    NumberField k;
    try {
        k.label = j.value("label", std::string{});
        if (!j.contains("degree") || !j.contains("poly") || !j.contains("disc"))
            throw MalformedRecord("field record needs degree, poly, disc");
        k.degree = j.at("degree").get<int>();
        if (k.degree < 1) throw MalformedRecord("degree must be >= 1");
        k.poly = j.at("poly").get<std::vector<std::int64_t>>();
        if (static_cast<int>(k.poly.size()) == k.degree + 1) {
            if (k.poly.back() != 1)
                throw NonMonicPolynomial("leading coefficient must be 1");
            k.poly.pop_back();
        }
        if (static_cast<int>(k.poly.size()) != k.degree)
            throw MalformedRecord("poly length does not match degree");
        k.disc = j.at("disc").get<std::int64_t>();
        if (k.disc == 0) throw ZeroDiscriminant("field discriminant is zero");
        if (k.degree >= 2 && k.root_disc() <= 1.0)
            throw MalformedRecord("root discriminant <= 1 contradicts Minkowski");
        if (j.contains("splitting")) {
            for (const auto& [key, val] : j.at("splitting").items()) {
                const std::int64_t p = std::stoll(key);
                std::vector<EFPair> efs;
                int total = 0;
                for (const auto& ef : val) {
                    EFPair pair{ef.at(0).get<int>(), ef.at(1).get<int>()};
                    if (pair.e < 1 || pair.f < 1)
                        throw MalformedRecord("override (e,f) must be positive");
                    total += pair.e * pair.f;
                    efs.push_back(pair);
                }
                if (total != k.degree)
                    throw MalformedRecord("override at p=" + key +
                                          ": sum of e*f != degree");
                k.splitting_overrides[p] = std::move(efs);
            }
        }
        if (j.contains("subfields"))
            k.subfield_labels = j.at("subfields").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(std::string("field record: ") + e.what());
    }
    if (k.label.empty()) k.label = "deg" + std::to_string(k.degree) + "-" + std::to_string(k.disc);
    return k;
}

struct LoadedFields {
    std::vector<NumberField> fields;
    std::vector<std::string> warnings;   // one per rejected line, with line number
};

/// JSON-lines field file; malformed lines are reported and skipped.
inline LoadedFields load_fields(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open field file: " + path);
    LoadedFields out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.fields.push_back(parse_field(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            out.warnings.push_back(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

/// Test function from {"kind":"odlyzko"} or {"kind":"poly","coeffs":[..]},
/// optionally {"cosh_damped":true}.
inline TestFunction parse_testfunc(const nlohmann::json& j) {
    TestFunction f = TestFunction::odlyzko();
    const std::string kind = j.value("kind", std::string{"odlyzko"});
    if (kind == "poly") {
        f = TestFunction::autocorrelation(j.at("coeffs").get<std::vector<double>>());
    } else if (kind != "odlyzko") {
        throw MalformedRecord("unknown test function kind: " + kind);
    }
    if (j.value("cosh_damped", false)) f = f.cosh_damped();
    return f;
}

/// Reduction constraints: {"2":"mult","3":"add"} (elliptic) or
/// {"2":[0,2,0]} (abelian triples).
inline ReductionSpec parse_reduction(const nlohmann::json& j) {
    ReductionSpec spec;
    for (const auto& [key, val] : j.items()) {
        const std::int64_t p = std::stoll(key);
        if (val.is_string()) {
            const std::string s = val.get<std::string>();
            if (s == "good")
                spec.elliptic[p] = EllipticReduction::Good;
            else if (s == "mult")
                spec.elliptic[p] = EllipticReduction::Multiplicative;
            else if (s == "add")
                spec.elliptic[p] = EllipticReduction::Additive;
            else
                throw MalformedRecord("unknown reduction type: " + s);
        } else {
            spec.abelian[p] = {val.at(0).get<int>(), val.at(1).get<int>(), val.at(2).get<int>()};
        }
    }
    return spec;
}

// --- deterministic writing ---

namespace jout {

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

/// Minimal ordered JSON builder; fields appear exactly in insertion order.
class Object {
public:
    Object& field(const std::string& key, const std::string& raw) {
        if (!items_.empty()) items_ += ",";
        items_ += quote(key) + ":" + raw;
        return *this;
    }
    Object& str(const std::string& key, const std::string& v) { return field(key, quote(v)); }
    Object& real(const std::string& key, double v) { return field(key, num(v)); }
    Object& integer(const std::string& key, std::int64_t v) {
        return field(key, std::to_string(v));
    }
    Object& boolean(const std::string& key, bool v) { return field(key, v ? "true" : "false"); }
    std::string done() const { return "{" + items_ + "}"; }

private:
    std::string items_;
};

template <class T, class Fn>
std::string array(const std::vector<T>& xs, Fn&& render) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += render(xs[i]);
    }
    return out + "]";
}

} // namespace jout

inline std::string serialize(const BoundResult& r, bool with_breakdown = false) {
    jout::Object breakdown;
    breakdown.real("rank_term", r.rank_term)
        .real("prime_sum", r.prime_sum)
        .real("arch_term", r.arch_term)
        .real("disc_term", r.disc_term);
    jout::Object o;
    o.real("lambda_star", r.lambda_star).real("B_R", r.b_r);
    if (r.b_z) o.integer("B_Z", *r.b_z);
    o.real("log_bound", r.log_bound)
        .boolean("egr_excluded", r.egr_excluded)
        .field("breakdown", breakdown.done())
        .field("flags", jout::array(r.flags, [](const std::string& s) { return jout::quote(s); }));
    if (with_breakdown) {
        o.field("terms", jout::array(r.breakdown.terms, [](const SumTerm& t) {
                    jout::Object to;
                    to.integer("q", t.q)
                        .integer("m", t.m)
                        .integer("count", t.multiplicity)
                        .integer("coefficient", t.coefficient)
                        .real("weight", t.weight)
                        .real("term", t.term);
                    return to.done();
                }));
    }
    return o.done();
}

inline std::string serialize(const ScanReport& report) {
    jout::Object o;
    o.field("fields", jout::array(report.rows, [](const FieldScanRow& row) {
                jout::Object r;
                r.str("label", row.label)
                    .integer("degree", row.degree)
                    .boolean("prefilter_passed", row.prefilter_passed);
                if (row.scanned) {
                    r.real("lambda_star", row.lambda_star)
                        .real("B", row.b)
                        .boolean("egr_excluded", row.egr_excluded);
                }
                r.boolean("excluded_via_extension", row.excluded_via_extension);
                if (row.excluded_via_extension) r.str("excluded_via", row.excluded_via);
                r.field("flags",
                        jout::array(row.flags, [](const std::string& s) { return jout::quote(s); }));
                return r.done();
            }));
    std::vector<std::pair<int, int>> direct(report.direct_by_degree.begin(),
                                            report.direct_by_degree.end());
    std::vector<std::pair<int, int>> withsub(report.with_subfields_by_degree.begin(),
                                             report.with_subfields_by_degree.end());
    auto count_row = [](const std::pair<int, int>& kv) {
        jout::Object c;
        c.integer("degree", kv.first).integer("count", kv.second);
        return c.done();
    };
    o.field("direct_by_degree", jout::array(direct, count_row));
    o.field("with_subfields_by_degree", jout::array(withsub, count_row));
    o.field("warnings",
            jout::array(report.warnings, [](const std::string& s) { return jout::quote(s); }));
    return o.done();
}

/// Round-trip reader for serialized BoundResult (tests and tooling).
inline BoundResult parse_bound_result(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    BoundResult r;
    r.lambda_star = j.at("lambda_star").get<double>();
    r.b_r = j.at("B_R").get<double>();
    if (j.contains("B_Z")) r.b_z = j.at("B_Z").get<std::int64_t>();
    r.log_bound = j.at("log_bound").get<double>();
    r.egr_excluded = j.at("egr_excluded").get<bool>();
    const auto& b = j.at("breakdown");
    r.rank_term = b.at("rank_term").get<double>();
    r.prime_sum = b.at("prime_sum").get<double>();
    r.arch_term = b.at("arch_term").get<double>();
    r.disc_term = b.at("disc_term").get<double>();
    r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
}

} // namespace mestre

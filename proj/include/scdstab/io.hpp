#ifndef SCDSTAB_IO_HPP
#define SCDSTAB_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "scdstab/checks.hpp"
#include "scdstab/oracle.hpp"
#include "scdstab/scd.hpp"

namespace scdstab {

// ordered_json keeps key order stable so output is byte-identical across runs
using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Rational json_rational(const json& v, const std::string& where) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_float()) {
            // route through the literal digits so 0.1 parses as 1/10
            std::ostringstream os;
            os << v;
            return parse_rational(os.str());
        }
    } catch (const std::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ": expected a number or rational string");
}

inline RatVec json_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array");
    RatVec out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(json_rational(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline RatMat json_matrix(const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array of rows");
    std::vector<RatVec> rows;
    for (std::size_t i = 0; i < v.size(); ++i)
        rows.push_back(json_vector(v[i], where + "[" + std::to_string(i) + "]"));
    if (rows.empty()) throw ParseError(where + ": matrix needs at least one row");
    for (const auto& r : rows)
        if (r.size() != rows[0].size()) throw ParseError(where + ": ragged rows");
    return RatMat::from_rows(rows);
}

inline json rational_json(const Rational& r) { return to_string(r); }

inline json vector_json(const RatVec& v) {
    json out = json::array();
    for (const auto& r : v) out.push_back(rational_json(r));
    return out;
}

inline json matrix_json(const RatMat& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i)));
    return out;
}

}  // namespace detail

/// Parses the versioned problem document. "f0"/"g0" may be omitted for the
/// condition checks; the oracle requires them (has_affine reports which).
struct LoadedProblem {
    GEProblem problem;
    bool has_affine = true;
};

inline LoadedProblem parse_problem(const json& doc) {
    if (!doc.is_object()) throw ParseError("top level: expected an object");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer() ||
        doc["schema"].get<int>() != 1)
        throw ParseError("schema: expected the integer 1");
    for (const char* key : {"l", "k", "xbar", "ybar", "Jf", "Jg", "D"})
        if (!doc.contains(key)) throw ParseError(std::string(key) + ": missing");
    LoadedProblem lp;
    GEProblem& p = lp.problem;
    if (!doc["l"].is_number_integer() || !doc["k"].is_number_integer())
        throw ParseError("l/k: expected integers");
    p.l = doc["l"].get<std::size_t>();
    p.k = doc["k"].get<std::size_t>();
    if (p.k == 0) throw ParseError("k: must be positive");
    p.xbar = detail::json_vector(doc["xbar"], "xbar");
    p.ybar = detail::json_vector(doc["ybar"], "ybar");
    if (p.xbar.size() != p.l) throw ParseError("xbar: expected length l");
    if (p.ybar.size() != p.k) throw ParseError("ybar: expected length k");
    p.Jf = detail::json_matrix(doc["Jf"], "Jf");
    p.Jg = detail::json_matrix(doc["Jg"], "Jg");
    if (p.Jf.rows() != p.k || p.Jf.cols() != p.l + p.k)
        throw ParseError("Jf: expected a k x (l+k) matrix");
    if (p.Jg.rows() != p.k || p.Jg.cols() != p.l + p.k)
        throw ParseError("Jg: expected a k x (l+k) matrix");
    if (!doc["D"].is_object() || !doc["D"].contains("A") || !doc["D"].contains("b"))
        throw ParseError("D: expected an object with A and b");
    if (doc["D"]["A"].is_array() && doc["D"]["A"].empty()) {
        p.D = PolyhedralSet::whole_space(p.k);
    } else {
        p.D.A = detail::json_matrix(doc["D"]["A"], "D.A");
        p.D.b = detail::json_vector(doc["D"]["b"], "D.b");
        p.D.dim = p.D.A.cols();
        if (p.D.A.rows() != p.D.b.size()) throw ParseError("D: A and b row counts differ");
        if (p.D.dim != p.k) throw ParseError("D: ambient dimension must equal k");
    }
    lp.has_affine = doc.contains("f0") && doc.contains("g0");
    if (doc.contains("f0")) p.f0 = detail::json_vector(doc["f0"], "f0");
    else p.f0 = RatVec(p.k);
    if (doc.contains("g0")) p.g0 = detail::json_vector(doc["g0"], "g0");
    else p.g0 = RatVec(p.k);
    if (p.f0.size() != p.k) throw ParseError("f0: expected length k");
    if (p.g0.size() != p.k) throw ParseError("g0: expected length k");
    return lp;
}

inline LoadedProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return parse_problem(doc);
}

inline json witness_json(const Witness& w) {
    json out;
    json vecs;
    for (const auto& [name, v] : w.vectors) vecs[name] = detail::vector_json(v);
    out["vectors"] = vecs;
    auto active_json = [](const std::set<std::size_t>& s) {
        json a = json::array();
        for (auto i : s) a.push_back(i);
        return a;
    };
    if (w.face) out["face"] = active_json(*w.face);
    if (w.face2) out["face2"] = active_json(*w.face2);
    if (w.piece_face) out["piece_face"] = active_json(*w.piece_face);
    return out;
}

inline json report_json(const StabilityReport& rep) {
    json out;
    json verdicts;
    for (const auto& [c, v] : rep.verdicts) {
        json entry;
        entry["verdict"] = v.holds ? "holds" : "fails";
        if (!v.holds) entry["witness"] = witness_json(*v.witness);
        verdicts[condition_name(c)] = entry;
    }
    out["verdicts"] = verdicts;
    out["all_hold"] = rep.all_hold();
    return out;
}

inline json oracle_json(const OracleReport& rep) {
    json out;
    out["verdict"] = rep.consistent ? "consistent" : "violated";
    out["empirical_modulus"] = rep.empirical_modulus;
    out["seed"] = rep.seed;
    out["samples"] = rep.samples;
    out["anchors"] = rep.anchors;
    out["algorithm"] = rep.algorithm;
    if (rep.violation) {
        json q;
        q["x"] = detail::vector_json(rep.violation->x);
        q["y"] = detail::vector_json(rep.violation->y);
        q["xprime"] = detail::vector_json(rep.violation->xprime);
        q["yprime"] = detail::vector_json(rep.violation->yprime);
        out["violation"] = q;
    }
    return out;
}

inline json faces_json(const std::vector<Face>& faces) {
    json out = json::array();
    for (const auto& f : faces) {
        json e;
        e["dim"] = f.dim;
        json act = json::array();
        for (auto i : f.active) act.push_back(i);
        e["active"] = act;
        e["lineality_basis"] = detail::matrix_json(f.lineality_span.transpose());
        out.push_back(e);
    }
    return out;
}

}  // namespace scdstab

#endif

#pragma once

// JSON in and out. Vertex indices are 1-based on the wire.

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flexcross/butterfly.hpp"
#include "flexcross/epbq.hpp"
#include "flexcross/errors.hpp"
#include "flexcross/flexbuild.hpp"

namespace flexcross::io {

using json = nlohmann::ordered_json;

inline json parse_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(origin + ": " + e.what());
    }
}

inline json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SpecError(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

inline double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw SpecError(where + ": expected a number");
    return j.get<double>();
}

inline int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw SpecError(where + ": expected an integer");
    return j.get<int>();
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
    if (!j.is_array()) throw SpecError(where + ": expected an array");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline Mat matrix(const json& j, const std::string& where, bool null_diagonal = false) {
    if (!j.is_array() || j.empty()) throw SpecError(where + ": expected a square array of arrays");
    const auto n = static_cast<long>(j.size());
    Mat M = Mat::Zero(n, n);
    for (long r = 0; r < n; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<long>(row.size()) != n) throw SpecError(where + ": matrix is not square");
        for (long c = 0; c < n; ++c) {
            const std::string at = where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (null_diagonal && r == c && row[c].is_null()) continue;
            M(r, c) = number(row[c], at);
        }
    }
    return M;
}

}  // namespace detail

inline json to_json(const Vec& v) {
    json a = json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json to_json(const Mat& M, bool null_diagonal = false) {
    json a = json::array();
    for (long r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (long c = 0; c < M.cols(); ++c) {
            if (null_diagonal && r == c) row.push_back(nullptr);
            else row.push_back(M(r, c));
        }
        a.push_back(row);
    }
    return a;
}

inline json to_json(const std::vector<Vec>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(to_json(v));
    return a;
}

// ---- curve --------------------------------------------------------------------

inline Family family_from(const std::string& s, const std::string& where) {
    if (s == "line") return Family::line;
    if (s == "rational") return Family::rational;
    if (s == "elliptic1") return Family::elliptic1;
    if (s == "elliptic2") return Family::elliptic2;
    if (s == "exotic") return Family::exotic;
    throw SpecError(where + ": unknown family \"" + s + "\"");
}

inline json curve_to_json(const EpbqCurve& c) {
    json j;
    j["family"] = to_string(c.family);
    switch (c.family) {
        case Family::line: break;
        case Family::rational: j["mu"] = c.mu; break;
        case Family::elliptic1:
        case Family::elliptic2:
            j["k"] = c.k;
            j["sigma"] = c.sigma;
            j["m_prime"] = c.m_prime;
            break;
        case Family::exotic:
            j["k"] = c.k;
            j["alpha"] = c.alpha;
            break;
    }
    return j;
}

inline EpbqCurve curve_from_json(const json& j, const std::string& where = "curve") {
    const auto& f = detail::field(j, "family", where);
    if (!f.is_string()) throw SpecError(where + ".family: expected a string");
    EpbqCurve c;
    c.family = family_from(f.get<std::string>(), where + ".family");
    switch (c.family) {
        case Family::line: break;
        case Family::rational: c.mu = detail::numbers(detail::field(j, "mu", where), where + ".mu"); break;
        case Family::elliptic1:
        case Family::elliptic2:
            c.k = detail::number(detail::field(j, "k", where), where + ".k");
            c.sigma = detail::numbers(detail::field(j, "sigma", where), where + ".sigma");
            c.m_prime = detail::integer(detail::field(j, "m_prime", where), where + ".m_prime");
            break;
        case Family::exotic:
            c.k = detail::number(detail::field(j, "k", where), where + ".k");
            c.alpha = detail::integer(detail::field(j, "alpha", where), where + ".alpha");
            break;
    }
    validate(c);
    return c;
}

inline json coeffs_to_json(const CurveCoeffs& cc) {
    json j;
    j["m"] = cc.m;
    j["a"] = to_json(cc.a, true);
    j["b"] = to_json(cc.b, true);
    j["e"] = to_json(cc.e, true);
    return j;
}

inline CurveCoeffs coeffs_from_json(const json& j) {
    CurveCoeffs cc;
    cc.a = detail::matrix(detail::field(j, "a", "coeffs"), "coeffs.a", true);
    cc.b = detail::matrix(detail::field(j, "b", "coeffs"), "coeffs.b", true);
    cc.e = detail::matrix(detail::field(j, "e", "coeffs"), "coeffs.e", true);
    cc.m = static_cast<int>(cc.a.rows());
    if (cc.b.rows() != cc.m || cc.e.rows() != cc.m) throw SpecError("coeffs: a, b, e differ in size");
    if (j.contains("m") && detail::integer(j["m"], "coeffs.m") != cc.m) throw SpecError("coeffs.m: does not match a");
    return cc;
}

inline json screen_to_json(const std::vector<PairVerdict>& v) {
    json a = json::array();
    for (const auto& p : v)
        a.push_back({{"j", p.j + 1}, {"l", p.l + 1}, {"verdict", to_string(p.verdict)}, {"inequality", p.inequality}});
    return a;
}

inline json fit_to_json(const EllipticFit& f) {
    json j;
    if (std::isinf(f.kappa)) j["kappa"] = "inf";
    else j["kappa"] = f.kappa;
    j["k"] = f.k;
    j["nu"] = f.nu;
    j["sigma"] = f.sigma;
    return j;
}

// ---- G, H -------------------------------------------------------------------

inline json gh_to_json(const GHPair& x) {
    json j;
    j["n"] = x.n;
    j["G"] = to_json(x.G);
    j["H"] = to_json(x.H);
    return j;
}

inline GHPair gh_from_json(const json& j) {
    GHPair x;
    x.G = detail::matrix(detail::field(j, "G", "gh"), "gh.G");
    x.H = detail::matrix(detail::field(j, "H", "gh"), "gh.H");
    x.n = static_cast<int>(x.G.rows());
    if (j.contains("n") && detail::integer(j["n"], "gh.n") != x.n) throw SpecError("gh.n: does not match G");
    if (x.H.rows() != x.n) throw SpecError("gh: G and H differ in size");
    try {
        check_pair(x);
    } catch (const ContractError& e) {
        throw SpecError(e.what());
    }
    return x;
}

inline json classification_to_json(const Classification& c) {
    json j;
    j["classification"] = to_string(c.kind);
    if (!c.reason.empty()) j["reason"] = c.reason;
    j["det"] = c.det;
    j["min_proper_minor"] = std::isinf(c.min_proper_minor) ? json(nullptr) : json(c.min_proper_minor);
    j["negative_eigenvalues"] = c.negative_eigenvalues;
    return j;
}

// ---- spec ---------------------------------------------------------------------

inline json spec_to_json(const FlexSpec& s) {
    json j;
    j["space"] = s.space ? to_string(*s.space) : "auto";
    j["curve"] = curve_to_json(s.curve);
    json blocks = json::array();
    for (const auto& b : s.decomp.blocks) {
        json bb = json::array();
        for (int p : b) bb.push_back(p + 1);
        blocks.push_back(bb);
    }
    j["blocks"] = blocks;
    j["lambda"] = s.lambda;
    json g = json::object();
    for (const auto& [k, v] : s.g_within) g[std::to_string(k.first + 1) + "," + std::to_string(k.second + 1)] = v;
    j["g_within"] = g;
    return j;
}

inline FlexSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw SpecError("spec: expected an object");
    FlexSpec s;
    if (j.contains("space")) {
        const auto& sp = j["space"];
        if (!sp.is_string()) throw SpecError("spec.space: expected a string");
        const auto v = sp.get<std::string>();
        if (v == "euclidean") s.space = SpaceKind::euclidean;
        else if (v == "spherical") s.space = SpaceKind::spherical;
        else if (v == "hyperbolic") s.space = SpaceKind::hyperbolic;
        else if (v != "auto") throw SpecError("spec.space: unknown value \"" + v + "\"");
    }
    s.curve = curve_from_json(detail::field(j, "curve", "spec"), "spec.curve");
    const auto& bj = detail::field(j, "blocks", "spec");
    if (!bj.is_array()) throw SpecError("spec.blocks: expected an array of arrays");
    std::vector<std::vector<int>> blocks;
    int n = 0;
    for (std::size_t b = 0; b < bj.size(); ++b) {
        const std::string at = "spec.blocks[" + std::to_string(b) + "]";
        if (!bj[b].is_array()) throw SpecError(at + ": expected an array");
        std::vector<int> idx;
        for (std::size_t i = 0; i < bj[b].size(); ++i) idx.push_back(detail::integer(bj[b][i], at) - 1);
        n += static_cast<int>(idx.size());
        blocks.push_back(idx);
    }
    s.decomp = make_decomposition(n, blocks);
    s.lambda = detail::numbers(detail::field(j, "lambda", "spec"), "spec.lambda");
    if (j.contains("g_within")) {
        const auto& g = j["g_within"];
        if (!g.is_object()) throw SpecError("spec.g_within: expected an object");
        for (const auto& [key, val] : g.items()) {
            int p = 0, q = 0;
            char comma = 0;
            std::istringstream ks(key);
            if (!(ks >> p >> comma >> q) || comma != ',' || !ks.eof())
                throw SpecError("spec.g_within: key \"" + key + "\" is not of the form \"p,q\"");
            if (p == q) throw SpecError("spec.g_within: key \"" + key + "\" is diagonal");
            const double v = detail::number(val, "spec.g_within[\"" + key + "\"]");
            s.g_within[{std::min(p, q) - 1, std::max(p, q) - 1}] = v;
        }
    }
    validate(s);
    return s;
}

// ---- outputs ------------------------------------------------------------------

inline json butterfly_to_json(const Butterfly& B) {
    json j;
    j["space"] = to_string(B.space.kind);
    j["n"] = B.space.n;
    j["normals"] = to_json(B.normals);
    j["m"] = to_json(B.m_normal);
    j["alt_a"] = to_json(B.alt_a);
    j["alt_b"] = to_json(B.alt_b);
    j["anchors_a"] = to_json(B.anchors_a);
    j["anchors_b0"] = to_json(B.anchors_b0);
    j["duals"] = to_json(B.duals);
    return j;
}

inline json polytope_to_json(const FlexiblePolytope& P) {
    json j;
    j["spec"] = spec_to_json(P.spec);
    j["classification"] = classification_to_json(P.cls);
    j["G"] = to_json(P.gh.G);
    j["H"] = to_json(P.gh.H);
    j["butterfly"] = butterfly_to_json(P.butterfly);
    j["biquad"] = {{"A", to_json(P.biquad.A, true)},
                   {"B", to_json(P.biquad.B, true)},
                   {"D", to_json(Mat(P.biquad.B.transpose()), true)},
                   {"E", to_json(P.biquad.E, true)}};
    return j;
}

inline json frame_to_json(const Frame& f) {
    json j;
    j["u"] = f.u;
    j["vertices_a"] = to_json(f.vertices_a);
    j["vertices_b"] = to_json(f.vertices_b);
    j["phi"] = f.dihedral.phi;
    return j;
}

inline json report_to_json(const VerificationReport& R, const Tolerances& tol) {
    json j;
    j["space"] = R.space;
    j["samples"] = R.samples;
    j["pole_hit"] = R.pole_hit;
    auto check = [](double value, double limit, bool pass) {
        return json{{"max", value}, {"tol", limit}, {"pass", pass}};
    };
    j["checks"] = {
        {"bb_length_rel_dev", check(R.bb_rel_dev, tol.bb, R.pass_bb)},
        {"ab_length_rel_dev", check(R.ab_rel_dev, tol.rigid, R.pass_rigid)},
        {"aa_length_rel_dev", check(R.aa_rel_dev, tol.rigid, R.pass_rigid)},
        {"biquadratic_residual", check(R.biquad_residual, tol.biquad, R.pass_biquad)},
        {"model_point_residual", check(R.model_residual, tol.model, R.pass_model)},
        {"e_matrix_gap", check(R.e_matrix_gap, tol.e_match, R.pass_e)},
        {"butterfly_residual", check(R.butterfly_residual, tol.butterfly, R.pass_butterfly)},
        {"proportionality_gap", check(R.proportional_gap, tol.proportional, R.pass_proportional)},
        {"inequality_min", json{{"min", R.min_inequality}, {"pass", R.pass_inequality}}},
        {"essential_probe", json{{"pass", R.essential}}},
    };
    j["pass"] = R.pass();
    if (!R.pass()) j["first_failure"] = R.first_failure();
    return j;
}

inline void write_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace flexcross::io

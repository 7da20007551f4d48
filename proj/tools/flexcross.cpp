// flexcross: build, flex, verify and inspect flexible cross-polytopes.
//
// exit codes
//   0  ok
//   1  verify ran and some check failed (report still written)
//   2  bad input: malformed JSON, invalid spec, bad arguments
//   3  not realisable in the requested space
//   4  OBJ export asked for something other than euclidean n = 3
//   5  numerical failure (no fit, no real modulus, domain error)

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flexcross/flexcross.hpp"

namespace fc = flexcross;
namespace io = flexcross::io;
using io::json;

namespace {

struct Options {
    std::string input;
    std::string out;
    std::string obj_dir;
    int samples = 200;
    double tol = 0.0;  // 0 keeps the defaults
    unsigned seed = 0;

    // witness
    std::string family, space, type;
    double param = 0.0;
    int alpha = 1;
    int m_prime = -1;
    double delta = 0.2;
    std::vector<int> signs;
};

void emit(const Options& o, const json& j) {
    if (o.out.empty()) std::cout << j.dump(2) << '\n';
    else io::write_file(o.out, j);
}

fc::Tolerances tolerances(const Options& o) {
    return o.tol > 0 ? fc::Tolerances::uniform(o.tol) : fc::Tolerances{};
}

// A spec file, or a polytope file written by `construct`. The latter keeps its
// stored G, H and biquadratic matrices so that an edited file is checked as is.
fc::FlexiblePolytope load_polytope(const std::string& path) {
    const json j = io::read_file(path);
    if (!j.is_object() || !j.contains("spec")) return fc::build(io::spec_from_json(j));

    auto P = fc::build(io::spec_from_json(j["spec"]));
    if (j.contains("G") && j.contains("H")) {
        const auto gh = io::gh_from_json(json{{"G", j["G"]}, {"H", j["H"]}});
        if (gh.n != P.gh.n) throw fc::SpecError(path + ": G does not match the spec's n");
        P.gh = gh;
    }
    if (j.contains("biquad")) {
        const auto& b = j["biquad"];
        const auto cc = io::coeffs_from_json(json{{"a", b.at("A")}, {"b", b.at("B")}, {"e", b.at("E")}});
        if (cc.m != P.gh.n) throw fc::SpecError(path + ": biquad does not match the spec's n");
        P.biquad.A = cc.a;
        P.biquad.B = cc.b;
        P.biquad.E = cc.e;
    }
    return P;
}

// 6 vertices, 8 faces; a face takes a_i or b_i for each i, reversed when it
// uses an odd number of b's so the normals agree.
void write_obj(const std::string& path, const fc::Frame& f) {
    std::ofstream out(path);
    if (!out) throw fc::Error("cannot write " + path);
    char buf[128];
    for (const auto* vs : {&f.vertices_a, &f.vertices_b})
        for (const auto& v : *vs) {
            std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
            out << buf;
        }
    for (unsigned mask = 0; mask < 8; ++mask) {
        int idx[3];
        for (int i = 0; i < 3; ++i) idx[i] = 1 + i + ((mask >> i) & 1u) * 3;
        if (std::popcount(mask) % 2) std::swap(idx[1], idx[2]);
        out << "f " << idx[0] << ' ' << idx[1] << ' ' << idx[2] << '\n';
    }
}

int cmd_construct(const Options& o) {
    const auto spec = io::spec_from_json(io::read_file(o.input));
    emit(o, io::polytope_to_json(fc::build(spec)));
    return 0;
}

int cmd_flex(const Options& o) {
    const auto spec = io::spec_from_json(io::read_file(o.input));
    const auto P = fc::build(spec);
    if (!o.obj_dir.empty() && (P.space.kind != fc::SpaceKind::euclidean || P.space.n != 3)) {
        std::cerr << "OBJ export needs a euclidean polytope with n = 3, this one is " << fc::to_string(P.space.kind)
                  << " with n = " << P.space.n << '\n';
        return 4;
    }
    if (o.samples < 1) throw fc::SpecError("--samples must be positive");
    const auto grid = fc::sample_grid(spec.curve, o.samples);

    json frames = json::array();
    std::vector<fc::Frame> keep;
    for (double u : grid.u) {
        keep.push_back(fc::frame_at(P, u));
        frames.push_back(io::frame_to_json(keep.back()));
    }
    if (!o.obj_dir.empty()) {
        std::filesystem::create_directories(o.obj_dir);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%04zu.obj", i);
            write_obj((std::filesystem::path(o.obj_dir) / name).string(), keep[i]);
        }
    }
    emit(o, frames);
    return 0;
}

int cmd_verify(const Options& o) {
    const auto P = load_polytope(o.input);
    const auto tol = tolerances(o);
    const auto R = fc::verify(P, o.samples, tol);
    emit(o, io::report_to_json(R, tol));
    if (!R.pass()) {
        std::cerr << "verify: failed check " << R.first_failure() << '\n';
        return 1;
    }
    return 0;
}

int cmd_classify(const Options& o) {
    const auto gh = io::gh_from_json(io::read_file(o.input));
    emit(o, io::classification_to_json(fc::classify(gh)));
    return 0;
}

int cmd_coeffs(const Options& o) {
    const json j = io::read_file(o.input);
    const auto curve = j.contains("curve") ? io::curve_from_json(j["curve"], "spec.curve") : io::curve_from_json(j);
    const auto cc = fc::coeffs(curve);
    json out = io::coeffs_to_json(cc);
    out["screen"] = io::screen_to_json(fc::realisable_screen(cc));
    emit(o, out);
    return 0;
}

int cmd_fit(const Options& o) {
    const auto cc = io::coeffs_from_json(io::read_file(o.input));
    const auto f = o.tol > 0 ? fc::fit_elliptic(cc, o.tol) : fc::fit_elliptic(cc);
    emit(o, io::fit_to_json(f));
    return 0;
}

std::vector<int> parse_type(const std::string& s) {
    std::vector<int> t;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(part, &used);
            if (used != part.size() || v < 1) throw std::invalid_argument(part);
            t.push_back(v);
        } catch (const std::exception&) {
            throw fc::SpecError("type \"" + s + "\": expected positive integers separated by commas");
        }
    }
    if (t.empty()) throw fc::SpecError("type is empty");
    return t;
}

int cmd_witness(const Options& o) {
    fc::WitnessFamily fam;
    if (o.family == "simplest") fam = fc::WitnessFamily::simplest;
    else if (o.family == "rational") fam = fc::WitnessFamily::rational;
    else if (o.family == "elliptic1") fam = fc::WitnessFamily::elliptic1;
    else if (o.family == "elliptic2") fam = fc::WitnessFamily::elliptic2;
    else if (o.family == "exotic") fam = fc::WitnessFamily::exotic;
    else throw fc::SpecError("unknown witness family \"" + o.family + "\"");

    fc::SpaceKind sp;
    if (o.space == "euclidean") sp = fc::SpaceKind::euclidean;
    else if (o.space == "spherical") sp = fc::SpaceKind::spherical;
    else if (o.space == "hyperbolic") sp = fc::SpaceKind::hyperbolic;
    else throw fc::SpecError("unknown space \"" + o.space + "\"");

    fc::WitnessOptions wo;
    wo.alpha = o.alpha;
    wo.m_prime = o.m_prime;
    wo.delta = o.delta;
    wo.signs = o.signs;
    emit(o, io::spec_to_json(fc::witness(fam, sp, parse_type(o.type), o.param, wo)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flexible cross-polytopes: construct, flex, verify"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c, const char* what) {
        c->add_option("file", o.input, what)->required();
        c->add_option("--out", o.out, "output file (stdout if omitted)");
        c->add_option("--seed", o.seed, "seed for randomised routines; current commands are deterministic");
    };

    auto* construct = app.add_subcommand("construct", "spec -> polytope (G, H, butterfly, biquadratic matrices)");
    common(construct, "spec JSON");

    auto* flex = app.add_subcommand("flex", "spec -> frames along the flex");
    common(flex, "spec JSON");
    flex->add_option("--samples", o.samples, "number of frames")->capture_default_str();
    flex->add_option("--obj-dir", o.obj_dir, "also write one OBJ per frame here (euclidean n = 3 only)");

    auto* verify = app.add_subcommand("verify", "check a spec or polytope file; exit 1 on any failed check");
    common(verify, "spec or polytope JSON");
    verify->add_option("--samples", o.samples, "number of frames")->capture_default_str();
    verify->add_option("--tol", o.tol, "one tolerance for every check");

    auto* classify = app.add_subcommand("classify", "(G, H) -> spherical / euclidean / hyperbolic / none");
    common(classify, "GH JSON");

    auto* coeffs = app.add_subcommand("coeffs", "curve -> biquadratic coefficient matrices");
    common(coeffs, "curve or spec JSON");

    auto* fit = app.add_subcommand("fit", "coefficient matrices -> elliptic modulus and phases");
    common(fit, "coeffs JSON");
    fit->add_option("--tol", o.tol, "relative tolerance of the consistency checks");

    auto* wit = app.add_subcommand("witness", "emit a spec that builds in the given space");
    wit->add_option("family", o.family, "simplest | rational | elliptic1 | elliptic2 | exotic")->required();
    wit->add_option("space", o.space, "euclidean | spherical | hyperbolic")->required();
    wit->add_option("type", o.type, "block sizes, e.g. 1,1,1")->required();
    wit->add_option("param", o.param, "eta (simplest), delta (rational), k' (elliptic, exotic)")->required();
    wit->add_option("--alpha", o.alpha, "exotic kind 1..3")->capture_default_str();
    wit->add_option("--m-prime", o.m_prime, "elliptic sign split (default: number of blocks)");
    wit->add_option("--delta", o.delta, "rational scale behind elliptic witnesses")->capture_default_str();
    wit->add_option("--signs", o.signs, "rational signs, one of +1/-1 per block")->delimiter(',');
    wit->add_option("--out", o.out, "output file (stdout if omitted)");
    wit->add_option("--seed", o.seed, "unused; accepted for uniformity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*construct) return cmd_construct(o);
        if (*flex) return cmd_flex(o);
        if (*verify) return cmd_verify(o);
        if (*classify) return cmd_classify(o);
        if (*coeffs) return cmd_coeffs(o);
        if (*fit) return cmd_fit(o);
        if (*wit) return cmd_witness(o);
    } catch (const fc::NotRealisableHereError& e) {
        std::cerr << "not realisable: " << e.what() << '\n';
        return 3;
    } catch (const fc::SpecError& e) {
        std::cerr << "bad input: " << e.what() << '\n';
        return 2;
    } catch (const fc::ContractError& e) {
        std::cerr << "bad input: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "bad input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return 5;
    }
    return 2;
}

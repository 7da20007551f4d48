#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexcross/butterfly.hpp"
#include "flexcross/elliptic.hpp"
#include "flexcross/epbq.hpp"
#include "flexcross/errors.hpp"
#include "flexcross/geometry.hpp"

namespace flexcross {

// Indices are 0-based in code, 1-based in JSON.
struct Decomposition {
    int n = 0;
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of;

    int m() const { return static_cast<int>(blocks.size()); }
    std::vector<int> type() const {
        std::vector<int> t;
        for (const auto& b : blocks) t.push_back(static_cast<int>(b.size()));
        return t;
    }
};

inline Decomposition make_decomposition(int n, std::vector<std::vector<int>> blocks) {
    if (n < 3) throw SpecError("n must be at least 3");
    Decomposition d;
    d.n = n;
    d.block_of.assign(n, -1);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (blocks[j].empty()) throw SpecError("decomposition: empty block");
        for (int p : blocks[j]) {
            if (p < 0 || p >= n) throw SpecError("decomposition: index out of range");
            if (d.block_of[p] != -1) throw SpecError("decomposition: index appears twice");
            d.block_of[p] = static_cast<int>(j);
        }
    }
    for (int p = 0; p < n; ++p)
        if (d.block_of[p] == -1) throw SpecError("decomposition: blocks do not cover every index");
    d.blocks = std::move(blocks);
    return d;
}

// Contiguous blocks of the given sizes.
inline Decomposition decomposition_of_type(const std::vector<int>& type) {
    std::vector<std::vector<int>> blocks;
    int p = 0;
    for (int s : type) {
        if (s < 1) throw SpecError("type entries must be positive");
        std::vector<int> b;
        for (int i = 0; i < s; ++i) b.push_back(p++);
        blocks.push_back(b);
    }
    return make_decomposition(p, blocks);
}

struct FlexSpec {
    std::optional<SpaceKind> space;  // nullopt = auto
    EpbqCurve curve;
    Decomposition decomp;
    std::vector<double> lambda;
    std::map<std::pair<int, int>, double> g_within;  // keys (p, q) with p < q
};

inline void validate(const FlexSpec& s) {
    validate(s.curve);
    const int n = s.decomp.n;
    if (n < 3) throw SpecError("n must be at least 3");
    if (s.curve.m() != s.decomp.m())
        throw SpecError("curve has m = " + std::to_string(s.curve.m()) + " but the decomposition has " +
                        std::to_string(s.decomp.m()) + " blocks");
    if (static_cast<int>(s.lambda.size()) != n) throw SpecError("lambda must have n entries");
    for (int p = 0; p < n; ++p)
        if (!(std::isfinite(s.lambda[p]) && s.lambda[p] != 0.0)) throw SpecError("lambda_p must be finite and nonzero");
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            const bool same = s.decomp.block_of[p] == s.decomp.block_of[q];
            const bool given = s.g_within.count({p, q}) > 0;
            if (same && std::abs(s.lambda[p]) == std::abs(s.lambda[q]))
                throw SpecError("lambda_p = +-lambda_q inside a block (p = " + std::to_string(p + 1) +
                                ", q = " + std::to_string(q + 1) + ")");
            if (same && !given)
                throw SpecError("missing g_within entry for " + std::to_string(p + 1) + "," + std::to_string(q + 1));
            if (!same && given)
                throw SpecError("g_within given for a cross-block pair " + std::to_string(p + 1) + "," +
                                std::to_string(q + 1));
        }
    for (const auto& [key, v] : s.g_within)
        if (key.first >= key.second || key.second >= n || key.first < 0 || !std::isfinite(v))
            throw SpecError("g_within: bad entry");
}

// Coefficients of A t_p^2 t_q^2 + B_pq t_p^2 - 2 t_p t_q + B_qp t_q^2 + E_pq = 0;
// D is B transposed and not stored.
struct Biquad {
    Mat A, B, E;
};

// G,H -> A,B,E given E, and back
inline void coeffs_from_gh(double g, double hpq, double hqp, double E, double& A, double& Bpq, double& Bqp) {
    A = hqp + hpq - 2 * g + E;
    Bpq = hqp + E;
    Bqp = hpq + E;
}

inline void gh_from_coeffs(double A, double Bpq, double Bqp, double E, double& g, double& hpq, double& hqp) {
    g = 0.5 * (-A + Bpq + Bqp - E);
    hpq = Bqp - E;
    hqp = Bpq - E;
}

struct Assembled {
    GHPair gh;
    Biquad bq;
};

inline Assembled assemble_gh(const FlexSpec& s) {
    validate(s);
    const int n = s.decomp.n;
    const auto& lam = s.lambda;
    Assembled out;
    out.gh = {n, Mat::Identity(n, n), Mat::Identity(n, n)};
    out.bq = {Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
    const bool trivial = s.curve.family == Family::line;
    CurveCoeffs cc;
    if (!trivial) cc = coeffs(s.curve);

    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p == q) continue;
            const int j = s.decomp.block_of[p], l = s.decomp.block_of[q];
            const double lp = lam[p], lq = lam[q];
            if (j == l) {
                const double g = s.g_within.at({std::min(p, q), std::max(p, q)});
                out.gh.G(p, q) = g;
                out.gh.H(p, q) = 2 * lp * (lp * g - lq) / (lp * lp - lq * lq);
            } else {
                const double a = cc.a(j, l), bjl = cc.b(j, l), blj = cc.b(l, j), e = cc.e(j, l);
                out.gh.G(p, q) = 0.5 * (-a / (lp * lq) + lq * bjl / lp + lp * blj / lq - lp * lq * e);
                out.gh.H(p, q) = lp * blj / lq - lp * lq * e;
                out.bq.A(p, q) = a / (lp * lq);
                out.bq.B(p, q) = lq * bjl / lp;
                out.bq.E(p, q) = lp * lq * e;
            }
        }
    // within-block A, B follow from G, H with E = 0
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p == q || s.decomp.block_of[p] != s.decomp.block_of[q]) continue;
            double A, Bpq, Bqp;
            coeffs_from_gh(out.gh.G(p, q), out.gh.H(p, q), out.gh.H(q, p), 0.0, A, Bpq, Bqp);
            out.bq.A(p, q) = A;
            out.bq.B(p, q) = Bpq;
        }
    // G must be exactly symmetric; the two halves of the cross-block formula
    // can differ in the last bit
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) out.gh.G(q, p) = out.gh.G(p, q);
    return out;
}

struct FlexiblePolytope {
    FlexSpec spec;
    GHPair gh;
    AmbientSpace space;
    Butterfly butterfly;
    Biquad biquad;
    Classification cls;
};

inline std::string obstruction_text(const FlexSpec& s, SpaceKind target) {
    if (s.curve.family == Family::exotic && target != SpaceKind::spherical)
        return std::string("exotic curves have no realisation in ") + to_string(target) +
               " space: their Gram matrices satisfy g_pq = g_pr g_qr across the three blocks, which forces "
               "det G > 0 whenever all proper principal minors are positive";
    return "";
}

inline FlexiblePolytope build(const FlexSpec& s, const SignFlags& flags = {}) {
    if (s.space) {
        const auto why = obstruction_text(s, *s.space);
        if (!why.empty()) throw NotRealisableHereError(why);
    }
    auto as = assemble_gh(s);
    FlexiblePolytope P;
    P.spec = s;
    P.gh = std::move(as.gh);
    P.biquad = std::move(as.bq);
    P.cls = classify(P.gh);
    if (P.cls.kind == Kind::none) throw NotRealisableHereError("(G,H) is in no Psi set: " + P.cls.reason);
    if (s.space && space_of(P.cls.kind) != *s.space)
        throw NotRealisableHereError(std::string("requested ") + to_string(*s.space) + " but (G,H) is " +
                                     to_string(P.cls.kind));
    P.space = {space_of(P.cls.kind), s.decomp.n};
    P.butterfly = recover(P.gh, P.cls.kind, flags);
    return P;
}

struct DihedralState {
    std::vector<double> phi;
    std::vector<Proj> t;
};

struct Frame {
    double u = 0.0;
    AmbientSpace space;
    std::vector<Vec> vertices_a, vertices_b;
    DihedralState dihedral;
};

inline Frame frame_at(const FlexiblePolytope& P, double u) {
    const auto z = eval(P.spec.curve, u);
    const int n = P.spec.decomp.n;
    Frame f;
    f.u = u;
    f.space = P.space;
    f.vertices_a = P.butterfly.anchors_a;
    for (int p = 0; p < n; ++p) {
        const Proj t = z[P.spec.decomp.block_of[p]].scaled(P.spec.lambda[p]);
        f.dihedral.t.push_back(t);
        f.dihedral.phi.push_back(half_angle_to_phi(t));
        f.vertices_b.push_back(wing_position(P.butterfly, p, t));
    }
    return f;
}

struct EdgeLengths {
    // (p, q, length); p < q for aa and bb, p != q for ab (a_p to b_q)
    struct Edge {
        int p, q;
        double len;
    };
    std::vector<Edge> aa, ab, bb;
};

inline EdgeLengths edge_lengths(const Frame& f) {
    EdgeLengths e;
    const int n = static_cast<int>(f.vertices_a.size());
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p < q) {
                e.aa.push_back({p, q, distance(f.space, f.vertices_a[p], f.vertices_a[q])});
                e.bb.push_back({p, q, distance(f.space, f.vertices_b[p], f.vertices_b[q])});
            }
            if (p != q) e.ab.push_back({p, q, distance(f.space, f.vertices_a[p], f.vertices_b[q])});
        }
    return e;
}

// E recomputed from the bb-lengths of one frame.
inline Mat e_matrix(const FlexiblePolytope& P, const Frame& f) {
    const int n = P.spec.decomp.n;
    const auto& sp = P.space;
    const auto& B = P.butterfly;
    Mat E = Mat::Zero(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p == q) continue;
            const double l = distance(sp, f.vertices_b[p], f.vertices_b[q]);
            const Vec& x = B.anchors_b0[p];
            const Vec& y = B.anchors_b0[q];
            double num = 0;
            switch (sp.kind) {
                case SpaceKind::euclidean: num = -0.5 * l * l + 0.5 * (x - y).squaredNorm(); break;
                case SpaceKind::spherical: num = std::cos(l) - bilinear(sp, x, y); break;
                case SpaceKind::hyperbolic: num = -std::cosh(l) - bilinear(sp, x, y); break;
            }
            E(p, q) = num / (2 * B.alt_b[p] * B.alt_b[q]);
        }
    return E;
}

// Parameter grid along the flex; the last entry of `poles` (if any) is hit
// exactly once.
struct Grid {
    std::vector<double> u;
    std::vector<double> poles;
};

inline std::vector<double> logspace(double lo, double hi, int k) {
    std::vector<double> v;
    if (k == 1) return {std::pow(10.0, 0.5 * (lo + hi))};
    for (int i = 0; i < k; ++i) v.push_back(std::pow(10.0, lo + (hi - lo) * i / (k - 1)));
    return v;
}

inline std::vector<double> pole_locations(const EpbqCurve& c) {
    std::vector<double> P;
    const auto wrap = [](double x, double period) {
        x = std::fmod(x, period);
        return x < 0 ? x + period : x;
    };
    switch (c.family) {
        case Family::line: break;
        case Family::rational:
            for (double mu : c.mu)
                if (mu != 0.0) { P.push_back(0.0); break; }
            break;
        case Family::elliptic1:
        case Family::elliptic2: {
            const double K = quarter_periods(c.k).K;
            for (int j = c.m_prime; j < c.m(); ++j)
                for (int r = 0; r < 2; ++r) P.push_back(wrap(c.sigma[j] + 2 * K * r, 4 * K));
            break;
        }
        case Family::exotic: {
            const double K = quarter_periods(c.k).K;
            for (int r = 0; r < 2; ++r) {
                if (c.alpha == 2) P.push_back(wrap(-K / 2 + 2 * K * r, 4 * K));
                if (c.alpha == 3) {
                    P.push_back(2 * K * r);
                    P.push_back(K + 2 * K * r);
                    P.push_back(K / 2 + 2 * K * r);
                }
            }
            break;
        }
    }
    std::sort(P.begin(), P.end());
    return P;
}

inline Grid sample_grid(const EpbqCurve& c, int N) {
    if (N < 2) throw ContractError("sample_grid: need at least 2 samples");
    Grid g;
    g.poles = pole_locations(c);
    const bool has_pole = !g.poles.empty();
    if (c.family == Family::line || c.family == Family::rational) {
        const int k = has_pole && N >= 3 ? N - 1 : N;
        const auto pos = logspace(-2, 2, (k + 1) / 2);
        const auto neg = logspace(-2, 2, k / 2);
        for (auto it = neg.rbegin(); it != neg.rend(); ++it) g.u.push_back(-*it);
        if (k < N) g.u.push_back(0.0);
        for (double x : pos) g.u.push_back(x);
        if (k == N) g.poles.clear();
        return g;
    }
    const double K = quarter_periods(c.k).K;
    const int k = has_pole ? N - 1 : N;
    for (int i = 0; i < k; ++i) {
        double u = 4 * K * (i + 0.5) / k;
        for (double p : g.poles)
            for (double shift : {-4 * K, 0.0, 4 * K})
                if (std::abs(u - (p + shift)) < 1e-6) u = p + shift + 2e-6;
        g.u.push_back(u);
    }
    if (has_pole) {
        g.u.push_back(g.poles.front());
        std::sort(g.u.begin(), g.u.end());
        g.poles = {g.poles.front()};
    }
    return g;
}

struct Tolerances {
    double bb = 1e-8;          // relative spread of bb-lengths
    double rigid = 1e-10;      // relative spread of aa/ab-lengths
    double biquad = 1e-9;      // homogenized relation residual
    double model = 1e-9;       // sphere / hyperboloid residual
    double e_match = 1e-8;     // E from lengths vs stored E
    double butterfly = 1e-9;   // recovered butterfly identities
    double proportional = 1e-12;

    static Tolerances uniform(double t) { return {t, t, t, t, t, t, t}; }
};

struct VerificationReport {
    int samples = 0;
    std::string space;
    double bb_rel_dev = 0, ab_rel_dev = 0, aa_rel_dev = 0;
    double biquad_residual = 0;
    double model_residual = 0;
    double e_matrix_gap = 0;
    double butterfly_residual = 0;
    double proportional_gap = 0;
    double min_inequality = INFINITY;  // must stay > 0
    bool essential = true;
    bool pole_hit = false;

    bool pass_bb = false, pass_rigid = false, pass_biquad = false, pass_model = false, pass_e = false,
         pass_butterfly = false, pass_proportional = false, pass_inequality = false;
    bool pass() const {
        return pass_bb && pass_rigid && pass_biquad && pass_model && pass_e && pass_butterfly &&
               pass_proportional && pass_inequality && essential;
    }
    std::string first_failure() const {
        if (!pass_bb) return "bb_length";
        if (!pass_rigid) return "rigid_length";
        if (!pass_biquad) return "biquadratic";
        if (!pass_model) return "model_point";
        if (!pass_e) return "e_matrix";
        if (!pass_butterfly) return "butterfly";
        if (!pass_proportional) return "proportionality";
        if (!pass_inequality) return "inequality";
        if (!essential) return "essential";
        return "";
    }
};

namespace detail {

struct Spread {
    double lo = INFINITY, hi = -INFINITY;
    void add(double x) { lo = std::min(lo, x); hi = std::max(hi, x); }
    double rel() const { return (hi - lo) / std::max(std::abs(hi), 1e-300); }
};

}  // namespace detail

inline VerificationReport verify(const FlexiblePolytope& P, int samples, const Tolerances& tol = {}) {
    if (samples < 2) throw ContractError("verify: need at least 2 samples");
    const int n = P.spec.decomp.n;
    VerificationReport R;
    R.samples = samples;
    R.space = to_string(P.space.kind);
    const auto grid = sample_grid(P.spec.curve, samples);
    R.pole_hit = !grid.poles.empty();

    std::map<std::pair<int, int>, detail::Spread> bb, ab, aa;
    std::vector<std::vector<Proj>> ts(n);
    for (double u : grid.u) {
        const Frame f = frame_at(P, u);
        const auto L = edge_lengths(f);
        for (const auto& e : L.bb) bb[{e.p, e.q}].add(e.len);
        for (const auto& e : L.ab) ab[{e.p, e.q}].add(e.len);
        for (const auto& e : L.aa) aa[{e.p, e.q}].add(e.len);
        for (int p = 0; p < n; ++p) {
            R.model_residual = std::max(R.model_residual, model_residual(P.space, f.vertices_b[p]));
            R.model_residual = std::max(R.model_residual, model_residual(P.space, f.vertices_a[p]));
            ts[p].push_back(f.dihedral.t[p]);
        }
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                if (p == q) continue;
                const double A = P.biquad.A(p, q), Bpq = P.biquad.B(p, q), Bqp = P.biquad.B(q, p),
                             E = P.biquad.E(p, q);
                R.biquad_residual =
                    std::max(R.biquad_residual, pair_residual(A, Bpq, Bqp, E, f.dihedral.t[p], f.dihedral.t[q]));
                if (P.spec.decomp.block_of[p] == P.spec.decomp.block_of[q]) {
                    const auto& x = f.dihedral.t[p];
                    const auto& y = f.dihedral.t[q];
                    const double lp = P.spec.lambda[p], lq = P.spec.lambda[q];
                    R.proportional_gap = std::max(
                        R.proportional_gap, std::abs(lq * x.s * y.c - lp * y.s * x.c) / std::max(std::abs(lp), std::abs(lq)));
                }
            }
        const Mat E = e_matrix(P, f);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                if (p != q)
                    R.e_matrix_gap = std::max(R.e_matrix_gap, std::abs(E(p, q) - P.biquad.E(p, q)) /
                                                                  std::max(1.0, std::abs(P.biquad.E(p, q))));
    }
    for (const auto& [k, s] : bb) R.bb_rel_dev = std::max(R.bb_rel_dev, s.rel());
    for (const auto& [k, s] : ab) R.ab_rel_dev = std::max(R.ab_rel_dev, s.rel());
    for (const auto& [k, s] : aa) R.aa_rel_dev = std::max(R.aa_rel_dev, s.rel());
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
            R.min_inequality = std::min(R.min_inequality, pair_inequality(P.biquad.A(p, q), P.biquad.B(p, q),
                                                                          P.biquad.B(q, p), P.biquad.E(p, q)));
    R.butterfly_residual = butterfly_residual(P.butterfly, P.gh);

    // sampled necessary condition for an essential flex
    for (int p = 0; p < n; ++p) {
        bool all_zero = true, all_inf = true, varies = false;
        for (const auto& t : ts[p]) {
            all_zero = all_zero && std::abs(t.s) < 1e-14;
            all_inf = all_inf && t.is_inf();
            varies = varies || std::abs(t.s * ts[p][0].c - t.c * ts[p][0].s) > 1e-12;
        }
        if (all_zero || all_inf || !varies) R.essential = false;
    }

    R.pass_bb = R.bb_rel_dev < tol.bb;
    R.pass_rigid = R.ab_rel_dev < tol.rigid && R.aa_rel_dev < tol.rigid;
    R.pass_biquad = R.biquad_residual < tol.biquad;
    R.pass_model = R.model_residual < tol.model;
    R.pass_e = R.e_matrix_gap < tol.e_match;
    R.pass_butterfly = R.butterfly_residual < tol.butterfly;
    R.pass_proportional = R.proportional_gap < tol.proportional;
    R.pass_inequality = R.min_inequality > 0;
    return R;
}

// ---- witnesses --------------------------------------------------------------

enum class WitnessFamily { simplest, rational, elliptic1, elliptic2, exotic };

struct WitnessOptions {
    int alpha = 1;                // exotic kind
    int m_prime = -1;             // elliptic sign split; -1 means m
    std::vector<int> signs;       // rational eps_j; empty means all +
    double delta = 0.2;           // rational scale behind the elliptic witnesses
};

namespace detail {

inline std::vector<double> within_block_scale(const Decomposition& d) {
    // distinct |lambda| inside a block, all at most the block's first entry
    std::vector<double> s(d.n, 1.0);
    for (const auto& b : d.blocks)
        for (std::size_t r = 0; r < b.size(); ++r) s[b[r]] = std::pow(0.85, static_cast<double>(r));
    return s;
}

inline std::map<std::pair<int, int>, double> zero_within(const Decomposition& d, double g = 0.0) {
    std::map<std::pair<int, int>, double> w;
    for (const auto& b : d.blocks)
        for (std::size_t x = 0; x < b.size(); ++x)
            for (std::size_t y = x + 1; y < b.size(); ++y) w[{std::min(b[x], b[y]), std::max(b[x], b[y])}] = g;
    return w;
}

inline double det_at(FlexSpec s, int p, double lam) {
    s.lambda[p] = lam;
    return assemble_gh(s).gh.G.determinant();
}

// Root of det G along lambda_p inside [lo, hi] with a sign change; Newton
// steps with a bisection fallback.
inline double polish(const FlexSpec& s, int p, double lo, double hi) {
    double flo = det_at(s, p, lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = det_at(s, p, x);
        if (fx == 0.0) return x;
        if ((fx < 0) == (flo < 0)) { lo = x; flo = fx; } else { hi = x; }
        const double h = 1e-7 * std::abs(x);
        const double d = (det_at(s, p, x + h) - det_at(s, p, x - h)) / (2 * h);
        double nx = d != 0.0 ? x - fx / d : 0.5 * (lo + hi);
        if (!(nx > std::min(lo, hi) && nx < std::max(lo, hi))) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 1e-16 * std::abs(x) || std::abs(hi - lo) <= 1e-16 * std::abs(x)) return nx;
        x = nx;
    }
    return x;
}

inline Kind kind_of(const FlexSpec& s) {
    try {
        return classify(assemble_gh(s).gh).kind;
    } catch (const Error&) {
        return Kind::none;
    }
}

// Walk lambda_p geometrically away from its current value (both ways) and
// land on the first det G = 0 crossing that classifies as euclidean. For
// hyperbolic, step just past that crossing to the det < 0 side.
inline FlexSpec cross_det(FlexSpec s, SpaceKind target, int p, double max_factor) {
    const double start = s.lambda[p];
    const double step = 1.01;
    const int steps = static_cast<int>(std::ceil(std::log(max_factor) / std::log(step)));
    for (int dir : {+1, -1}) {
        double prev = start, fprev = det_at(s, p, start);
        for (int i = 1; i <= steps; ++i) {
            const double cur = start * std::pow(step, dir * i);
            const double fcur = det_at(s, p, cur);
            if ((fcur < 0) != (fprev < 0)) {
                FlexSpec e = s;
                e.lambda[p] = polish(s, p, prev, cur);
                if (kind_of(e) == Kind::euclidean) {
                    if (target == SpaceKind::euclidean) return e;
                    // det < 0 lies towards `cur` when fcur < 0, back towards `prev` otherwise
                    const int side = fcur < 0 ? dir : -dir;
                    for (double eta : {1e-3, 1e-4, 1e-2, 1e-5}) {
                        FlexSpec h = s;
                        h.lambda[p] = e.lambda[p] * std::pow(1.0 + eta, side);
                        if (kind_of(h) == Kind::hyperbolic) return h;
                    }
                }
            }
            prev = cur;
            fprev = fcur;
        }
    }
    throw NotRealisableHereError(std::string("witness search found no ") + to_string(target) +
                                 " point along lambda_1");
}

inline FlexSpec rational_spherical(const std::vector<int>& type, double delta, const std::vector<int>& signs) {
    const auto d = decomposition_of_type(type);
    const int m = d.m();
    if (m < 2) throw SpecError("rational witnesses need m >= 2");
    if (!(delta > 0 && delta < 1)) throw SpecError("delta must lie in (0,1)");
    std::vector<double> mu(m);
    for (int j = 0; j < m; ++j) {
        const double e = signs.empty() ? 1.0 : (signs.at(j) < 0 ? -1.0 : 1.0);
        mu[j] = e * std::pow(delta, 2.0 * (j + 1));
    }
    FlexSpec s;
    s.curve = EpbqCurve::rational(mu);
    s.decomp = d;
    const auto sc = within_block_scale(d);
    s.lambda.resize(d.n);
    for (int p = 0; p < d.n; ++p) s.lambda[p] = std::pow(delta, m - 1 - d.block_of[p]) * sc[p];
    s.g_within = zero_within(d);
    return s;
}

}  // namespace detail

inline FlexSpec witness(WitnessFamily fam, SpaceKind space, const std::vector<int>& type, double param,
                        const WitnessOptions& opt = {}) {
    FlexSpec s;
    if (fam == WitnessFamily::exotic) {
        if (space != SpaceKind::spherical) {
            FlexSpec probe;
            probe.curve = EpbqCurve::exotic(0.5, opt.alpha);
            throw NotRealisableHereError(obstruction_text(probe, space));
        }
        if (type.size() != 3) throw SpecError("exotic witnesses need exactly three blocks");
        const double kp = param;
        if (!(kp > 0 && kp < 1)) throw SpecError("exotic witness: k' must lie in (0,1)");
        s.curve = EpbqCurve::exotic(complementary(kp), opt.alpha);
        s.decomp = decomposition_of_type(type);
        const auto sc = detail::within_block_scale(s.decomp);
        s.lambda.resize(s.decomp.n);
        for (int p = 0; p < s.decomp.n; ++p) {
            const double base = s.decomp.block_of[p] < 2 ? std::pow(kp, -0.5) : std::pow(kp, -0.25);
            // 1/0.85^r keeps |lambda| inside [base, 2 base] for blocks up to 5
            s.lambda[p] = base / sc[p];
        }
        s.g_within = detail::zero_within(s.decomp);
    } else if (fam == WitnessFamily::simplest) {
        int n = 0;
        for (int t : type) n += t;
        if (type.size() != 1) throw SpecError("simplest witnesses have a single block (type (n))");
        const double eta = param;
        if (!(eta > 0 && eta < 1)) throw SpecError("simplest witness: eta must lie in (0,1)");
        // g_pq = -c: c = 1/(n-1) is the regular-simplex degenerate Gram; moving
        // c across it flips the sign of det G
        s.curve = EpbqCurve::line();
        s.decomp = decomposition_of_type({n});
        for (int p = 0; p < n; ++p) s.lambda.push_back(p + 1.0);
        const double c0 = 1.0 / (n - 1);
        if (space == SpaceKind::spherical) s.g_within = detail::zero_within(s.decomp, -c0 * (1 - eta));
        if (space == SpaceKind::euclidean) s.g_within = detail::zero_within(s.decomp, -c0);
        if (space == SpaceKind::hyperbolic) {
            if (eta >= 1.0 / (n - 2)) throw SpecError("simplest hyperbolic witness: eta must be < 1/(n-2)");
            // the sum in (L2) is dominated by the null direction only close to
            // the crossing, so shrink eta until it holds
            for (double e = eta; e > eta * 1e-4; e /= 10) {
                s.g_within = detail::zero_within(s.decomp, -c0 * (1 + e));
                if (detail::kind_of(s) == Kind::hyperbolic) break;
            }
        }
    } else if (fam == WitnessFamily::rational) {
        s = detail::rational_spherical(type, param, opt.signs);
        if (space != SpaceKind::spherical) s = detail::cross_det(s, space, 0, 2.0 * 2.0 / param);
    } else {
        // near k = 1 the elliptic coefficients approach the rational ones under
        // mu_j = eps_j e^{2 sigma_j}, lambda_p = 1 / (2 lambda~_p e^{sigma_j})
        const auto d = decomposition_of_type(type);
        const int m = d.m();
        const int mp = opt.m_prime < 0 ? m : opt.m_prime;
        if (mp > m) throw SpecError("m_prime out of range");
        std::vector<int> signs(m);
        for (int j = 0; j < m; ++j) signs[j] = j < mp ? 1 : -1;
        const FlexSpec base = detail::rational_spherical(type, opt.delta, signs);
        const double kp = param;
        if (!(kp > 0 && kp < 1)) throw SpecError("elliptic witness: k' must lie in (0,1)");
        std::vector<double> sigma(m);
        for (int j = 0; j < m; ++j) sigma[j] = 0.5 * std::log(std::abs(base.curve.mu[j]));
        s.curve = EpbqCurve::elliptic(fam == WitnessFamily::elliptic1 ? Family::elliptic1 : Family::elliptic2,
                                      complementary(kp), sigma, mp);
        s.decomp = d;
        s.lambda.resize(d.n);
        for (int p = 0; p < d.n; ++p)
            s.lambda[p] = 1.0 / (2.0 * base.lambda[p] * std::exp(sigma[d.block_of[p]]));
        s.g_within = base.g_within;
        if (space != SpaceKind::spherical) s = detail::cross_det(s, space, 0, 2.0 * 2.0 / opt.delta);
    }
    s.space = space;
    const Kind k = detail::kind_of(s);
    if (k == Kind::none || space_of(k) != space)
        throw NotRealisableHereError(std::string("witness does not land in ") + to_string(space) +
                                     " space for these parameters");
    return s;
}

// Dimension of the parameter space theta, as published.
inline int family_dimension(Family f, const Decomposition& d) {
    int c2 = 0;
    for (const auto& b : d.blocks) c2 += static_cast<int>(b.size() * (b.size() - 1) / 2);
    switch (f) {
        case Family::line: return d.n * (d.n + 1) / 2;
        case Family::rational: return d.m() + d.n + c2;
        case Family::elliptic1:
        case Family::elliptic2: return 1 + d.m() + d.n + c2;
        case Family::exotic:
            if (d.m() != 3) throw SpecError("exotic families have exactly three blocks");
            return 4 + c2;
    }
    return 0;
}

// Raw count of the scalars a FlexSpec of this family carries.
inline int parameter_count(Family f, const Decomposition& d) {
    int c2 = 0;
    for (const auto& b : d.blocks) c2 += static_cast<int>(b.size() * (b.size() - 1) / 2);
    switch (f) {
        case Family::line: return d.n + c2;
        case Family::rational: return d.m() + d.n + c2;
        case Family::elliptic1:
        case Family::elliptic2: return 1 + d.m() + d.n + c2;
        case Family::exotic: return 1 + d.n + c2;
    }
    return 0;
}

}  // namespace flexcross

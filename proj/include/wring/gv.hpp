#pragma once

// Integrability, helicity and the Godbillon-Vey invariant of a bundle.
//
// eta is represented by its dual H, with A x H = W. Both supported choices
// have the form H = Y / D for smooth Y and D, so curl H is assembled from
// smooth spectral derivatives instead of differentiating the masked field:
//
//   curl(Y / D) = curl(Y) / D - grad(D) x Y / D^2
//
// which keeps Gibbs ringing from the excluded set out of the GV density.

#include <optional>
#include <string>

#include "defaults.hpp"
#include "fieldzoo.hpp"
#include "spectral.hpp"

namespace wring {

enum class EtaKind { Canonical, Velocity };

inline std::string to_string(EtaKind k) { return k == EtaKind::Canonical ? "canonical" : "velocity"; }

inline EtaKind parse_eta_kind(const std::string& s) {
    if (s == "canonical") return EtaKind::Canonical;
    if (s == "velocity") return EtaKind::Velocity;
    fail(ErrorKind::BadArgument, "eta choice must be 'canonical' or 'velocity'");
}

struct EtaChoice {
    EtaKind kind = EtaKind::Canonical;
    double eps = defaults().eta_eps;  // relative to max |denominator|

    void validate() const {
        if (!(eps >= 0.0 && eps < 1.0)) fail(ErrorKind::BadArgument, "eta eps must lie in [0, 1)");
    }
};

inline void to_json(json& j, const EtaChoice& c) { j = {{"kind", to_string(c.kind)}, {"eps", c.eps}}; }

struct GvTolerances {
    double integrability = defaults().integrability_tol;
    double flux = defaults().flux_tol;
    double irrotational_floor = defaults().irrotational_floor;
    double min_coverage = defaults().min_coverage;
};

inline void to_json(json& j, const GvTolerances& t) {
    j = {{"integrability", t.integrability},
         {"flux", t.flux},
         {"irrotational_floor", t.irrotational_floor},
         {"min_coverage", t.min_coverage}};
}

struct EtaSolution {
    EtaChoice choice;
    VectorField H;
    VectorField curl_H;
    ScalarField mask;               // 1 where H is defined
    double coverage = 0.0;          // volume fraction of the mask
    double irrotational_fraction = 0.0;  // part of the mask admitted with H = 0
    double identity_residual = 0.0;      // max |A x H - W| / max |W| on the mask

    double excluded_fraction() const { return 1.0 - coverage; }
};

/// max |A.W| / (max|A| max|W|); zero for an integrable potential.
inline double integrability_residual(const VectorField& A, const VectorField& W) {
    double a = A.max_norm(), w = W.max_norm();
    constexpr double floor = 1e-290;
    if (!(a > floor) || !(w > floor)) fail(ErrorKind::DegenerateField, "A or W vanishes identically");
    return dot(A, W).max_abs() / (a * w);
}

inline double integrability_residual(const FieldBundle& b) { return integrability_residual(b.A, b.W); }

/// Flux of W through the three coordinate 2-tori.
inline Vec3 flux_check(const VectorField& W) {
    const Grid3& g = W.grid();
    Vec3 out{};
    for (int a = 0; a < 3; ++a) {
        double area = g.volume() / g.box[a];
        out[a] = W[a].mean() * area;
    }
    return out;
}

inline Vec3 flux_check(const FieldBundle& b) { return flux_check(b.W); }

inline bool fluxless(const VectorField& W, double tol) {
    Vec3 f = flux_check(W);
    double w = W.max_norm();
    const Grid3& g = W.grid();
    for (int a = 0; a < 3; ++a)
        if (std::abs(f[a]) > tol * std::max(w, 1e-300) * g.volume() / g.box[a]) return false;
    return true;
}

/// Integral of U.W with the zero-mean velocity.
inline double helicity(const FieldBundle& b, double flux_tol = defaults().flux_tol,
                       InverseCurlTolerance velocity_tol = {}) {
    if (b.W.max_norm() == 0.0) return 0.0;
    if (!fluxless(b.W, flux_tol))
        fail(ErrorKind::FluxObstruction, "W has nonzero flux through a coordinate torus; helicity is gauge dependent");
    VectorField U = b.U ? *b.U : inverse_curl(b.W, velocity_tol);
    return integrate(dot(U, b.W));
}

namespace detail {

struct Ratio {
    VectorField Y;
    ScalarField D;
};

inline Ratio eta_ratio(const FieldBundle& b, EtaKind kind) {
    if (kind == EtaKind::Canonical) return {cross(b.W, b.A), dot(b.A, b.A)};
    VectorField U = velocity_of(b);
    return {cross(b.W, U), dot(U, b.A)};
}

}  // namespace detail

/// H = (W x A)/|A|^2 (canonical, orthogonal to A) or (W x U)/(U.A) (velocity),
/// restricted to where the denominator exceeds eps times its maximum. Points
/// where W itself vanishes admit H = 0 and count as covered.
inline EtaSolution solve_eta(const FieldBundle& b, EtaChoice choice, const GvTolerances& tol = {}) {
    choice.validate();
    const Grid3& g = b.grid;
    EtaSolution s;
    s.choice = choice;
    s.H = VectorField(g);
    s.curl_H = VectorField(g);
    s.mask = ScalarField(g);

    double wmax = b.W.max_norm();
    if (wmax == 0.0) {
        s.mask = ScalarField(g, 1.0);
        s.coverage = 1.0;
        s.irrotational_fraction = 1.0;
        return s;
    }
    double res = integrability_residual(b);
    if (res > tol.integrability)
        fail(ErrorKind::IntegrabilityFailure, "integrability residual exceeds tolerance; GV undefined");

    detail::Ratio r = detail::eta_ratio(b, choice.kind);
    VectorField curlY = curl(r.Y);
    VectorField gradD = grad(r.D);
    double thr = choice.eps * r.D.max_abs();
    double wfloor = tol.irrotational_floor * wmax;

    std::size_t covered = 0, irrot = 0;
    double ident = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        double d = r.D[p];
        Vec3 w = b.W.at(p);
        if (std::abs(d) > thr && d != 0.0) {
            Vec3 y = r.Y.at(p);
            Vec3 h = (1.0 / d) * y;
            Vec3 ch = (1.0 / d) * curlY.at(p) - (1.0 / (d * d)) * cross(gradD.at(p), y);
            s.H.set(p, h);
            s.curl_H.set(p, ch);
            s.mask[p] = 1.0;
            ++covered;
            ident = std::max(ident, norm(cross(b.A.at(p), h) - w));
        } else if (norm(w) <= wfloor) {
            s.mask[p] = 1.0;
            ++covered;
            ++irrot;
            ident = std::max(ident, norm(w));
        }
    }
    s.coverage = double(covered) / double(g.size());
    s.irrotational_fraction = double(irrot) / double(g.size());
    s.identity_residual = ident / wmax;
    if (s.coverage < tol.min_coverage)
        fail(ErrorKind::DenominatorVanishesEverywhere,
             "the " + to_string(choice.kind) + " eta denominator vanishes on " +
                 std::to_string(100.0 * (1.0 - s.coverage)) + "% of the domain");
    return s;
}

/// mask * H.curl(H)
inline ScalarField gv_density(const EtaSolution& s) {
    ScalarField d = dot(s.H, s.curl_H);
    for (std::size_t p = 0; p < d.data.size(); ++p) d[p] *= s.mask[p];
    return d;
}

struct GvResult {
    double gv = 0.0;
    ScalarField density;
    EtaSolution eta;
    std::optional<double> extrapolated;  // eps -> 0 Richardson estimate
};

inline GvResult gv_invariant(const FieldBundle& b, EtaChoice choice, const GvTolerances& tol = {},
                             bool richardson = false) {
    GvResult r;
    r.eta = solve_eta(b, choice, tol);
    r.density = gv_density(r.eta);
    r.gv = integrate(r.density);
    if (richardson && choice.eps > 0.0) {
        EtaChoice half = choice;
        half.eps *= 0.5;
        double g2 = integrate(gv_density(solve_eta(b, half, tol)));
        r.extrapolated = 2.0 * g2 - r.gv;
    }
    return r;
}

/// eta -> eta + f theta. The curl is updated by
/// curl(H + fA) = curl H + grad f x A + f W.
inline EtaSolution gauge_shift(const EtaSolution& s, const FieldBundle& b, const ScalarField& f) {
    if (f.grid != b.grid || s.H.grid() != b.grid) fail(ErrorKind::BadArgument, "gauge function is on a different grid");
    EtaSolution out = s;
    VectorField gf = grad(f);
    out.H += f * b.A;
    out.curl_H += cross(gf, b.A);
    out.curl_H += f * b.W;
    return out;
}

inline double gv_of(const EtaSolution& s) { return integrate(gv_density(s)); }

struct HelicalCompression {
    ScalarField density;  // h_N . curl h_N on the mask
    ScalarField mask;
    double coverage = 0.0;
    double integral = 0.0;  // diagnostic only; not equal to GV in general
};

/// h_N = (N.grad) N for N = A/|A|. With D = |A|^2, B = (A.grad)A and
/// q = (A.grad D)/2, h_N = B/D - q A/D^2, differentiated by the product rule.
inline HelicalCompression helical_compression(const FieldBundle& b, double eps = defaults().eta_eps,
                                              const GvTolerances& tol = {}) {
    if (!(eps >= 0.0 && eps < 1.0)) fail(ErrorKind::BadArgument, "eps must lie in [0, 1)");
    if (b.W.max_norm() > 0.0 && integrability_residual(b) > tol.integrability)
        fail(ErrorKind::IntegrabilityFailure, "integrability residual exceeds tolerance; GV undefined");
    const Grid3& g = b.grid;
    ScalarField D = dot(b.A, b.A);
    VectorField gradD = grad(D);
    std::array<VectorField, 3> gA{grad(b.A[0]), grad(b.A[1]), grad(b.A[2])};
    VectorField B(g);
    for (int i = 0; i < 3; ++i) B[i] = dot(b.A, gA[i]);
    ScalarField q = 0.5 * dot(b.A, gradD);
    VectorField curlB = curl(B);
    VectorField gradq = grad(q);

    HelicalCompression out;
    out.density = ScalarField(g);
    out.mask = ScalarField(g);
    double thr = eps * D.max_abs();
    double wfloor = tol.irrotational_floor * b.W.max_norm();
    std::size_t covered = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        double d = D[p];
        if (d > thr && d > 0.0) {
            Vec3 a = b.A.at(p), bb = B.at(p), gd = gradD.at(p);
            Vec3 h = (1.0 / d) * bb - (q[p] / (d * d)) * a;
            Vec3 curl_qa = cross(gradq.at(p), a) + q[p] * b.W.at(p);
            Vec3 ch = (1.0 / d) * curlB.at(p) - (1.0 / (d * d)) * cross(gd, bb) - (1.0 / (d * d)) * curl_qa +
                      (2.0 / (d * d * d)) * cross(gd, q[p] * a);
            out.density[p] = dot(h, ch);
            out.mask[p] = 1.0;
            ++covered;
        } else if (norm(b.W.at(p)) <= wfloor) {
            out.mask[p] = 1.0;
            ++covered;
        }
    }
    out.coverage = double(covered) / double(g.size());
    if (out.coverage < tol.min_coverage)
        fail(ErrorKind::DenominatorVanishesEverywhere, "|A| vanishes on too much of the domain");
    out.integral = integrate(out.density);
    return out;
}

// ---------------------------------------------------------------------------
// Reports

inline constexpr const char* kAnalysisSchema = "wring.analysis/1";

struct BoundData {
    double gv = 0.0;
    double C = 0.0;
    double enstrophy_rate = 0.0;
    double slack = 0.0;
    double energy = 0.0;
    double volume = 0.0;
    double length = 0.0;
    double lambda_min = 0.0;
    double approx_bound_rhs = 0.0;
    double delta_ratio = 0.0;  // max |U.A - 2E/V| * V / E
    double coverage = 0.0;
};

inline void to_json(json& j, const BoundData& b) {
    j = {{"gv", b.gv},
         {"C", b.C},
         {"enstrophy_rate", b.enstrophy_rate},
         {"slack", b.slack},
         {"E", b.energy},
         {"V", b.volume},
         {"L", b.length},
         {"lambda_min", b.lambda_min},
         {"approx_bound_rhs", b.approx_bound_rhs},
         {"delta_ratio", b.delta_ratio},
         {"coverage", b.coverage}};
}

struct AnalysisReport {
    std::string family;
    std::optional<double> helicity;
    std::string helicity_note;
    double integrability_residual = 0.0;
    bool integrable = false;
    std::optional<double> gv;
    std::optional<double> gv_extrapolated;
    ScalarField gv_density;
    double excluded_volume_fraction = 0.0;
    double identity_residual = 0.0;
    Vec3 flux_residuals{};
    std::optional<BoundData> bound;
    EtaChoice eta_choice;
    GvTolerances tolerances;
    json claims = json::object();
    std::string message;
};

inline json to_json(const AnalysisReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j = {{"schema", kAnalysisSchema},
              {"family", r.family},
              {"helicity", opt(r.helicity)},
              {"integrability_residual", r.integrability_residual},
              {"integrable", r.integrable},
              {"gv", opt(r.gv)},
              {"gv_extrapolated", opt(r.gv_extrapolated)},
              {"excluded_volume_fraction", r.excluded_volume_fraction},
              {"identity_residual", r.identity_residual},
              {"flux_residuals", r.flux_residuals},
              {"bound", r.bound ? json(*r.bound) : json(nullptr)},
              {"eta_choice", r.eta_choice},
              {"tolerances", r.tolerances},
              {"claims", r.claims}};
    if (!r.helicity_note.empty()) j["helicity_note"] = r.helicity_note;
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

struct AnalyzeOptions {
    EtaChoice choice;
    GvTolerances tol;
    bool richardson = false;
};

/// Everything except the dynamical bound. Never throws for non-integrable
/// input: the report carries integrable = false and a message instead.
inline AnalysisReport analyze(const FieldBundle& b, const AnalyzeOptions& opt = {}) {
    AnalysisReport r;
    r.family = b.meta.family;
    r.eta_choice = opt.choice;
    r.tolerances = opt.tol;
    r.flux_residuals = flux_check(b);

    if (b.W.max_norm() == 0.0) {
        r.helicity = 0.0;
        r.integrable = true;
        r.gv = 0.0;
        r.gv_density = ScalarField(b.grid);
        r.message = "irrotational field";
        return r;
    }

    if (fluxless(b.W, opt.tol.flux))
        r.helicity = integrate(dot(velocity_of(b), b.W));
    else
        r.helicity_note = "W carries flux through a coordinate torus; helicity is gauge dependent";

    r.integrability_residual = integrability_residual(b);
    r.integrable = r.integrability_residual <= opt.tol.integrability;
    if (!r.integrable) {
        r.message = "integrability residual exceeds tolerance; GV undefined";
        r.gv_density = ScalarField(b.grid);
    } else {
        GvResult g = gv_invariant(b, opt.choice, opt.tol, opt.richardson);
        r.gv = g.gv;
        r.gv_extrapolated = g.extrapolated;
        r.gv_density = std::move(g.density);
        r.excluded_volume_fraction = g.eta.excluded_fraction();
        r.identity_residual = g.eta.identity_residual;
    }

    if (b.meta.gv_claim && r.gv)
        r.claims["gv"] = {{"claimed", *b.meta.gv_claim}, {"deviation", *r.gv - *b.meta.gv_claim}};
    if (b.meta.helicity_claim && r.helicity)
        r.claims["helicity"] = {{"claimed", *b.meta.helicity_claim},
                                {"deviation", *r.helicity - *b.meta.helicity_claim}};
    if (b.meta.claims_integrable)
        r.claims["integrable"] = {{"claimed", true}, {"holds", r.integrable}};
    return r;
}

}  // namespace wring

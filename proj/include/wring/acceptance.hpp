#pragma once

// End-to-end acceptance criteria. Each criterion builds its own bundles,
// measures, and reports pass/fail with the measured values. Resolutions can
// be forced lower; criteria that then run below their stated resolution are
// marked degraded, and a degraded failure is reported as expected.

#include <chrono>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "linkref.hpp"

namespace wring {

struct AcceptanceConfig {
    int n_gate = 32;    // integrability gate
    int n_base = 64;    // most invariants
    int n_fine = 96;    // diffeo invariance, ring helicity
    int n_coarse = 48;  // convergence partner of n_fine; conservation-law study

    /// Force every resolution from one value (n_fine = 1.5 n, n_coarse = n_fine / 2).
    static AcceptanceConfig forced(int n) {
        auto even = [](int v) { return std::max(8, v + (v & 1)); };
        AcceptanceConfig c;
        c.n_gate = even(n);
        c.n_base = even(n);
        c.n_fine = even(n * 3 / 2);
        c.n_coarse = even(c.n_fine / 2);
        return c;
    }
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool degraded = false;  // ran below the stated resolution
    std::string detail;
    json measured = json::object();
    double seconds = 0.0;

    bool expected_fail() const { return !pass && degraded; }
    std::string status() const { return pass ? "PASS" : (degraded ? "XFAIL" : "FAIL"); }
};

inline void to_json(json& j, const CriterionResult& r) {
    j = {{"id", r.id},         {"name", r.name},         {"status", r.status()},
         {"degraded", r.degraded}, {"detail", r.detail}, {"measured", r.measured},
         {"seconds", r.seconds}};
}

namespace acceptance {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Check {
    bool ok = true;
    std::ostringstream note;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            note << (note.tellp() > 0 ? "; " : "") << "FAILED " << what;
        }
    }
};

inline CriterionResult started(int id, std::string name) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

inline double roundoff_floor() { return 1e-12; }

/// A discrepancy "shrinks" under refinement if it drops by the factor, or
/// if it already sits at double-precision roundoff at both resolutions
/// (where no rate is observable).
inline bool shrinks(double coarse, double fine, double factor, double scale) {
    coarse = std::abs(coarse);
    fine = std::abs(fine);
    double floor = roundoff_floor() * std::max(1.0, scale);
    if (coarse <= floor && fine <= floor) return true;
    return fine * factor <= coarse;
}

// 1 ------------------------------------------------------------------------
inline CriterionResult integrability_gate(const AcceptanceConfig& c) {
    CriterionResult r = started(1, "integrability gate");
    r.degraded = c.n_gate < 32;
    Grid3 g = Grid3::cube(c.n_gate);
    Check ck;
    std::vector<std::pair<std::string, FieldBundle>> fams = {
        {"clebsch", gen_clebsch_default(g)},
        {"clebsch_offset", gen_clebsch_default(g, clebsch_offset_phase())},
        {"morse", gen_morse(g)},
        {"kupka", gen_kupka_tube(g)}};
    double worst = 0.0;
    for (auto& [name, b] : fams) {
        double res = integrability_residual(b);
        r.measured[name] = res;
        worst = std::max(worst, res);
        ck.expect(res < 1e-10, name + " residual " + fmt(res) + " < 1e-10");
    }
    FieldBundle abc = gen_beltrami_abc(g, 1, 1, 1);
    double res = integrability_residual(abc);
    AnalysisReport rep = analyze(abc);
    r.measured["abc"] = res;
    ck.expect(res > 0.1, "abc residual " + fmt(res) + " > 0.1");
    ck.expect(!rep.integrable && !rep.gv, "analyze refuses GV for abc");
    ck.expect(rep.message == "integrability residual exceeds tolerance; GV undefined", "refusal message");
    ck.expect(exit_code(ErrorKind::IntegrabilityFailure) == 4, "refusal maps to exit 4");
    r.pass = ck.ok;
    r.detail = "max integrable residual " + fmt(worst) + ", abc " + fmt(res) + ", GV refused " + ck.note.str();
    return r;
}

// 2 ------------------------------------------------------------------------
inline CriterionResult first_integral_gv(const AcceptanceConfig& c) {
    CriterionResult r = started(2, "GV = 0 for first-integral fields");
    r.degraded = c.n_base < 64;
    Grid3 g = Grid3::cube(c.n_base);
    Check ck;
    std::vector<std::pair<std::string, FieldBundle>> fams = {
        {"clebsch", gen_clebsch_default(g)},
        {"clebsch_offset", gen_clebsch_default(g, clebsch_offset_phase())},
        {"sheared_clebsch", gen_sheared_clebsch(g)},
        {"morse", gen_morse(g)}};
    double worst = 0.0;
    for (auto& [name, b] : fams)
        for (EtaKind k : {EtaKind::Canonical, EtaKind::Velocity}) {
            double v = gv_invariant(b, {k, defaults().eta_eps}).gv;
            r.measured[name][to_string(k)] = v;
            worst = std::max(worst, std::abs(v));
            ck.expect(std::abs(v) < 1e-6, name + "/" + to_string(k) + " |GV| " + fmt(v) + " < 1e-6");
        }
    r.pass = ck.ok;
    r.detail = "max |GV| " + fmt(worst) + " over 4 bundles x 2 eta choices " + ck.note.str();
    return r;
}

// 3 ------------------------------------------------------------------------
inline CriterionResult kupka_eps_stability(const AcceptanceConfig& c) {
    CriterionResult r = started(3, "Kupka eps-stability");
    r.degraded = c.n_base < 64;
    FieldBundle b = gen_kupka_tube(Grid3::cube(c.n_base));
    Check ck;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, worst = 0.0;
    for (double eps : {0.02, 0.05, 0.1, 0.2}) {
        double v = gv_invariant(b, {EtaKind::Canonical, eps}).gv;
        r.measured[fmt(eps)] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        worst = std::max(worst, std::abs(v));
        ck.expect(std::abs(v) < 1e-6, "eps " + fmt(eps) + " |GV| " + fmt(v) + " < 1e-6");
    }
    ck.expect(hi - lo < 1e-7, "eps variation " + fmt(hi - lo) + " < 1e-7");
    r.pass = ck.ok;
    r.detail = "max |GV_eps| " + fmt(worst) + ", variation " + fmt(hi - lo) + " " + ck.note.str();
    return r;
}

// 4 ------------------------------------------------------------------------
inline CriterionResult gauge_invariance(const AcceptanceConfig& c) {
    CriterionResult r = started(4, "gauge invariance");
    r.degraded = c.n_base < 64;
    Grid3 g = Grid3::cube(c.n_base);
    FieldBundle b = gen_sheared_clebsch(g);
    EtaSolution eta = solve_eta(b, {});
    double base = gv_of(eta);
    std::mt19937_64 rng(20200417);
    Check ck;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        TrigSeries fs = random_band_limited(rng, 3, 4);
        ScalarField f = sample(g, [&](const Vec3& x) { return fs.value(g, x); });
        double d = gv_of(gauge_shift(eta, b, f)) - base;
        worst = std::max(worst, std::abs(d));
        ck.expect(std::abs(d) < 1e-6, "shift " + std::to_string(i) + " |dGV| " + fmt(d));
    }
    r.measured = {{"gv", base}, {"max_shift", worst}};
    r.pass = ck.ok;
    r.detail = "20 random f, max |GV(H + fA) - GV(H)| " + fmt(worst) + " " + ck.note.str();
    return r;
}

// 5 ------------------------------------------------------------------------
inline CriterionResult eta_choice_agreement(const AcceptanceConfig& c) {
    CriterionResult r = started(5, "eta-choice agreement");
    r.degraded = c.n_base < 64;
    Grid3 g = Grid3::cube(c.n_base);
    std::vector<std::pair<std::string, FieldBundle>> fams = {
        {"clebsch", gen_clebsch_default(g)},
        {"clebsch_offset", gen_clebsch_default(g, clebsch_offset_phase())},
        {"sheared_clebsch", gen_sheared_clebsch(g)},
        {"morse", gen_morse(g)},
        {"kupka", gen_kupka_tube(g)}};
    Check ck;
    int eligible = 0;
    double worst = 0.0;
    for (auto& [name, b] : fams) {
        GvResult gc = gv_invariant(b, {EtaKind::Canonical, defaults().eta_eps});
        GvResult gvv = gv_invariant(b, {EtaKind::Velocity, defaults().eta_eps});
        double cov = std::min(gc.eta.coverage, gvv.eta.coverage);
        double d = gc.gv - gvv.gv;
        r.measured[name] = {{"coverage", cov}, {"difference", d}};
        if (cov <= 0.99) continue;
        ++eligible;
        worst = std::max(worst, std::abs(d));
        ck.expect(std::abs(d) < 1e-5, name + " |dGV| " + fmt(d) + " < 1e-5");
    }
    ck.expect(eligible >= 2, "at least two bundles with > 99% coverage");
    r.pass = ck.ok;
    r.detail = std::to_string(eligible) + " eligible bundles, max |GV_can - GV_vel| " + fmt(worst) + " " +
               ck.note.str();
    return r;
}

// 6 ------------------------------------------------------------------------
inline CriterionResult diffeo_invariance(const AcceptanceConfig& c) {
    CriterionResult r = started(6, "diffeo invariance");
    r.degraded = c.n_fine < 96;
    DiffeoMap map{{Shear{0, 2, 0.3, 1}, Shear{2, 1, 0.3, 1}}};
    Check ck;

    // GV leg: integrable bundles whose GV is known.
    json per_family = json::object();
    auto gv_delta = [&](int n) {
        Grid3 g = Grid3::cube(n);
        double worst = 0.0;
        std::vector<std::pair<std::string, FieldBundle>> fams = {
            {"sheared_clebsch", gen_sheared_clebsch(g)}, {"morse", gen_morse(g)}, {"kupka", gen_kupka_tube(g)}};
        for (auto& [name, b] : fams) {
            double before = gv_invariant(b, {}).gv;
            double after = gv_invariant(apply_diffeo(b, map), {}).gv;
            per_family[name].push_back(after - before);
            worst = std::max(worst, std::abs(after - before));
        }
        return worst;
    };
    // Helicity leg: Hopf-linked tubes, which are only marginally resolved on
    // the coarse grid. The pointwise preconditions are relaxed here because
    // the point of the study is to watch the discretisation error shrink.
    auto h_delta = [&](int n, double& h0) {
        Grid3 g = Grid3::cube(n);
        FieldBundle b = gen_linked_rings(g, hopf_rings(), defaults().ring_core_radius, {1.0, 1.0});
        FieldBundle s = apply_diffeo(b, map, 1.0);
        InverseCurlTolerance loose{1e-6, 1.0};
        h0 = helicity(b);
        double h1 = helicity(s, 1e-6, loose);
        return (h1 - h0) / (1.0 + std::abs(h0));
    };

    double gv_c = gv_delta(c.n_coarse), gv_f = gv_delta(c.n_fine);
    double h0c = 0, h0f = 0;
    double hc = h_delta(c.n_coarse, h0c), hf = h_delta(c.n_fine, h0f);
    r.measured = {{"n", {c.n_coarse, c.n_fine}},
                  {"gv_delta", {gv_c, gv_f}},
                  {"helicity_delta", {hc, hf}},
                  {"helicity", {h0c, h0f}},
                  {"gv_delta_by_family", per_family}};
    ck.expect(gv_f < 1e-4, "|dGV| " + fmt(gv_f) + " < 1e-4");
    ck.expect(std::abs(hf) < 1e-4, "|dH|/(1+|H|) " + fmt(hf) + " < 1e-4");
    ck.expect(shrinks(gv_c, gv_f, 4.0, 1.0), "GV discrepancy shrinks 4x");
    ck.expect(shrinks(hc, hf, 4.0, 1.0), "helicity discrepancy shrinks 4x");
    r.pass = ck.ok;
    bool gv_floor = gv_c <= roundoff_floor() && gv_f <= roundoff_floor();
    r.detail = "n=" + std::to_string(c.n_coarse) + "/" + std::to_string(c.n_fine) + ": |dGV| " + fmt(gv_c) + " -> " +
               fmt(gv_f) + (gv_floor ? " (roundoff at both)" : "") + ", |dH|/(1+|H|) " + fmt(std::abs(hc)) +
               " -> " + fmt(std::abs(hf)) + " " + ck.note.str();
    if (r.degraded && !r.pass) r.detail += " (degraded resolution)";
    return r;
}

// 7 ------------------------------------------------------------------------
inline CriterionResult helicity_closed_forms(const AcceptanceConfig& c) {
    CriterionResult r = started(7, "helicity closed forms");
    r.degraded = c.n_fine < 96;
    Check ck;
    FieldBundle abc = gen_beltrami_abc(Grid3::cube(c.n_base), 1, 1, 1);
    double target = 3.0 * std::pow(2.0 * std::numbers::pi, 3);
    double habc = helicity(abc);
    double rel = std::abs(habc - target) / target;
    ck.expect(rel < 1e-8, "abc relative error " + fmt(rel) + " < 1e-8");

    FieldBundle rings = gen_linked_rings(Grid3::cube(c.n_fine), hopf_rings(), defaults().ring_core_radius, {1, 1});
    double hr = helicity(rings);
    LinkHelicities lh = linking_helicities(hopf_pair(1.0, 1.0));
    double rrel = std::abs(hr - 2.0) / 2.0;
    ck.expect(rrel < 0.02, "Hopf rings helicity " + fmt(hr) + " within 2% of 2");
    ck.expect(lh.total == 2.0 && *rings.meta.helicity_claim == lh.total, "linking-matrix total 2 matches generator");
    double xrel = std::abs(hr - lh.total) / std::abs(lh.total);
    ck.expect(xrel < 0.02, "rings vs linking_helicities " + fmt(xrel));
    r.measured = {{"abc", habc}, {"abc_target", target}, {"rings", hr}, {"linking_total", lh.total}};
    r.pass = ck.ok;
    r.detail = "ABC rel err " + fmt(rel) + ", Hopf rings " + fmt(hr) + " vs " + fmt(lh.total) + " " + ck.note.str();
    return r;
}

// 8 ------------------------------------------------------------------------
inline CriterionResult obstruction_bound_holds(const AcceptanceConfig& c) {
    CriterionResult r = started(8, "steady-flow obstruction bound");
    r.degraded = c.n_base < 64;
    Grid3 g = Grid3::cube(c.n_base);
    std::vector<std::pair<std::string, FieldBundle>> fams = {
        {"clebsch", gen_clebsch_default(g)},
        {"clebsch_offset", gen_clebsch_default(g, clebsch_offset_phase())},
        {"sheared_clebsch", gen_sheared_clebsch(g)},
        {"sheared_clebsch_fine", gen_sheared_clebsch(Grid3::cube(c.n_fine))},
        {"morse", gen_morse(g)},
        {"kupka", gen_kupka_tube(g)}};
    Check ck;
    int steady = 0;
    for (auto& [name, b] : fams) {
        BoundReport br = obstruction_bound(b);
        const BoundData& d = br.data;
        r.measured[name] = d;
        ck.expect(d.slack >= -1e-10 * d.C * d.enstrophy_rate, name + " slack " + fmt(d.slack));
        if (d.enstrophy_rate < 1e-12) {
            ++steady;
            ck.expect(std::abs(d.gv) < 1e-6, name + " steady but |GV| " + fmt(d.gv));
        }
    }
    r.pass = ck.ok;
    r.detail = std::to_string(fams.size()) + " bundles, slack >= 0 for all, " + std::to_string(steady) +
               " steady with GV = 0 " + ck.note.str();
    return r;
}

// 9 ------------------------------------------------------------------------
inline CriterionResult euler_conservation(const AcceptanceConfig& c) {
    CriterionResult r = started(9, "conservation under Euler flow");
    r.degraded = c.n_base < 64;
    EvolutionOptions opt;
    opt.cfl = 0.4;
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(c.n_base)), opt);
    const double T = 0.5;
    int steps = int(std::ceil(T / s.dt - 1e-12));
    s.dt = T / steps;
    auto series = track_invariants(s, steps, 1);
    const auto& a = series.front();
    double dh = 0, gvmax = 0, de = 0, drift = 0;
    for (const auto& x : series) {
        dh = std::max(dh, std::abs(x.helicity - a.helicity));
        gvmax = std::max(gvmax, std::isnan(x.gv) ? std::numeric_limits<double>::infinity() : std::abs(x.gv));
        de = std::max(de, std::abs(x.energy - a.energy) / a.energy);
        drift = std::max(drift, x.curl_drift);
    }
    Check ck;
    ck.expect(dh < 1e-6, "helicity drift " + fmt(dh));
    ck.expect(gvmax < 1e-4, "max |GV(t)| " + fmt(gvmax));
    ck.expect(de < 1e-8, "relative energy drift " + fmt(de));
    ck.expect(drift < 1e-6, "curl consistency drift " + fmt(drift));
    r.measured = {{"steps", steps},   {"dt", s.dt},         {"helicity_drift", dh},
                  {"max_abs_gv", gvmax}, {"energy_drift", de}, {"curl_drift", drift}};
    r.pass = ck.ok;
    r.detail = std::to_string(steps) + " steps: dH " + fmt(dh) + ", max|GV| " + fmt(gvmax) + ", dE/E " + fmt(de) +
               ", drift " + fmt(drift) + " " + ck.note.str();
    return r;
}

// 10 -----------------------------------------------------------------------
inline CriterionResult local_conservation_law(const AcceptanceConfig& c) {
    CriterionResult r = started(10, "local conservation law");
    r.degraded = c.n_coarse < 48;
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(c.n_coarse)));
    std::vector<double> dts{0.02, 0.01, 0.005}, maxr;
    double div_int = 0.0, rate = 0.0;
    for (double dt : dts) {
        ConservationResidual cr = conservation_residual(s, dt);
        maxr.push_back(cr.max_residual);
        div_int = std::max(div_int, std::abs(cr.div_kW_integral));
        rate = cr.max_rate;
    }
    Check ck;
    std::vector<double> orders;
    for (std::size_t i = 1; i < maxr.size(); ++i) {
        double p = std::log2(maxr[i - 1] / maxr[i]);
        orders.push_back(p);
        ck.expect(p >= 1.8 && p <= 2.2, "observed order " + fmt(p) + " in [1.8, 2.2]");
    }
    ck.expect(div_int < 1e-12, "integral of div(kW) " + fmt(div_int) + " < 1e-12");
    r.measured = {{"dt", dts}, {"max_residual", maxr}, {"orders", orders}, {"div_kW_integral", div_int},
                  {"max_rate", rate}};
    r.pass = ck.ok;
    r.detail = "max|R| " + fmt(maxr[0]) + " -> " + fmt(maxr[1]) + " -> " + fmt(maxr[2]) + " (orders " +
               fmt(orders[0]) + ", " + fmt(orders[1]) + "), |int div(kW)| " + fmt(div_int) + " " + ck.note.str();
    return r;
}

// 11 -----------------------------------------------------------------------
inline CriterionResult thurston_formula(const AcceptanceConfig&) {
    CriterionResult r = started(11, "Thurston formula");
    Check ck;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double gv = thurston_gv({3, {1, 1, 1}});
    ck.expect(std::abs(gv + 8.0 * pi2) < 1e-12, "GV(1,1,1) = -8 pi^2");
    std::vector<double> phi{1, 1, 1};
    FluxSlopes fs = flux_slopes(phi);
    ck.expect(fs.slopes.slopes == std::vector<double>{-0.5, -1.0, -1.0}, "flux slopes (-1/2, -1, -1)");
    ck.expect(fs.identity_residual == -4.0, "literal identity residual -4");
    r.measured = {{"gv", gv}, {"slopes", fs.slopes.slopes}, {"identity_residual", fs.identity_residual}};
    r.pass = ck.ok;
    r.detail = "GV " + fmt(gv) + ", slopes (-1/2, -1, -1), identity residual " + fmt(fs.identity_residual) +
               " (printed identity does not hold) " + ck.note.str();
    return r;
}

// 12 -----------------------------------------------------------------------
inline CriterionResult gauss_linking_checks(const AcceptanceConfig&) {
    CriterionResult r = started(12, "Gauss linking");
    CurveSet hp = hopf_pair(1.0, 1.0, 256);
    LinkingNumber ab = gauss_linking(hp.curves[0], hp.curves[1]);
    LinkingNumber ba = gauss_linking(hp.curves[1], hp.curves[0]);
    LinkingNumber rev = gauss_linking(hp.curves[0], reversed(hp.curves[1]));
    Check ck;
    ck.expect(std::abs(ab.value - 1.0) < 1e-3, "Lk " + fmt(ab.value) + " = 1 +- 1e-3");
    ck.expect(std::abs(ab.value - ba.value) < 1e-10, "symmetry");
    ck.expect(std::abs(rev.value + 1.0) < 1e-3, "reversed Lk " + fmt(rev.value) + " = -1 +- 1e-3");
    r.measured = {{"lk", ab.value}, {"lk_swapped", ba.value}, {"lk_reversed", rev.value}};
    r.pass = ck.ok;
    char buf[128];
    std::snprintf(buf, sizeof buf, "Lk %.6f, swapped %.6f, reversed %.6f ", ab.value, ba.value, rev.value);
    r.detail = buf + ck.note.str();
    return r;
}

}  // namespace acceptance

using CriterionFn = std::function<CriterionResult(const AcceptanceConfig&)>;

struct CriterionSpec {
    int id;
    const char* name;
    int AcceptanceConfig::*resolution;  // the grid the criterion is stated at, or null
    int stated;
    CriterionFn run;
};

inline const std::vector<CriterionSpec>& acceptance_criteria() {
    using namespace acceptance;
    using C = AcceptanceConfig;
    static const std::vector<CriterionSpec> all = {
        {1, "integrability gate", &C::n_gate, 32, integrability_gate},
        {2, "GV = 0 for first-integral fields", &C::n_base, 64, first_integral_gv},
        {3, "Kupka eps-stability", &C::n_base, 64, kupka_eps_stability},
        {4, "gauge invariance", &C::n_base, 64, gauge_invariance},
        {5, "eta-choice agreement", &C::n_base, 64, eta_choice_agreement},
        {6, "diffeo invariance", &C::n_fine, 96, diffeo_invariance},
        {7, "helicity closed forms", &C::n_fine, 96, helicity_closed_forms},
        {8, "steady-flow obstruction bound", &C::n_base, 64, obstruction_bound_holds},
        {9, "conservation under Euler flow", &C::n_base, 64, euler_conservation},
        {10, "local conservation law", &C::n_coarse, 48, local_conservation_law},
        {11, "Thurston formula", nullptr, 0, thurston_formula},
        {12, "Gauss linking", nullptr, 0, gauss_linking_checks},
    };
    return all;
}

/// Run one criterion, converting unexpected errors into a failure line.
inline CriterionResult run_criterion(int id, const AcceptanceConfig& cfg) {
    const auto& all = acceptance_criteria();
    if (id < 1 || id > int(all.size())) fail(ErrorKind::BadArgument, "no acceptance criterion " + std::to_string(id));
    const CriterionSpec& spec = all[id - 1];
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = spec.run(cfg);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.name = spec.name;
    r.degraded = spec.resolution && cfg.*spec.resolution < spec.stated;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::string format_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "[%-5s] %2d %-32s %7.2fs  ", r.status().c_str(), r.id, r.name.c_str(), r.seconds);
    return head + r.detail;
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg, std::ostream* log = nullptr) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= int(acceptance_criteria().size()); ++id) {
        out.push_back(run_criterion(id, cfg));
        if (log) *log << format_line(out.back()) << std::endl;
    }
    return out;
}

inline bool all_passed(const std::vector<CriterionResult>& rs, bool allow_expected_fail = true) {
    for (const auto& r : rs)
        if (!r.pass && !(allow_expected_fail && r.expected_fail())) return false;
    return true;
}

}  // namespace wring

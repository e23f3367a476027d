#pragma once

// Ideal-fluid evolution of the pair (W, A), the steady-flow obstruction
// bound and the local conservation law for the GV density.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gv.hpp"

namespace wring {

/// Pointwise W x U with the 2/3 rule applied to the product.
inline VectorField lamb_vector(const VectorField& W, const VectorField& U) { return dealias(cross(W, U)); }

/// dW/dt = -curl(W x U)
inline VectorField vorticity_rate(const FieldBundle& b) {
    VectorField U = velocity_of(b);
    return -1.0 * curl(lamb_vector(b.W, U));
}

/// Pi = P + U^2/2 with zero mean, from lap(Pi) = -div(W x U).
inline ScalarField bernoulli_head(const FieldBundle& b) {
    VectorField U = velocity_of(b);
    return -1.0 * inverse_laplacian(div(lamb_vector(b.W, U)));
}

struct BoundReport {
    BoundData data;
    bool holds = true;  // slack >= -tol * C * rate
    double tolerance = 1e-10;
};

/// GV^2 <= C * int |dW/dt|^2 with C = int |W x U|^2 / (U.A)^4 over the
/// velocity-choice mask. The GV used here is that of the velocity choice, whose
/// density equals -(W x U).(dW/dt) / (U.A)^2 pointwise.
inline BoundReport obstruction_bound(const FieldBundle& b, double eps = defaults().eta_eps,
                                     const GvTolerances& tol = {}, double slack_tol = 1e-10) {
    const Grid3& g = b.grid;
    VectorField U = velocity_of(b);
    FieldBundle bu = b;
    bu.U = U;

    EtaSolution eta;
    try {
        eta = solve_eta(bu, EtaChoice{EtaKind::Velocity, eps}, tol);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::DenominatorVanishesEverywhere)
            fail(ErrorKind::MaskTooSmall, "U.A vanishes on too much of the domain; the bound constant is undefined");
        throw;
    }

    VectorField X = cross(b.W, U);
    ScalarField D = dot(U, b.A);
    // Irrotational points are admitted to the mask with H = 0; they carry no
    // density, and X^2 / D^4 there is a ratio of roundoff.
    ScalarField cint(g);
    double thr = eps * D.max_abs();
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (eta.mask[p] == 0.0 || !(std::abs(D[p]) > thr) || D[p] == 0.0) continue;
        double x2 = dot(X.at(p), X.at(p));
        if (x2 == 0.0) continue;
        double d2 = D[p] * D[p];
        cint[p] = x2 / (d2 * d2);
    }

    BoundReport r;
    r.tolerance = slack_tol;
    BoundData& d = r.data;
    d.coverage = eta.coverage;
    d.gv = gv_of(eta);
    d.C = integrate(cint);
    d.enstrophy_rate = integrate(norm_squared(-1.0 * curl(lamb_vector(b.W, U))));
    d.slack = d.C * d.enstrophy_rate - d.gv * d.gv;
    d.energy = 0.5 * integrate(norm_squared(U));
    if (!(d.energy > 0.0)) fail(ErrorKind::DegenerateField, "kinetic energy vanishes");
    d.volume = g.volume();
    d.lambda_min = std::pow(2.0 * std::numbers::pi / g.max_length(), 2);
    double l7 = d.volume * d.volume / std::sqrt(d.lambda_min);
    d.length = std::pow(l7, 1.0 / 7.0);
    d.approx_bound_rhs = l7 / (4.0 * d.energy * d.energy) * d.enstrophy_rate;
    double mean_density = 2.0 * d.energy / d.volume;
    double dmax = 0.0;
    for (double v : D.data) dmax = std::max(dmax, std::abs(v - mean_density));
    d.delta_ratio = dmax * d.volume / d.energy;
    r.holds = d.slack >= -slack_tol * d.C * d.enstrophy_rate;
    return r;
}

// ---------------------------------------------------------------------------
// Time stepping

struct EvolutionOptions {
    double dt = 0.0;  // 0 selects cfl * h / max|U|
    double cfl = defaults().cfl;
    double cfl_max = defaults().cfl_max;
    bool dealias = true;
    bool reproject = false;
    double drift_bound = defaults().drift_bound;
};

struct EvolutionState {
    FieldBundle bundle;  // U kept consistent with W
    double t = 0.0;
    double dt = 0.0;
    EvolutionOptions opt;
    double drift = 0.0;  // |curl A - W| / |W|
};

namespace detail {

struct Tendency {
    VectorField dW;
    VectorField dA;
};

/// Cartan form of the co-state transport: dA/dt = -(W x U) - grad(U.A),
/// equal to -(U.grad)A_i - A_j grad_i U_j when curl A = W. Its curl is
/// exactly the vorticity tendency, so curl A - W is preserved to roundoff.
inline Tendency tendency(const VectorField& W, const VectorField& A, bool dealiased) {
    VectorField U = biot_savart(W);
    VectorField X = cross(W, U);
    ScalarField ua = dot(U, A);
    if (dealiased) {
        X = dealias(X);
        ua = dealias(ua);
    }
    Tendency t{-1.0 * curl(X), -1.0 * X};
    t.dA -= grad(ua);
    return t;
}

inline double cfl_number(const VectorField& U, double dt) {
    return std::abs(dt) * U.max_norm() / U.grid().min_spacing();
}

}  // namespace detail

/// Prepare a state. With dealiasing on, A and W are first truncated to the
/// 2/3-rule box so the semi-discrete system conserves energy and helicity.
inline EvolutionState make_state(FieldBundle b, const EvolutionOptions& opt = {}) {
    if (!fluxless(b.W, defaults().flux_tol))
        fail(ErrorKind::FluxObstruction, "evolution needs a vorticity field without net flux");
    if (opt.dealias) {
        b.A = dealias(b.A);
        b.W = dealias(b.W);
    }
    b.U = inverse_curl(b.W);
    EvolutionState s;
    s.opt = opt;
    double umax = b.U->max_norm();
    if (opt.dt != 0.0) {
        s.dt = opt.dt;
    } else {
        if (umax == 0.0) fail(ErrorKind::BadArgument, "no velocity to set a CFL step from; pass dt");
        s.dt = opt.cfl * b.grid.min_spacing() / umax;
    }
    if (!(std::isfinite(s.dt)) || s.dt == 0.0) fail(ErrorKind::BadArgument, "time step must be finite and nonzero");
    s.drift = curl_residual(b.A, b.W);
    s.bundle = std::move(b);
    return s;
}

/// One classical RK4 step of size dt (negative dt runs backwards).
inline EvolutionState step(const EvolutionState& s, std::optional<double> dt_override = std::nullopt) {
    double dt = dt_override.value_or(s.dt);
    const FieldBundle& b = s.bundle;
    VectorField U0 = b.U ? *b.U : biot_savart(b.W);
    double cfl = detail::cfl_number(U0, dt);
    if (!(cfl < s.opt.cfl_max))
        fail(ErrorKind::CflViolation, "CFL number " + std::to_string(cfl) + " exceeds " + std::to_string(s.opt.cfl_max));

    bool dl = s.opt.dealias;
    auto k1 = detail::tendency(b.W, b.A, dl);
    auto k2 = detail::tendency(b.W + (0.5 * dt) * k1.dW, b.A + (0.5 * dt) * k1.dA, dl);
    auto k3 = detail::tendency(b.W + (0.5 * dt) * k2.dW, b.A + (0.5 * dt) * k2.dA, dl);
    auto k4 = detail::tendency(b.W + dt * k3.dW, b.A + dt * k3.dA, dl);

    EvolutionState out = s;
    FieldBundle& nb = out.bundle;
    double c = dt / 6.0;
    nb.W = b.W + c * (k1.dW + 2.0 * k2.dW + 2.0 * k3.dW + k4.dW);
    nb.A = b.A + c * (k1.dA + 2.0 * k2.dA + 2.0 * k3.dA + k4.dA);
    require_finite(nb.W, "evolved vorticity");
    require_finite(nb.A, "evolved potential");

    out.drift = curl_residual(nb.A, nb.W);
    if (out.drift > s.opt.drift_bound) {
        if (!s.opt.reproject)
            fail(ErrorKind::DriftExceeded, "curl(A) - W drift " + std::to_string(out.drift) + " exceeds the bound");
        nb.A += biot_savart(nb.W - curl(nb.A));
        out.drift = curl_residual(nb.A, nb.W);
    }
    nb.U = biot_savart(nb.W);
    out.t = s.t + dt;
    return out;
}

struct InvariantSample {
    double t = 0.0;
    double helicity = 0.0;
    double gv = 0.0;  // NaN when theta is not integrable
    double energy = 0.0;
    double enstrophy = 0.0;
    double integrability_residual = 0.0;
    double curl_drift = 0.0;
};

inline InvariantSample sample_invariants(const EvolutionState& s, EtaChoice choice = {}) {
    const FieldBundle& b = s.bundle;
    VectorField U = b.U ? *b.U : biot_savart(b.W);
    InvariantSample r;
    r.t = s.t;
    r.helicity = integrate(dot(U, b.W));
    r.energy = 0.5 * integrate(norm_squared(U));
    r.enstrophy = integrate(norm_squared(b.W));
    r.curl_drift = s.drift;
    r.gv = std::numeric_limits<double>::quiet_NaN();
    if (b.W.max_norm() == 0.0) {
        r.gv = 0.0;
        return r;
    }
    r.integrability_residual = integrability_residual(b);
    try {
        r.gv = gv_invariant(b, choice).gv;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::IntegrabilityFailure && e.kind() != ErrorKind::DenominatorVanishesEverywhere)
            throw;
    }
    return r;
}

/// Advance `steps` steps, sampling at t0 and every `record_every` steps
/// (and at the end). The state is advanced in place.
inline std::vector<InvariantSample> track_invariants(EvolutionState& s, int steps, int record_every = 1,
                                                     EtaChoice choice = {}) {
    if (steps < 0 || record_every < 1) fail(ErrorKind::BadArgument, "steps must be >= 0 and record_every >= 1");
    std::vector<InvariantSample> out{sample_invariants(s, choice)};
    for (int i = 1; i <= steps; ++i) {
        s = step(s);
        if (i % record_every == 0 || i == steps) out.push_back(sample_invariants(s, choice));
    }
    return out;
}

inline constexpr const char* kSeriesHeader = "t,helicity,gv,energy,enstrophy,integrability_residual,curl_drift";

inline void write_series_csv(std::ostream& os, const std::vector<InvariantSample>& series) {
    os << kSeriesHeader << '\n';
    char buf[64];
    auto put = [&](double v, char end) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << end;
    };
    for (const auto& r : series) {
        put(r.t, ',');
        put(r.helicity, ',');
        put(r.gv, ',');
        put(r.energy, ',');
        put(r.enstrophy, ',');
        put(r.integrability_residual, ',');
        put(r.curl_drift, '\n');
    }
}

// ---------------------------------------------------------------------------
// Local conservation law

struct ConservationResidual {
    ScalarField R;     // (d/dt + U.grad)(H.curl H) - div(k W) on the mask
    ScalarField k;     // H^2 + H.grad(Pi) / (U.A) on the mask
    ScalarField mask;
    double coverage = 0.0;
    double max_residual = 0.0;
    double max_rate = 0.0;       // max |d(H.curl H)/dt| on the mask, for scale
    double div_kW_integral = 0.0;
};

namespace detail {

/// H.curl(H) = Y.curl(Y) / D^2 for H = Y / D, with Y = W x U and D = U.A.
struct VelocityEtaParts {
    VectorField U, Y;
    ScalarField D, q;
};

inline VelocityEtaParts velocity_eta_parts(const FieldBundle& b) {
    VelocityEtaParts p;
    p.U = biot_savart(b.W);
    p.Y = cross(b.W, p.U);
    p.D = dot(p.U, b.A);
    p.q = dot(p.Y, curl(p.Y));
    return p;
}

}  // namespace detail

/// Residual of the conservation law for the velocity eta choice at the
/// state's time. The material derivative uses a centred difference over
/// RK4 steps of +-dt; spatial gradients of the singular quantities are
/// assembled from smooth numerators and the denominator U.A.
inline ConservationResidual conservation_residual(const EvolutionState& s, double dt,
                                                  double eps = defaults().conservation_eps) {
    if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::BadArgument, "conservation eps must lie in (0, 1)");
    const FieldBundle& b = s.bundle;
    const Grid3& g = b.grid;
    double res = integrability_residual(b);
    if (res > defaults().integrability_tol)
        fail(ErrorKind::IntegrabilityFailure, "integrability residual exceeds tolerance; GV undefined");

    EvolutionState sp = step(s, dt);
    EvolutionState sm = step(s, -dt);
    auto c = detail::velocity_eta_parts(b);
    auto pp = detail::velocity_eta_parts(sp.bundle);
    auto pm = detail::velocity_eta_parts(sm.bundle);

    FieldBundle bu = b;
    bu.U = c.U;
    ScalarField Pi = bernoulli_head(bu);
    VectorField gradPi = grad(Pi);
    ScalarField pk = norm_squared(c.Y) + dot(c.Y, gradPi);
    VectorField gradD = grad(c.D), gradq = grad(c.q), gradpk = grad(pk);

    ConservationResidual out;
    out.R = ScalarField(g);
    out.k = ScalarField(g);
    out.mask = ScalarField(g);
    double thr = eps * c.D.max_abs();
    std::size_t covered = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        double d = c.D[p];
        if (!(std::abs(d) > thr)) continue;
        double dp = pp.D[p], dm = pm.D[p];
        if (dp == 0.0 || dm == 0.0 || (dp > 0) != (d > 0) || (dm > 0) != (d > 0)) continue;
        double d2 = d * d, d3 = d2 * d;
        double rate = (pp.q[p] / (dp * dp) - pm.q[p] / (dm * dm)) / (2.0 * dt);
        Vec3 grad_rho = (1.0 / d2) * gradq.at(p) - (2.0 * c.q[p] / d3) * gradD.at(p);
        Vec3 grad_k = (1.0 / d2) * gradpk.at(p) - (2.0 * pk[p] / d3) * gradD.at(p);
        out.R[p] = rate + dot(c.U.at(p), grad_rho) - dot(b.W.at(p), grad_k);
        out.k[p] = pk[p] / d2;
        out.mask[p] = 1.0;
        out.max_residual = std::max(out.max_residual, std::abs(out.R[p]));
        out.max_rate = std::max(out.max_rate, std::abs(rate));
        ++covered;
    }
    out.coverage = double(covered) / double(g.size());
    if (covered == 0) fail(ErrorKind::MaskTooSmall, "U.A never exceeds the conservation threshold");
    out.div_kW_integral = integrate(div(out.k * b.W));
    return out;
}

}  // namespace wring

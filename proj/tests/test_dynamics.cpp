#include <gtest/gtest.h>

#include <sstream>

#include "wring/dynamics.hpp"

using namespace wring;

namespace {

const double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::BadArgument;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Clebsch default has U = u z_hat with u = sin x cos y and A = (2 + u) z_hat.
double clebsch_u(const Vec3& x) { return std::sin(x[0]) * std::cos(x[1]); }

}  // namespace

TEST(Rate, BeltramiAndClebschAreSteady) {
    // ABC: W x U = 0. Clebsch: W x U = -grad(u^2 / 2), a pure gradient.
    EXPECT_LT(vorticity_rate(gen_beltrami_abc(Grid3::cube(32), 1, 1, 1)).max_norm(), 1e-12);
    EXPECT_LT(vorticity_rate(gen_clebsch_default(Grid3::cube(32))).max_norm(), 1e-12);
    Grid3 g = Grid3::cube(8);
    FieldBundle z;
    z.grid = g;
    z.A = VectorField(g);
    z.W = VectorField(g);
    EXPECT_EQ(vorticity_rate(z).max_norm(), 0.0);
}

TEST(Rate, ShearedClebschAgreesWithFineReference) {
    // Compare on the points the two grids share (every other point of the fine grid).
    Grid3 g64 = Grid3::cube(64), g128 = Grid3::cube(128);
    VectorField r64 = vorticity_rate(gen_sheared_clebsch(g64));
    VectorField r128 = vorticity_rate(gen_sheared_clebsch(g128));
    double scale = r128.max_norm(), err = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            for (int k = 0; k < 64; ++k)
                err = std::max(err, norm(r64.at(g64.index(i, j, k)) - r128.at(g128.index(2 * i, 2 * j, 2 * k))));
    EXPECT_GT(scale, 1e-2);
    EXPECT_LT(err / scale, 1e-6);
}

TEST(Bernoulli, ClebschHeadIsHalfSpeedSquared) {
    Grid3 g = Grid3::cube(32);
    FieldBundle b = gen_clebsch_default(g);
    ScalarField pi = bernoulli_head(b);
    // u^2/2 minus its mean 1/8
    ScalarField expect = sample(g, [](const Vec3& x) { return 0.5 * clebsch_u(x) * clebsch_u(x) - 0.125; });
    EXPECT_LT(max_abs_diff(pi, expect), 1e-12);
}

TEST(Bernoulli, PoissonResidualAndQuadraticScaling) {
    Grid3 g = Grid3::cube(32);
    FieldBundle b = gen_sheared_clebsch(g);
    ScalarField pi = bernoulli_head(b);
    VectorField U = velocity_of(b);
    ScalarField res = laplacian(pi) + div(lamb_vector(b.W, U));
    EXPECT_LT(res.max_abs(), 1e-9);
    EXPECT_NEAR(pi.mean(), 0.0, 1e-14);

    const double c = 2.5;
    FieldBundle s = b;
    s.A *= c;
    s.W *= c;
    s.U.reset();
    ScalarField scaled = bernoulli_head(s);
    EXPECT_LT(max_abs_diff(scaled, c * c * pi), 1e-9 * c * c * pi.max_abs());

    EXPECT_LT(bernoulli_head(gen_beltrami_abc(g, 1, 1, 1)).max_abs(), 1e-12);
}

TEST(Bound, ClebschConstantMatchesAnalyticQuadrature) {
    // U.A = u (2 + u), |W x U|^2 = u^2 |grad u|^2, so the C integrand is |grad u|^2 / ((2 + u)^4 u^2).
    Grid3 g = Grid3::cube(32);
    FieldBundle b = gen_clebsch_default(g);
    BoundReport r = obstruction_bound(b);
    ScalarField D = sample(g, [](const Vec3& x) { return clebsch_u(x) * (2 + clebsch_u(x)); });
    double thr = defaults().eta_eps * D.max_abs();
    std::vector<double> terms;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                Vec3 x = g.point(i, j, k);
                double u = clebsch_u(x), d = D[g.index(i, j, k)];
                if (std::abs(d) <= thr) continue;
                double ux = std::cos(x[0]) * std::cos(x[1]), uy = -std::sin(x[0]) * std::sin(x[1]);
                terms.push_back((ux * ux + uy * uy) / (std::pow(2 + u, 4) * u * u));
            }
    double C = compensated_sum(terms) * g.cell_volume();
    EXPECT_NEAR(r.data.C, C, 1e-8 * C);
    EXPECT_NEAR(r.data.energy, g.volume() / 8, 1e-12);
    EXPECT_DOUBLE_EQ(r.data.lambda_min, 1.0);
    EXPECT_NEAR(std::pow(r.data.length, 7), g.volume() * g.volume(), 1e-6 * g.volume() * g.volume());
    EXPECT_LT(r.data.enstrophy_rate, 1e-12);
    EXPECT_EQ(r.data.gv, 0.0);
    EXPECT_TRUE(r.holds);
}

TEST(Bound, ShearedClebschHoldsAtFineResolution) {
    BoundReport r = obstruction_bound(gen_sheared_clebsch(Grid3::cube(96)));
    EXPECT_TRUE(r.holds);
    EXPECT_GT(r.data.enstrophy_rate, 1e-6);
    EXPECT_GE(r.data.slack, 0.0);
    EXPECT_GE(r.data.C, 0.0);
    EXPECT_GT(r.data.delta_ratio, 0.0);
}

TEST(Bound, PreconditionsAreReported) {
    Grid3 g = Grid3::cube(16);
    EXPECT_EQ(kind_of([&] { obstruction_bound(gen_beltrami_abc(g, 1, 1, 1)); }), ErrorKind::IntegrabilityFailure);
    EXPECT_EQ(kind_of([&] { obstruction_bound(gen_morse(g), 0.9); }), ErrorKind::MaskTooSmall);
}

TEST(Step, BeltramiVorticityIsStationary) {
    // W x U = 0, so W is steady while A moves by the exact form -grad(U.A) dt.
    EvolutionState s = make_state(gen_beltrami_abc(Grid3::cube(16), 1, 1, 1));
    EvolutionState n = step(s);
    for (int a = 0; a < 3; ++a) EXPECT_LT(max_abs_diff(n.bundle.W[a], s.bundle.W[a]), 1e-10);
    VectorField dA = n.bundle.A - s.bundle.A;
    EXPECT_GT(dA.max_norm(), 1e-3);
    EXPECT_LT(curl(dA).max_norm(), 1e-10);
    EXPECT_DOUBLE_EQ(n.t, s.dt);
}

TEST(Step, TimeReversalErrorIsFifthOrderPerPair) {
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(24)));
    auto err = [&](double dt) {
        EvolutionState back = step(step(s, dt), -dt);
        return relative_l2(back.bundle.W, s.bundle.W);
    };
    double e1 = err(0.1), e2 = err(0.05);
    EXPECT_LT(e1, 1e-5);
    EXPECT_GT(e1 / e2, 24.0);  // 2^5 = 32 asymptotically
}

TEST(Step, CflAndDriftGuards) {
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(16)));
    EXPECT_EQ(kind_of([&] { step(s, 10.0); }), ErrorKind::CflViolation);

    EvolutionOptions strict;
    strict.drift_bound = 0.0;
    EvolutionState t = make_state(gen_sheared_clebsch(Grid3::cube(16)), strict);
    EXPECT_EQ(kind_of([&] { step(t); }), ErrorKind::DriftExceeded);
    strict.reproject = true;
    EvolutionState r = step(make_state(gen_sheared_clebsch(Grid3::cube(16)), strict));
    EXPECT_LT(r.drift, 1e-13);
}

TEST(Step, AutomaticStepRespectsCfl) {
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(32)));
    EXPECT_NEAR(s.dt * s.bundle.U->max_norm() / s.bundle.grid.min_spacing(), defaults().cfl, 1e-12);
}

TEST(Step, RejectsNetFlux) {
    FieldBundle b = gen_clebsch_default(Grid3::cube(16));
    for (double& x : b.W[2].data) x += 0.1;
    EXPECT_EQ(kind_of([&] { make_state(b); }), ErrorKind::FluxObstruction);
}

TEST(Track, InvariantsConservedOnShortRun) {
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(32)));
    auto series = track_invariants(s, 6, 2);
    ASSERT_EQ(series.size(), 4u);  // t = 0 plus every second step
    const auto& a = series.front();
    for (const auto& x : series) {
        EXPECT_NEAR(x.helicity, a.helicity, 1e-10);
        EXPECT_NEAR(x.energy, a.energy, 1e-10 * a.energy);
        EXPECT_LT(std::abs(x.gv), 1e-8);
        EXPECT_LT(x.curl_drift, 1e-12);
    }
    EXPECT_NEAR(series.back().t, 6 * s.dt, 1e-15);
}

TEST(Track, SteadyDataGivesConstantSeries) {
    EvolutionState s = make_state(gen_beltrami_abc(Grid3::cube(16), 1, 1, 1));
    auto series = track_invariants(s, 3);
    for (const auto& x : series) {
        EXPECT_NEAR(x.helicity, series[0].helicity, 1e-9);
        EXPECT_NEAR(x.energy, series[0].energy, 1e-9);
        EXPECT_NEAR(x.enstrophy, series[0].enstrophy, 1e-9);
        EXPECT_TRUE(std::isnan(x.gv));  // not integrable
    }
}

TEST(Csv, DeterministicAndRoundTrips) {
    auto run = [] {
        EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(16)));
        std::ostringstream os;
        write_series_csv(os, track_invariants(s, 2));
        return os.str();
    };
    std::string a = run(), b = run();
    EXPECT_EQ(a, b);
    std::istringstream is(a);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, kSeriesHeader);
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(16)));
    InvariantSample x = sample_invariants(s);
    std::getline(is, line);
    std::istringstream fields(line);
    std::string t, h;
    std::getline(fields, t, ',');
    std::getline(fields, h, ',');
    EXPECT_EQ(std::stod(h), x.helicity);  // 17 significant digits round-trip exactly
}

TEST(Conservation, SteadyFieldHasNoResidual) {
    EvolutionState s = make_state(gen_clebsch_default(Grid3::cube(32)));
    ConservationResidual c = conservation_residual(s, 0.02);
    EXPECT_LT(c.max_residual, 1e-9);
    EXPECT_LT(std::abs(c.div_kW_integral), 1e-12);
}

TEST(Conservation, ResidualConvergesAtSecondOrder) {
    EvolutionState s = make_state(gen_sheared_clebsch(Grid3::cube(32)));
    double r1 = conservation_residual(s, 0.04).max_residual;
    double r2 = conservation_residual(s, 0.02).max_residual;
    double p = std::log2(r1 / r2);
    EXPECT_GT(p, 1.8);
    EXPECT_LT(p, 2.2);
}

TEST(Conservation, FluxTermIntegratesToZero) {
    ConservationResidual c = conservation_residual(make_state(gen_sheared_clebsch(Grid3::cube(32))), 0.01);
    EXPECT_LT(std::abs(c.div_kW_integral), 1e-12);
    EXPECT_GT(c.coverage, 0.5);
    EXPECT_GT(c.max_rate, 0.0);
    (void)kPi;
}

#include <gtest/gtest.h>

#include <random>

#include "wring/fieldzoo.hpp"
#include "wring/gv.hpp"

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

double max_diff(const VectorField& a, const VectorField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a.at(i) - b.at(i)));
    return m;
}

double max_pointwise_helicity(const FieldBundle& b) { return dot(b.A, b.W).max_abs(); }

}  // namespace

TEST(Clebsch, PotentialAndVorticityAreConsistent) {
    FieldBundle b = gen_clebsch_default(Grid3::cube(32));
    EXPECT_LT(b.meta.curl_residual, 1e-12);
    EXPECT_LT(max_pointwise_helicity(b), 1e-15);
    // f = 2 + sin x cos y, g = z: W = grad f x z_hat = (f_y, -f_x, 0).
    Grid3 g = b.grid;
    std::size_t p = g.index(5, 7, 3);
    Vec3 x = g.point(5, 7, 3);
    double fx = std::cos(x[0]) * std::cos(x[1]), fy = -std::sin(x[0]) * std::sin(x[1]);
    EXPECT_NEAR(b.W[0][p], fy, 1e-15);
    EXPECT_NEAR(b.W[1][p], -fx, 1e-15);
    EXPECT_EQ(b.W[2][p], 0.0);
    EXPECT_TRUE(b.meta.claims_first_integral);
    EXPECT_EQ(*b.meta.gv_claim, 0.0);
}

TEST(Clebsch, RandomPotentialsStayIntegrable) {
    std::mt19937_64 rng(41);
    Grid3 g = Grid3::cube(24);
    for (int trial = 0; trial < 8; ++trial) {
        TrigSeries f = random_band_limited(rng, 2, 3, 0.5);
        f.constant = 3.0;  // |f| >= 3 - 1.5
        TrigSeries h = random_band_limited(rng, 2, 3);
        h.linear = {0, 0, 1};
        FieldBundle b = gen_clebsch(g, f, h);
        EXPECT_LT(integrability_residual(b), 1e-14);
        EXPECT_LT(b.meta.curl_residual, 1e-10);
    }
}

TEST(Clebsch, RejectsSignChangingOrAperiodicInput) {
    Grid3 g = Grid3::cube(16);
    TrigSeries sinx{0.0, {0, 0, 0}, {TrigTerm{1.0, {1, 0, 0}, {TrigFn::Sin, TrigFn::Cos, TrigFn::Cos}}}};
    EXPECT_EQ(kind_of([&] { gen_clebsch(g, sinx, TrigSeries::coordinate(2)); }), ErrorKind::ZeroF);
    TrigSeries linear_f = TrigSeries::constant_value(2.0);
    linear_f.linear = {1, 0, 0};
    EXPECT_EQ(kind_of([&] { gen_clebsch(g, linear_f, TrigSeries::coordinate(2)); }), ErrorKind::NonPeriodic);
}

TEST(Morse, PotentialVanishesAtTheEightCriticalPoints) {
    Grid3 g = Grid3::cube(16);
    FieldBundle b = gen_morse(g);
    const auto& zeros = b.meta.features.at("morse_zeros");
    ASSERT_EQ(zeros.size(), 8u);
    for (const auto& z : zeros) {
        Vec3 x = z.get<Vec3>();
        std::size_t p = g.index(int(std::lround(x[0] / g.spacing(0))), int(std::lround(x[1] / g.spacing(1))),
                                int(std::lround(x[2] / g.spacing(2))));
        EXPECT_LT(norm(b.A.at(p)), 1e-15);
    }
    EXPECT_LT(integrability_residual(b), 1e-15);
}

TEST(Kupka, VorticityFormulaMatchesFiniteDifferenceCurl) {
    // A = chi(r) (-y, x, 0): curl_z by central differences of the point formula.
    const double r0 = 1.2, h = 1e-5;
    auto ax = [&](double x, double y) { return -y * kupka_chi(std::hypot(x, y), r0); };
    auto ay = [&](double x, double y) { return x * kupka_chi(std::hypot(x, y), r0); };
    for (double r : {0.05, 0.3, 0.6, 0.9, 1.1, 1.19}) {
        double x = r * std::cos(0.7), y = r * std::sin(0.7);
        double fd = (ay(x + h, y) - ay(x - h, y)) / (2 * h) - (ax(x, y + h) - ax(x, y - h)) / (2 * h);
        EXPECT_NEAR(kupka_vorticity(r, r0), fd, 1e-7);
    }
    EXPECT_EQ(kupka_vorticity(1.3, r0), 0.0);
    EXPECT_EQ(kupka_chi(0.0, r0), 1.0);
}

TEST(Kupka, SpectralCurlConvergesToAnalyticVorticity) {
    double r32 = gen_kupka_tube(Grid3::cube(32)).meta.curl_residual;
    double r64 = gen_kupka_tube(Grid3::cube(64)).meta.curl_residual;
    EXPECT_LT(r64, 1e-8);
    EXPECT_LT(r64, r32 / 100);
}

TEST(Kupka, SupportedInsideTheTubeAndIntegrable) {
    Grid3 g = Grid3::cube(32);
    FieldBundle b = gen_kupka_tube(g);
    double r0 = b.meta.params.at("r0");
    EXPECT_DOUBLE_EQ(r0, 0.25 * 2 * kPi);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j) {
            Vec3 x = g.point(i, j, 0);
            double r = std::hypot(x[0] - kPi, x[1] - kPi);
            std::size_t p = g.index(i, j, 5);
            if (r >= r0) {
                EXPECT_EQ(norm(b.W.at(p)), 0.0);
                EXPECT_EQ(norm(b.A.at(p)), 0.0);
            }
        }
    EXPECT_EQ(max_pointwise_helicity(b), 0.0);
    EXPECT_EQ(kind_of([&] { gen_kupka_tube(g, 3.2); }), ErrorKind::SupportTooLarge);
}

TEST(Abc, VorticityIsKappaTimesVelocity) {
    Grid3 g = Grid3::cube(16, 4.0);
    FieldBundle b = gen_beltrami_abc(g, 1.0, 0.5, 0.25);
    double kappa = 2 * kPi / 4.0;
    EXPECT_LT(max_diff(curl(*b.U), b.W), 1e-12);
    EXPECT_LT(max_diff(b.W, kappa * *b.U), 1e-15);
    EXPECT_NEAR(*b.meta.helicity_claim, kappa * 64.0 * 1.3125, 1e-12);
    EXPECT_GT(integrability_residual(b), 0.1);
    EXPECT_EQ(kind_of([&] { gen_beltrami_abc(Grid3({16, 16, 16}, {1, 1, 2}), 1, 1, 1); }), ErrorKind::BadArgument);
}

TEST(Rings, SingleTubeCarriesItsFlux) {
    Grid3 g = Grid3::cube(48);
    FieldBundle b = gen_linked_rings(g, {Ring{{0, 0, 0}, {0, 0, 1}, 1.0}}, 0.35, {1.5});
    EXPECT_LT(div(b.W).max_abs(), 1e-10);
    // Tube crosses the half plane y = 0, 0 < x < pi once.
    double flux = 0.0;
    for (int i = 1; i < g.n[0] / 2; ++i)
        for (int k = 0; k < g.n[2]; ++k) flux += b.W[1][g.index(i, 0, k)];
    flux *= g.spacing(0) * g.spacing(2);
    EXPECT_NEAR(std::abs(flux), 1.5, 1e-2);
    EXPECT_EQ(*b.meta.helicity_claim, 0.0);
}

TEST(Rings, HopfPairRecordsLinkingAndHelicityClaim) {
    FieldBundle b = gen_linked_rings(Grid3::cube(32), hopf_rings(), 0.35, {1.0, 2.0});
    EXPECT_EQ(b.meta.features.at("linking_matrix"), json::array({json::array({0, 1}), json::array({1, 0})}));
    EXPECT_EQ(*b.meta.helicity_claim, 4.0);
}

TEST(Rings, RejectsOverlapAndOversizedTubes) {
    Grid3 g = Grid3::cube(16);
    std::vector<Ring> close{Ring{{0, 0, 0}, {0, 0, 1}, 1.0}, Ring{{0, 0, 0.5}, {0, 0, 1}, 1.0}};
    EXPECT_EQ(kind_of([&] { gen_linked_rings(g, close, 0.35, {1, 1}); }), ErrorKind::TubesOverlap);
    EXPECT_EQ(kind_of([&] { gen_linked_rings(g, {Ring{{0, 0, 0}, {0, 0, 1}, 3.0}}, 0.35, {1}); }),
              ErrorKind::SupportTooLarge);
    EXPECT_EQ(kind_of([&] { gen_linked_rings(g, {Ring{{0, 0, 0}, {0, 0, 1}, 0.3}}, 0.35, {1}); }),
              ErrorKind::TubesOverlap);
}

TEST(Diffeo, ShearedClebschMatchesAnalyticPushForward) {
    // z -> z + a sin x pushes f dg to f d(z - a sin x) since f does not depend on z.
    Grid3 g = Grid3::cube(32);
    const double a = 0.3;
    Vec3 ph = clebsch_offset_phase();
    FieldBundle b = gen_sheared_clebsch(g, a);
    VectorField A = sample(g, [&](const Vec3& x) {
        double f = 2 + std::sin(x[0] + ph[0]) * std::cos(x[1] + ph[1]);
        return Vec3{-a * std::cos(x[0]) * f, 0.0, f};
    });
    VectorField W = sample(g, [&](const Vec3& x) {
        Vec3 df{std::cos(x[0] + ph[0]) * std::cos(x[1] + ph[1]), -std::sin(x[0] + ph[0]) * std::sin(x[1] + ph[1]), 0};
        return cross(df, Vec3{-a * std::cos(x[0]), 0, 1});
    });
    EXPECT_LT(max_diff(b.A, A), 1e-12);
    EXPECT_LT(max_diff(b.W, W), 1e-12);
    EXPECT_EQ(b.meta.family, "sheared_clebsch");
    EXPECT_EQ(b.meta.history.size(), 1u);
}

TEST(Diffeo, IdentityMapIsBitExact) {
    FieldBundle b = gen_morse(Grid3::cube(16));
    FieldBundle c = apply_diffeo(b, DiffeoMap{});
    for (int a = 0; a < 3; ++a) {
        EXPECT_EQ(c.A[a].data, b.A[a].data);
        EXPECT_EQ(c.W[a].data, b.W[a].data);
    }
    FieldBundle z = apply_diffeo(b, DiffeoMap{{Shear{0, 1, 0.0, 1}}});
    EXPECT_EQ(z.A[0].data, b.A[0].data);
}

TEST(Diffeo, MapThenInverseReturnsTheField) {
    Grid3 g = Grid3::cube(48);
    FieldBundle b = gen_clebsch_default(g, clebsch_offset_phase());
    DiffeoMap m{{Shear{0, 2, 0.2, 1}, Shear{1, 0, 0.2, 1}}};
    FieldBundle back = apply_diffeo(apply_diffeo(b, m), m.inverse());
    EXPECT_LT(relative_l2(back.A, b.A), 1e-8);
    EXPECT_LT(relative_l2(back.W, b.W), 1e-8);
    // point oracle: inverse undoes apply
    Vec3 x{1.0, 2.0, 3.0};
    Vec3 y = m.inverse().apply(m.apply(x, g), g);
    EXPECT_LT(norm(y - x), 1e-15);
}

TEST(Diffeo, PreservesHelicityAndIntegrability) {
    Grid3 g = Grid3::cube(32);
    FieldBundle b = gen_morse(g);
    FieldBundle s = apply_diffeo(b, DiffeoMap{{Shear{1, 2, 0.3, 1}}});
    EXPECT_LT(integrability_residual(s), 1e-12);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(s.W[a].mean(), 0.0, 1e-14);
    EXPECT_NEAR(helicity(s), helicity(b), 1e-10);
}

TEST(Diffeo, RejectsDegenerateShears) {
    FieldBundle b = gen_morse(Grid3::cube(16));
    EXPECT_EQ(kind_of([&] { apply_diffeo(b, DiffeoMap{{Shear{1, 1, 0.3, 1}}}); }), ErrorKind::MapNotInvertible);
    EXPECT_EQ(kind_of([&] { apply_diffeo(b, DiffeoMap{{Shear{3, 1, 0.3, 1}}}); }), ErrorKind::BadArgument);
}

TEST(Diffeo, UnderResolvedMapRaisesConsistencyLoss) {
    FieldBundle b = gen_kupka_tube(Grid3::cube(16));
    EXPECT_EQ(kind_of([&] { apply_diffeo(b, DiffeoMap{{Shear{0, 1, 0.8, 3}}}); }), ErrorKind::ConsistencyLoss);
    EXPECT_EQ(exit_code(ErrorKind::ConsistencyLoss), 5);
}

TEST(BundleFile, RoundTripKeepsFieldsAndProvenance) {
    FieldBundle b = gen_beltrami_abc(Grid3::cube(8), 1, 2, 3);
    FieldBundle c = from_field_file(decode_wrg1(encode_wrg1(to_field_file(b))));
    EXPECT_EQ(c.A[1].data, b.A[1].data);
    ASSERT_TRUE(c.U.has_value());
    EXPECT_EQ((*c.U)[2].data, (*b.U)[2].data);
    EXPECT_EQ(json(c.meta), json(b.meta));

    FieldFile f = to_field_file(b);
    f.fields.erase(f.fields.begin());
    EXPECT_EQ(kind_of([&] { from_field_file(f); }), ErrorKind::Format);
}

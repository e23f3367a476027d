#pragma once

// Analytic generators of (theta, omega) pairs on the torus and the shear
// diffeomorphisms used to test invariance. Bundles carry provenance so that
// downstream analysis can compare measured invariants against what the
// generator knows to be true.

#include <optional>
#include <string>
#include <vector>

#include "defaults.hpp"
#include "linkref.hpp"
#include "spectral.hpp"
#include "trig_series.hpp"
#include "wrg1.hpp"

namespace wring {

struct Provenance {
    std::string family = "custom";
    json params = json::object();
    bool claims_integrable = false;
    bool claims_first_integral = false;
    std::optional<double> gv_claim;
    std::optional<double> helicity_claim;
    json features = json::object();  // kupka lines, morse zeros, linking data
    json history = json::array();    // maps applied after generation
    double curl_residual = 0.0;      // |curl A - W| / |W| at generation time
};

/// A potential A (dual of theta), its curl W (vorticity) and, once computed,
/// the zero-mean velocity U.
struct FieldBundle {
    Grid3 grid;
    VectorField A;
    VectorField W;
    std::optional<VectorField> U;
    Provenance meta;
};

inline const VectorField& ensure_velocity(FieldBundle& b) {
    if (!b.U) b.U = inverse_curl(b.W);
    return *b.U;
}

inline VectorField velocity_of(const FieldBundle& b) { return b.U ? *b.U : inverse_curl(b.W); }

inline double curl_residual(const VectorField& A, const VectorField& W) {
    if (W.max_norm() == 0.0) return curl(A).max_norm();
    return relative_l2(curl(A), W);
}

// ---------------------------------------------------------------------------
// Serialisation

inline void to_json(json& j, const Provenance& p) {
    j = {{"family", p.family},
         {"params", p.params},
         {"claims",
          {{"integrable", p.claims_integrable},
           {"first_integral", p.claims_first_integral},
           {"gv", p.gv_claim ? json(*p.gv_claim) : json(nullptr)},
           {"helicity", p.helicity_claim ? json(*p.helicity_claim) : json(nullptr)}}},
         {"features", p.features},
         {"history", p.history},
         {"curl_residual", p.curl_residual}};
}

inline void from_json(const json& j, Provenance& p) {
    p.family = j.value("family", std::string("custom"));
    p.params = j.value("params", json::object());
    json claims = j.value("claims", json::object());
    p.claims_integrable = claims.value("integrable", false);
    p.claims_first_integral = claims.value("first_integral", false);
    p.gv_claim.reset();
    p.helicity_claim.reset();
    if (claims.contains("gv") && claims["gv"].is_number()) p.gv_claim = claims["gv"].get<double>();
    if (claims.contains("helicity") && claims["helicity"].is_number())
        p.helicity_claim = claims["helicity"].get<double>();
    p.features = j.value("features", json::object());
    p.history = j.value("history", json::array());
    p.curl_residual = j.value("curl_residual", 0.0);
}

inline FieldFile to_field_file(const FieldBundle& b) {
    FieldFile f;
    f.grid = b.grid;
    f.meta = {{"kind", "bundle"}, {"provenance", b.meta}};
    f.fields.push_back(named("A", b.A));
    f.fields.push_back(named("W", b.W));
    if (b.U) f.fields.push_back(named("U", *b.U));
    return f;
}

inline FieldBundle from_field_file(const FieldFile& f) {
    const NamedField* a = f.find("A");
    const NamedField* w = f.find("W");
    if (!a || !w) fail(ErrorKind::Format, "bundle files need fields 'A' and 'W'");
    FieldBundle b;
    b.grid = f.grid;
    b.A = as_vector(*a);
    b.W = as_vector(*w);
    if (const NamedField* u = f.find("U")) b.U = as_vector(*u);
    try {
        if (f.meta.contains("provenance")) b.meta = f.meta.at("provenance").get<Provenance>();
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("malformed provenance block: ") + e.what());
    }
    return b;
}

// ---------------------------------------------------------------------------
// Clebsch family: theta = f dg

/// A = f grad g, W = grad f x grad g. Integrable by construction with f as a
/// first integral of W, hence GV = 0.
inline FieldBundle gen_clebsch(const Grid3& grid, const TrigSeries& f, const TrigSeries& g,
                               std::string family = "clebsch") {
    f.require_periodic("f");
    g.require_periodic_gradient("g");

    ScalarField fv = sample(grid, [&](const Vec3& x) { return f.value(grid, x); });
    double fmax = fv.max_abs();
    double fmin = fv.min_value(), fmax_signed = fv.max_value();
    if (fmax == 0.0 || (fmin <= 0.0 && fmax_signed >= 0.0) ||
        std::min(std::abs(fmin), std::abs(fmax_signed)) < defaults().clebsch_min_f * fmax)
        fail(ErrorKind::ZeroF, "f must be bounded away from zero");

    FieldBundle b;
    b.grid = grid;
    b.A = sample(grid, [&](const Vec3& x) { return f.value(grid, x) * g.gradient(grid, x); });
    b.W = sample(grid, [&](const Vec3& x) { return cross(f.gradient(grid, x), g.gradient(grid, x)); });
    require_finite(b.A, "clebsch potential");

    b.meta.family = std::move(family);
    b.meta.params = {{"f", f}, {"g", g}};
    b.meta.claims_integrable = true;
    b.meta.claims_first_integral = true;
    b.meta.gv_claim = 0.0;
    b.meta.helicity_claim = 0.0;
    b.meta.curl_residual = curl_residual(b.A, b.W);
    return b;
}

/// f = 2 + sin x cos y, g = z on the given box.
inline FieldBundle gen_clebsch_default(const Grid3& grid, Vec3 phase = {0, 0, 0}) {
    TrigTerm t{1.0, {1, 1, 0}, {TrigFn::Sin, TrigFn::Cos, TrigFn::Cos}, phase};
    TrigSeries f{2.0, {0, 0, 0}, {t}};
    return gen_clebsch(grid, f, TrigSeries::coordinate(2));
}

/// f = 2 + sin x, g = cos x + cos y + cos z: theta vanishes at the eight
/// critical points of g (Morse-type zeros) where eta = -d log f stays regular.
inline FieldBundle gen_morse(const Grid3& grid) {
    TrigSeries f{2.0, {0, 0, 0}, {TrigTerm{1.0, {1, 0, 0}, {TrigFn::Sin, TrigFn::Cos, TrigFn::Cos}, {0, 0, 0}}}};
    TrigSeries g;
    g.terms = {TrigTerm{1.0, {1, 0, 0}, {TrigFn::Cos, TrigFn::Cos, TrigFn::Cos}, {0, 0, 0}},
               TrigTerm{1.0, {0, 1, 0}, {TrigFn::Cos, TrigFn::Cos, TrigFn::Cos}, {0, 0, 0}},
               TrigTerm{1.0, {0, 0, 1}, {TrigFn::Cos, TrigFn::Cos, TrigFn::Cos}, {0, 0, 0}}};
    FieldBundle b = gen_clebsch(grid, f, g, "morse");
    json zeros = json::array();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                zeros.push_back(Vec3{0.5 * i * grid.box[0], 0.5 * j * grid.box[1], 0.5 * k * grid.box[2]});
    b.meta.features["morse_zeros"] = zeros;
    return b;
}

// ---------------------------------------------------------------------------
// Kupka tube: theta = a dx + b dy with a simple zero on a vertical line

/// Compactly supported bump (1 - (r/r0)^2)^16 with chi(0) = 1. It is C^15
/// at the support edge and resolves to ~1e-9 at 64 points per box, where an
/// exp(-1/(1-s^2)) bump of the same radius still carries percent-level error.
inline constexpr int kKupkaPower = 16;

inline double kupka_chi(double r, double r0) {
    double s = r / r0;
    if (s >= 1.0) return 0.0;
    return std::pow(1.0 - s * s, kKupkaPower);
}

inline double kupka_chi_prime(double r, double r0) {
    double s = r / r0;
    if (s >= 1.0) return 0.0;
    return -2.0 * kKupkaPower * s / r0 * std::pow(1.0 - s * s, kKupkaPower - 1);
}

/// Vertical vorticity 2 chi + r chi' of the Kupka potential.
inline double kupka_vorticity(double r, double r0) { return 2.0 * kupka_chi(r, r0) + r * kupka_chi_prime(r, r0); }

/// A = (-y chi(r), x chi(r), 0) about the box centre. The axis is a Kupka
/// line: A = 0 there while W = 2 chi(0) z != 0. r0 <= 0 selects the default.
inline FieldBundle gen_kupka_tube(const Grid3& grid, double r0 = 0.0, double amplitude = 1.0) {
    double lmin = std::min(grid.box[0], grid.box[1]);
    if (r0 <= 0.0) r0 = defaults().kupka_radius_fraction * lmin;
    if (!(r0 < 0.5 * lmin)) fail(ErrorKind::SupportTooLarge, "Kupka profile support must fit inside the box");
    if (!(amplitude > 0.0)) fail(ErrorKind::BadArgument, "Kupka profile amplitude must be positive");
    Vec3 c{0.5 * grid.box[0], 0.5 * grid.box[1], 0.0};

    FieldBundle b;
    b.grid = grid;
    b.A = sample(grid, [&](const Vec3& x) {
        double dx = x[0] - c[0], dy = x[1] - c[1];
        double chi = amplitude * kupka_chi(std::hypot(dx, dy), r0);
        return Vec3{-dy * chi, dx * chi, 0.0};
    });
    b.W = sample(grid, [&](const Vec3& x) {
        return Vec3{0.0, 0.0, amplitude * kupka_vorticity(std::hypot(x[0] - c[0], x[1] - c[1]), r0)};
    });

    b.meta.family = "kupka";
    b.meta.params = {{"r0", r0}, {"amplitude", amplitude}, {"profile", "(1 - (r/r0)^2)^16"}};
    b.meta.claims_integrable = true;
    b.meta.claims_first_integral = false;
    b.meta.gv_claim = 0.0;
    b.meta.helicity_claim = 0.0;
    b.meta.features["kupka_lines"] = json::array({{{"point", Vec3{c[0], c[1], 0.0}}, {"direction", Vec3{0, 0, 1}}}});
    b.meta.features["gv_eps_claim"] = 0.0;
    // W is sampled analytically so that it vanishes exactly outside the tube;
    // the spectral curl of A agrees only to the resolution of the bump.
    b.meta.curl_residual = curl_residual(b.A, b.W);
    return b;
}

// ---------------------------------------------------------------------------
// ABC (constant Beltrami) flow

/// U = ABC field with curl U = kappa U, kappa = 2 pi / L. The potential of
/// W = kappa U is A = U itself, so A.W = kappa |U|^2 and theta is not integrable.
inline FieldBundle gen_beltrami_abc(const Grid3& grid, double a, double b, double c) {
    if (grid.box[0] != grid.box[1] || grid.box[1] != grid.box[2])
        fail(ErrorKind::BadArgument, "ABC flows need a cubic box");
    double kappa = 2.0 * std::numbers::pi / grid.box[0];
    VectorField U = sample(grid, [&](const Vec3& x) {
        return Vec3{a * std::sin(kappa * x[2]) + c * std::cos(kappa * x[1]),
                    b * std::sin(kappa * x[0]) + a * std::cos(kappa * x[2]),
                    c * std::sin(kappa * x[1]) + b * std::cos(kappa * x[0])};
    });
    FieldBundle out;
    out.grid = grid;
    out.A = U;
    out.W = kappa * U;
    out.U = U;
    out.meta.family = "abc";
    out.meta.params = {{"a", a}, {"b", b}, {"c", c}, {"lambda", kappa}};
    out.meta.claims_integrable = false;
    out.meta.helicity_claim = kappa * grid.volume() * (a * a + b * b + c * c);
    out.meta.curl_residual = curl_residual(out.A, out.W);
    return out;
}

// ---------------------------------------------------------------------------
// Linked vortex rings

struct Ring {
    Vec3 center{0, 0, 0};
    Vec3 normal{0, 0, 1};
    double radius = 1.0;
};

inline void to_json(json& j, const Ring& r) { j = {{"center", r.center}, {"normal", r.normal}, {"radius", r.radius}}; }
inline void from_json(const json& j, Ring& r) {
    r.center = j.at("center").get<Vec3>();
    r.normal = j.at("normal").get<Vec3>();
    r.radius = j.at("radius").get<double>();
}

namespace detail {

inline Vec3 minimal_image(Vec3 d, const Grid3& g) {
    for (int a = 0; a < 3; ++a) d[a] -= g.box[a] * std::round(d[a] / g.box[a]);
    return d;
}

/// Core profile (m + 1)/(pi a^2) (1 - (rho/a)^2)^m, unit flux, C^(m-1) at rho = a.
inline double tube_profile(double rho, double a, int m) {
    if (rho >= a) return 0.0;
    double q = 1.0 - (rho * rho) / (a * a);
    return (m + 1) / (std::numbers::pi * a * a) * std::pow(q, m);
}

}  // namespace detail

/// Solenoidal flux tubes along circles, vorticity tangent to each centreline
/// with no internal twist. A is the Biot-Savart potential (A = U).
inline FieldBundle gen_linked_rings(const Grid3& grid, const std::vector<Ring>& rings, double core_radius,
                                    const std::vector<double>& fluxes, int profile_power = 3) {
    if (profile_power < 3) fail(ErrorKind::BadArgument, "tube profile power must be at least 3 (C^2)");
    if (rings.empty() || rings.size() != fluxes.size())
        fail(ErrorKind::BadArgument, "need one flux per ring and at least one ring");
    if (!(core_radius > 0.0)) fail(ErrorKind::BadArgument, "core radius must be positive");

    std::vector<Curve> lines;
    std::vector<Vec3> normals;
    for (const auto& r : rings) {
        if (!(core_radius < r.radius)) fail(ErrorKind::TubesOverlap, "core radius must be below the ring radius");
        for (int a = 0; a < 3; ++a)
            if (!(r.radius + core_radius < 0.5 * grid.box[a]))
                fail(ErrorKind::SupportTooLarge, "ring tube does not fit inside the periodic box");
        lines.push_back(circle(r.center, r.normal, r.radius, 256));
        normals.push_back((1.0 / norm(r.normal)) * r.normal);
    }
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& p : lines[i])
                for (const auto& q : lines[j]) dmin = std::min(dmin, norm(detail::minimal_image(p - q, grid)));
            if (dmin <= 2.0 * core_radius + defaults().ring_min_clearance)
                fail(ErrorKind::TubesOverlap, "tubular neighbourhoods of rings " + std::to_string(i) + " and " +
                                                  std::to_string(j) + " intersect");
        }

    VectorField W = sample(grid, [&](const Vec3& x) {
        Vec3 w{0, 0, 0};
        for (std::size_t r = 0; r < rings.size(); ++r) {
            Vec3 d = detail::minimal_image(x - rings[r].center, grid);
            double z = dot(d, normals[r]);
            Vec3 q = d - z * normals[r];
            double s = norm(q);
            if (s == 0.0) continue;
            double rho = std::hypot(s - rings[r].radius, z);
            double p = detail::tube_profile(rho, core_radius, profile_power);
            if (p == 0.0) continue;
            w = w + (fluxes[r] * p / s) * cross(normals[r], q);
        }
        return w;
    });

    FieldBundle b;
    b.grid = grid;
    b.W = solenoidal_part(W);
    b.A = biot_savart(b.W);
    b.U = b.A;

    IntMatrix lk(rings.size(), std::vector<int>(rings.size(), 0));
    for (std::size_t i = 0; i < rings.size(); ++i)
        for (std::size_t j = i + 1; j < rings.size(); ++j) {
            // centrelines may straddle the periodic seam; link them as drawn
            lk[i][j] = lk[j][i] = int(gauss_linking(lines[i], lines[j]).nearest);
        }
    double h = 0.0;
    for (std::size_t i = 0; i < rings.size(); ++i)
        for (std::size_t j = 0; j < rings.size(); ++j)
            if (i != j) h += fluxes[i] * fluxes[j] * lk[i][j];

    b.meta.family = "rings";
    b.meta.params = {{"rings", rings}, {"core_radius", core_radius}, {"fluxes", fluxes}, {"profile_power", profile_power}};
    b.meta.claims_integrable = false;
    b.meta.helicity_claim = h;
    b.meta.features["linking_matrix"] = lk;
    b.meta.curl_residual = curl_residual(b.A, b.W);
    return b;
}

inline std::vector<Ring> hopf_rings() { return {Ring{{0, 0, 0}, {0, 0, 1}, 1.0}, Ring{{1, 0, 0}, {0, 1, 0}, 1.0}}; }

// ---------------------------------------------------------------------------
// Volume-preserving shear maps

/// x_axis -> x_axis + amplitude * sin(2 pi k x_along / L_along)
struct Shear {
    int axis = 0;
    int along = 2;
    double amplitude = 0.0;
    int wavenumber = 1;
};

inline void to_json(json& j, const Shear& s) {
    j = {{"axis", s.axis}, {"along", s.along}, {"amplitude", s.amplitude}, {"wavenumber", s.wavenumber}};
}
inline void from_json(const json& j, Shear& s) {
    s.axis = j.at("axis").get<int>();
    s.along = j.at("along").get<int>();
    s.amplitude = j.at("amplitude").get<double>();
    s.wavenumber = j.value("wavenumber", 1);
}

/// Composition of shears, applied first to last. Each shear has unit
/// Jacobian, so the composition is volume-preserving.
struct DiffeoMap {
    std::vector<Shear> shears;

    void validate() const {
        for (const auto& s : shears) {
            if (s.axis < 0 || s.axis > 2 || s.along < 0 || s.along > 2)
                fail(ErrorKind::BadArgument, "shear axes must be 0, 1 or 2");
            if (s.axis == s.along)
                fail(ErrorKind::MapNotInvertible, "a shear must displace one axis along a different one");
            if (!std::isfinite(s.amplitude)) fail(ErrorKind::MapNotInvertible, "shear amplitude must be finite");
        }
    }

    DiffeoMap inverse() const {
        DiffeoMap inv;
        for (auto it = shears.rbegin(); it != shears.rend(); ++it) {
            Shear s = *it;
            s.amplitude = -s.amplitude;
            inv.shears.push_back(s);
        }
        return inv;
    }

    /// Image of a point (used by tests as an oracle).
    Vec3 apply(Vec3 x, const Grid3& g) const {
        for (const auto& s : shears)
            x[s.axis] += s.amplitude * std::sin(2.0 * std::numbers::pi * s.wavenumber * x[s.along] / g.box[s.along]);
        return x;
    }
};

namespace detail {

class LineFft {
public:
    explicit LineFft(int n) : n_(n) {
        double* r = fftw_alloc_real(n);
        fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_1d(n, r, c, flags);
        inv_ = fftw_plan_dft_c2r_1d(n, c, r, flags);
        fftw_free(r);
        fftw_free(c);
    }
    ~LineFft() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    LineFft(const LineFft&) = delete;
    LineFft& operator=(const LineFft&) = delete;

    void forward(double* in, Complex* out) const {
        fftw_execute_dft_r2c(fwd_, in, reinterpret_cast<fftw_complex*>(out));
    }
    void inverse(Complex* in, double* out) const {
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    int n_;
    fftw_plan fwd_{};
    fftw_plan inv_{};
};

inline const LineFft& line_fft(int n) {
    static std::map<int, std::unique_ptr<LineFft>> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<LineFft>(n)).first;
    return *it->second;
}

/// f'(y) = f(y - shift(y_along) e_axis) by exact Fourier translation of each line.
inline ScalarField translate_lines(const ScalarField& f, const Shear& s) {
    const Grid3& g = f.grid;
    int n = g.n[s.axis];
    const LineFft& fft = line_fft(n);
    std::vector<double> line(n);
    std::vector<Complex> coef(n / 2 + 1);
    ScalarField out(g);
    std::array<std::size_t, 3> stride{std::size_t(g.n[1]) * g.n[2], std::size_t(g.n[2]), 1};
    int o1 = (s.axis + 1) % 3, o2 = (s.axis + 2) % 3;
    double kunit = 2.0 * std::numbers::pi / g.box[s.axis];
    for (int p = 0; p < g.n[o1]; ++p)
        for (int q = 0; q < g.n[o2]; ++q) {
            std::array<int, 3> idx{};
            idx[o1] = p;
            idx[o2] = q;
            double xb = idx[s.along] * g.spacing(s.along);
            double shift = s.amplitude * std::sin(2.0 * std::numbers::pi * s.wavenumber * xb / g.box[s.along]);
            std::size_t base = idx[o1] * stride[o1] + idx[o2] * stride[o2];
            for (int m = 0; m < n; ++m) line[m] = f[base + m * stride[s.axis]];
            fft.forward(line.data(), coef.data());
            for (int m = 0; m <= n / 2; ++m) {
                double k = kunit * m;
                if (m == n / 2)
                    coef[m] *= std::cos(k * shift);
                else
                    coef[m] *= std::polar(1.0, -k * shift);
            }
            fft.inverse(coef.data(), line.data());
            for (int m = 0; m < n; ++m) out[base + m * stride[s.axis]] = line[m] / n;
        }
    return out;
}

}  // namespace detail

/// Push the bundle forward by the map: W transforms as a vector field with
/// the Jacobian, A as a covector with the inverse transpose. Both are
/// resampled on the grid by spectral translation.
inline FieldBundle apply_diffeo(const FieldBundle& bundle, const DiffeoMap& map,
                                double consistency_tol = defaults().diffeo_consistency_tol) {
    map.validate();
    FieldBundle out = bundle;
    if (map.shears.empty()) return out;
    out.U.reset();
    const Grid3& g = bundle.grid;
    for (const auto& s : map.shears) {
        if (s.amplitude == 0.0 || s.wavenumber == 0) continue;
        VectorField A(g), W(g);
        for (int a = 0; a < 3; ++a) {
            A[a] = detail::translate_lines(out.A[a], s);
            W[a] = detail::translate_lines(out.W[a], s);
        }
        double kb = 2.0 * std::numbers::pi * s.wavenumber / g.box[s.along];
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    std::array<int, 3> id{i, j, k};
                    double xb = id[s.along] * g.spacing(s.along);
                    double slope = s.amplitude * kb * std::cos(kb * xb);
                    std::size_t p = g.index(i, j, k);
                    W[s.axis][p] += slope * W[s.along][p];
                    A[s.along][p] -= slope * A[s.axis][p];
                }
        out.A = std::move(A);
        out.W = std::move(W);
        out.meta.history.push_back(s);
    }
    double res = curl_residual(out.A, out.W);
    if (res > consistency_tol)
        fail(ErrorKind::ConsistencyLoss,
             "curl(A') - W' residual " + std::to_string(res) + " exceeds tolerance; refine the grid");
    out.meta.curl_residual = res;
    return out;
}

/// Phase-shifted Clebsch bundle pushed through z -> z + a sin x. The normal
/// field is no longer constant, the flow is unsteady, and theta stays
/// integrable with GV = 0.
inline Vec3 clebsch_offset_phase() { return {0.3, 0.7, 0.0}; }

inline FieldBundle gen_sheared_clebsch(const Grid3& grid, double amplitude = 0.3) {
    FieldBundle b = apply_diffeo(gen_clebsch_default(grid, clebsch_offset_phase()), DiffeoMap{{Shear{2, 0, amplitude, 1}}});
    b.meta.family = "sheared_clebsch";
    return b;
}

}  // namespace wring

#pragma once

// Closed-form reference calculators: the Godbillon-Vey value of Thurston's
// link-complement foliation from its boundary slopes, the slopes induced by a
// closed flux form, linking-matrix helicities, and the Gauss linking integral.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "wrg1.hpp"

namespace wring {

/// Closed polygon; the last point connects back to the first.
using Curve = std::vector<Vec3>;
using IntMatrix = std::vector<std::vector<int>>;

inline constexpr std::size_t kMinCurveSamples = 64;

struct CurveSet {
    std::vector<Curve> curves;
    std::vector<double> fluxes;
    std::optional<IntMatrix> linking;  // declared; symmetric, zero diagonal

    void validate() const {
        if (fluxes.size() != curves.size() && !(curves.empty() && linking))
            fail(ErrorKind::BadArgument, "flux count must equal curve count");
        for (const auto& c : curves)
            if (c.size() < kMinCurveSamples) fail(ErrorKind::BadArgument, "curves need at least 64 samples");
        if (linking) {
            const auto& m = *linking;
            if (m.size() != fluxes.size()) fail(ErrorKind::BadArgument, "linking matrix size must match flux count");
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i].size() != m.size()) fail(ErrorKind::BadArgument, "linking matrix must be square");
                if (m[i][i] != 0) fail(ErrorKind::BadArgument, "linking matrix diagonal must be zero");
                for (std::size_t j = 0; j < i; ++j)
                    if (m[i][j] != m[j][i]) fail(ErrorKind::BadArgument, "linking matrix must be symmetric");
            }
        }
    }
};

struct SlopeData {
    int n_components = 0;
    std::vector<double> slopes;  // s_1 .. s_N
};

/// 4 pi^2 (N - 2 - (1/s_1 + sum_{i>=2} s_i))
inline double thurston_gv(const SlopeData& sd) {
    if (sd.n_components < 2 || sd.slopes.size() != std::size_t(sd.n_components))
        fail(ErrorKind::BadArgument, "slope data needs N >= 2 slopes, one per component");
    if (sd.slopes[0] == 0.0) fail(ErrorKind::ZeroSlopeOne, "s_1 must be nonzero");
    double sum = 1.0 / sd.slopes[0];
    for (std::size_t i = 1; i < sd.slopes.size(); ++i) sum += sd.slopes[i];
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 4.0 * pi2 * (sd.n_components - 2 - sum);
}

struct FluxSlopes {
    SlopeData slopes;
    /// sum_{i>=2} s_i + 1/s_1 evaluated literally from the slope formulas.
    /// Equals -2 (sum_{i>1} phi_i) / phi_1, so it is generally nonzero.
    double identity_residual = 0.0;
};

/// Slopes induced on each link component by a closed 1-form with fluxes
/// phi_i: s_1 = -phi_1 / sum_{i!=1} phi_i and s_i = -phi_i / phi_1.
inline FluxSlopes flux_slopes(std::span<const double> phi) {
    if (phi.size() < 2) fail(ErrorKind::DegenerateFluxes, "need at least two fluxes");
    if (phi[0] == 0.0) fail(ErrorKind::DegenerateFluxes, "phi_1 must be nonzero");
    double rest = 0.0;
    for (std::size_t i = 1; i < phi.size(); ++i) rest += phi[i];
    if (rest == 0.0) fail(ErrorKind::DegenerateFluxes, "sum of phi_i over i != 1 must be nonzero");

    FluxSlopes out;
    out.slopes.n_components = int(phi.size());
    out.slopes.slopes.push_back(-phi[0] / rest);
    for (std::size_t i = 1; i < phi.size(); ++i) out.slopes.slopes.push_back(-phi[i] / phi[0]);
    double r = 1.0 / out.slopes.slopes[0];
    for (std::size_t i = 1; i < phi.size(); ++i) r += out.slopes.slopes[i];
    out.identity_residual = r;
    return out;
}

struct LinkingNumber {
    double value = 0.0;
    long nearest = 0;
    double deviation = 0.0;  // |value - nearest|
    double min_distance = 0.0;
};

/// Closest distance between segments [p, p + d] and [q, q + e].
inline double segment_distance(const Vec3& p, const Vec3& d, const Vec3& q, const Vec3& e) {
    Vec3 r = p - q;
    double a = dot(d, d), b = dot(d, e), c = dot(e, e), f = dot(e, r), g = dot(d, r);
    double den = a * c - b * b, s = 0.0, t = 0.0;
    if (den > 1e-14 * a * c) s = std::clamp((b * f - c * g) / den, 0.0, 1.0);
    t = c > 0.0 ? (b * s + f) / c : 0.0;
    if (t < 0.0 || t > 1.0) {
        t = std::clamp(t, 0.0, 1.0);
        s = a > 0.0 ? std::clamp((b * t - g) / a, 0.0, 1.0) : 0.0;
    }
    return norm(r + s * d - t * e);
}

/// Gauss linking integral (1/4pi) sum_ij (a_i - b_j).(da_i x db_j)/|a_i - b_j|^3
/// over segment midpoints of two closed polygons.
inline LinkingNumber gauss_linking(const Curve& a, const Curve& b, double min_separation = 1e-6) {
    if (a.size() < 3 || b.size() < 3) fail(ErrorKind::BadArgument, "curves need at least three points");
    auto segments = [](const Curve& c, std::vector<Vec3>& mid, std::vector<Vec3>& d) {
        std::size_t n = c.size();
        mid.resize(n);
        d.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& p = c[i];
            const Vec3& q = c[(i + 1) % n];
            d[i] = q - p;
            mid[i] = 0.5 * (p + q);
        }
    };
    std::vector<Vec3> ma, da, mb, db;
    segments(a, ma, da);
    segments(b, mb, db);

    double dmin = std::numeric_limits<double>::infinity();
    std::vector<double> rows(ma.size());
    for (std::size_t i = 0; i < ma.size(); ++i) {
        std::vector<double> row(mb.size());
        for (std::size_t j = 0; j < mb.size(); ++j) {
            Vec3 r = ma[i] - mb[j];
            double d = norm(r);
            dmin = std::min(dmin, segment_distance(a[i], da[i], b[j], db[j]));
            row[j] = dot(r, cross(da[i], db[j])) / (d * d * d);
        }
        rows[i] = compensated_sum(row);
    }
    if (!(dmin > min_separation)) fail(ErrorKind::CurvesIntersect, "curves intersect or nearly touch");

    LinkingNumber out;
    out.value = compensated_sum(rows) / (4.0 * std::numbers::pi);
    out.nearest = std::lround(out.value);
    out.deviation = std::abs(out.value - double(out.nearest));
    out.min_distance = dmin;
    return out;
}

/// Integer linking matrix from the Gauss integral (rounded), zero diagonal.
inline IntMatrix linking_matrix(const std::vector<Curve>& curves) {
    std::size_t n = curves.size();
    IntMatrix m(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = int(gauss_linking(curves[i], curves[j]).nearest);
    return m;
}

struct LinkHelicities {
    std::vector<double> per_component;  // H_i = Phi_i sum_j Phi_j Lk(i,j)
    double total = 0.0;
    IntMatrix linking;
};

/// Helicity carried by each thin untwisted flux tube; the self-linking term is zero.
inline LinkHelicities linking_helicities(const CurveSet& cs) {
    cs.validate();
    LinkHelicities out;
    if (cs.linking)
        out.linking = *cs.linking;
    else if (!cs.curves.empty())
        out.linking = linking_matrix(cs.curves);
    else
        fail(ErrorKind::MissingLinkData, "no declared linking matrix and no curves to compute one");

    std::size_t n = cs.fluxes.size();
    out.per_component.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) s += cs.fluxes[j] * out.linking[i][j];
        out.per_component[i] = cs.fluxes[i] * s;
    }
    out.total = 0.0;
    for (double h : out.per_component) out.total += h;
    return out;
}

/// Planar circle, counter-clockwise about the unit normal.
inline Curve circle(const Vec3& center, Vec3 normal, double radius, std::size_t samples = 256) {
    double nn = norm(normal);
    if (!(nn > 0.0) || !(radius > 0.0)) fail(ErrorKind::BadArgument, "circle needs a nonzero normal and radius");
    normal = (1.0 / nn) * normal;
    Vec3 e1 = std::abs(normal[2]) < 0.9 ? cross(normal, Vec3{0, 0, 1}) : cross(normal, Vec3{1, 0, 0});
    e1 = (1.0 / norm(e1)) * e1;
    Vec3 e2 = cross(normal, e1);
    Curve c(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double t = 2.0 * std::numbers::pi * double(i) / double(samples);
        c[i] = center + radius * (std::cos(t) * e1 + std::sin(t) * e2);
    }
    return c;
}

inline Curve reversed(Curve c) {
    std::reverse(c.begin(), c.end());
    return c;
}

/// Two unit circles, each passing through the other's centre (Lk = +1).
inline CurveSet hopf_pair(double flux1 = 1.0, double flux2 = 1.0, std::size_t samples = 256) {
    CurveSet cs;
    cs.curves = {circle({0, 0, 0}, {0, 0, 1}, 1.0, samples), circle({1, 0, 0}, {0, 1, 0}, 1.0, samples)};
    cs.fluxes = {flux1, flux2};
    return cs;
}

/// Closed chain of four rings: two coaxial horizontal rings threaded by two
/// vertical ones, oriented so every row of the linking matrix sums to zero
/// while each adjacent pair links once. With equal fluxes all H_i vanish.
inline CurveSet four_chain(double flux = 1.0, std::size_t samples = 256) {
    const double R = 1.0, h = 0.5, rho = 0.8;
    CurveSet cs;
    cs.curves = {circle({0, 0, h}, {0, 0, 1}, R, samples), circle({R, 0, 0}, {0, 1, 0}, rho, samples),
                 circle({0, 0, -h}, {0, 0, -1}, R, samples), circle({-R, 0, 0}, {0, 1, 0}, rho, samples)};
    cs.fluxes.assign(4, flux);
    return cs;
}

inline void to_json(json& j, const CurveSet& cs) {
    j = {{"curves", cs.curves}, {"fluxes", cs.fluxes}};
    if (cs.linking) j["linking_matrix"] = *cs.linking;
}

inline void from_json(const json& j, CurveSet& cs) {
    cs.curves = j.value("curves", std::vector<Curve>{});
    cs.fluxes = j.at("fluxes").get<std::vector<double>>();
    if (j.contains("linking_matrix")) cs.linking = j.at("linking_matrix").get<IntMatrix>();
}

}  // namespace wring

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace wring {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Neumaier-compensated sum; used for every domain integral so reductions are
/// reproducible and insensitive to the magnitude spread of integrands.
inline double compensated_sum(std::span<const double> v) {
    double sum = 0.0, c = 0.0;
    for (double x : v) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

/// Periodic rectangular lattice on the 3-torus [0,Lx)x[0,Ly)x[0,Lz).
struct Grid3 {
    std::array<int, 3> n{64, 64, 64};
    Vec3 box{2 * std::numbers::pi, 2 * std::numbers::pi, 2 * std::numbers::pi};

    Grid3() = default;
    Grid3(std::array<int, 3> n_, Vec3 box_) : n(n_), box(box_) { validate(); }

    static Grid3 cube(int n, double length = 2 * std::numbers::pi) {
        return Grid3({n, n, n}, {length, length, length});
    }

    void validate() const {
        for (int a = 0; a < 3; ++a) {
            if (n[a] < 8 || n[a] % 2 != 0)
                fail(ErrorKind::BadArgument, "grid points per axis must be even and >= 8");
            if (!(box[a] > 0.0) || !std::isfinite(box[a]))
                fail(ErrorKind::BadArgument, "box lengths must be finite and positive");
        }
    }

    std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
    double spacing(int axis) const { return box[axis] / n[axis]; }
    double min_spacing() const { return std::min({spacing(0), spacing(1), spacing(2)}); }
    double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
    double volume() const { return box[0] * box[1] * box[2]; }
    double max_length() const { return std::max({box[0], box[1], box[2]}); }

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * n[1] + j) * n[2] + k;
    }
    Vec3 point(int i, int j, int k) const {
        return {i * spacing(0), j * spacing(1), k * spacing(2)};
    }

    friend bool operator==(const Grid3&, const Grid3&) = default;
};

/// Real scalar samples on a Grid3, row-major over (x, y, z).
struct ScalarField {
    Grid3 grid;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const Grid3& g, double value = 0.0) : grid(g), data(g.size(), value) {}

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
    std::size_t size() const { return data.size(); }

    bool all_finite() const {
        return std::all_of(data.begin(), data.end(), [](double x) { return std::isfinite(x); });
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : data) m = std::max(m, std::abs(x));
        return m;
    }
    double min_value() const { return *std::min_element(data.begin(), data.end()); }
    double max_value() const { return *std::max_element(data.begin(), data.end()); }
    double mean() const { return compensated_sum(data) / double(data.size()); }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (double& x : data) x *= s;
        return *this;
    }
};

/// Three Cartesian components on a common grid.
struct VectorField {
    std::array<ScalarField, 3> c;

    VectorField() = default;
    explicit VectorField(const Grid3& g) : c{ScalarField(g), ScalarField(g), ScalarField(g)} {}

    const Grid3& grid() const { return c[0].grid; }
    ScalarField& operator[](int a) { return c[a]; }
    const ScalarField& operator[](int a) const { return c[a]; }
    std::size_t size() const { return c[0].size(); }

    Vec3 at(std::size_t i) const { return {c[0][i], c[1][i], c[2][i]}; }
    void set(std::size_t i, const Vec3& v) {
        c[0][i] = v[0];
        c[1][i] = v[1];
        c[2][i] = v[2];
    }

    bool all_finite() const { return c[0].all_finite() && c[1].all_finite() && c[2].all_finite(); }

    /// max over points of the Euclidean norm
    double max_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m = std::max(m, norm(at(i)));
        return m;
    }

    VectorField& operator+=(const VectorField& o) {
        for (int a = 0; a < 3; ++a) c[a] += o.c[a];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int a = 0; a < 3; ++a) c[a] -= o.c[a];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (int a = 0; a < 3; ++a) c[a] *= s;
        return *this;
    }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double s, VectorField a) { return a *= s; }

inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

/// scalar-times-vector, pointwise
inline VectorField operator*(const ScalarField& s, const VectorField& v) {
    VectorField r(v.grid());
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < r.size(); ++i) r[a][i] = s[i] * v[a][i];
    return r;
}

inline ScalarField dot(const VectorField& u, const VectorField& v) {
    ScalarField r(u.grid());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = u[0][i] * v[0][i] + u[1][i] * v[1][i] + u[2][i] * v[2][i];
    return r;
}

inline VectorField cross(const VectorField& u, const VectorField& v) {
    VectorField r(u.grid());
    for (std::size_t i = 0; i < r.size(); ++i) r.set(i, cross(u.at(i), v.at(i)));
    return r;
}

inline ScalarField norm_squared(const VectorField& v) { return dot(v, v); }

/// Sample a scalar function of position on every grid point.
inline ScalarField sample(const Grid3& g, const std::function<double(const Vec3&)>& f) {
    ScalarField s(g);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) s[g.index(i, j, k)] = f(g.point(i, j, k));
    return s;
}

inline VectorField sample(const Grid3& g, const std::function<Vec3(const Vec3&)>& f) {
    VectorField v(g);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                std::size_t idx = g.index(i, j, k);
                v.set(idx, f(g.point(i, j, k)));
            }
    return v;
}

/// Relative L2 distance |a-b|/|b| with |.| the discrete L2 norm.
inline double relative_l2(const VectorField& a, const VectorField& b) {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[c][i] - b[c][i];
            num += d * d;
            den += b[c][i] * b[c][i];
        }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

inline double l2_distance(const VectorField& a, const VectorField& b) {
    double num = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.size(); ++i) {
            double d = a[c][i] - b[c][i];
            num += d * d;
        }
    return std::sqrt(num * a.grid().cell_volume());
}

inline void require_finite(const ScalarField& s, std::string_view what) {
    if (!s.all_finite()) fail(ErrorKind::NonFinite, std::string(what) + " contains non-finite values");
}
inline void require_finite(const VectorField& v, std::string_view what) {
    if (!v.all_finite()) fail(ErrorKind::NonFinite, std::string(what) + " contains non-finite values");
}

}  // namespace wring

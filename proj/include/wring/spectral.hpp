#pragma once

// Fourier calculus on the periodic box. Derivatives use the "modified"
// wavenumber that vanishes on the Nyquist plane of the differentiated axis,
// which keeps curl(grad) and div(curl) identically zero.

#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "field.hpp"

namespace wring {

using Complex = std::complex<double>;

struct Spectrum {
    Grid3 grid;
    std::vector<Complex> c;  // nx * ny * (nz/2+1), row-major

    explicit Spectrum(const Grid3& g)
        : grid(g), c(std::size_t(g.n[0]) * g.n[1] * (g.n[2] / 2 + 1)) {}

    int nzh() const { return grid.n[2] / 2 + 1; }
    std::size_t index(int i, int j, int k) const { return (std::size_t(i) * grid.n[1] + j) * nzh() + k; }
};

namespace detail {

class FftPlans {
public:
    explicit FftPlans(const std::array<int, 3>& n) : n_(n) {
        std::size_t nr = std::size_t(n[0]) * n[1] * n[2];
        std::size_t nc = std::size_t(n[0]) * n[1] * (n[2] / 2 + 1);
        double* r = fftw_alloc_real(nr);
        fftw_complex* c = fftw_alloc_complex(nc);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_3d(n[0], n[1], n[2], r, c, flags);
        inv_ = fftw_plan_dft_c2r_3d(n[0], n[1], n[2], c, r, flags);
        fftw_free(r);
        fftw_free(c);
    }
    ~FftPlans() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    fftw_plan forward() const { return fwd_; }
    fftw_plan inverse() const { return inv_; }

private:
    std::array<int, 3> n_;
    fftw_plan fwd_{};
    fftw_plan inv_{};
};

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// WRING_THREADS selects the FFTW thread count; unset means single-threaded.
inline void configure_threads_locked() {
    static bool done = false;
    if (done) return;
    done = true;
    if (const char* env = std::getenv("WRING_THREADS")) {
        int t = std::atoi(env);
        if (t > 1 && fftw_init_threads()) fftw_plan_with_nthreads(t);
    }
}

inline const FftPlans& plans_for(const Grid3& g) {
    static std::map<std::array<int, 3>, std::unique_ptr<FftPlans>> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    configure_threads_locked();
    auto it = cache.find(g.n);
    if (it == cache.end()) it = cache.emplace(g.n, std::make_unique<FftPlans>(g.n)).first;
    return *it->second;
}

inline int signed_mode(int index, int n) { return index <= n / 2 ? index : index - n; }

}  // namespace detail

/// Integer mode number for an FFT index along an axis (Nyquist reported as -n/2).
inline int mode_number(const Grid3& g, int axis, int index) {
    int n = g.n[axis];
    return index == n / 2 ? -n / 2 : detail::signed_mode(index, n);
}

/// Angular wavenumber used for differentiation; zero on the Nyquist plane.
inline double diff_wavenumber(const Grid3& g, int axis, int index) {
    int n = g.n[axis];
    if (index == n / 2) return 0.0;
    return 2.0 * std::numbers::pi / g.box[axis] * mode_number(g, axis, index);
}

inline Spectrum forward(const ScalarField& s) {
    const auto& p = detail::plans_for(s.grid);
    Spectrum out(s.grid);
    fftw_execute_dft_r2c(p.forward(), const_cast<double*>(s.data.data()),
                         reinterpret_cast<fftw_complex*>(out.c.data()));
    return out;
}

/// Inverse transform including the 1/N normalisation.
inline ScalarField inverse(Spectrum s) {
    const auto& p = detail::plans_for(s.grid);
    ScalarField out(s.grid);
    fftw_execute_dft_c2r(p.inverse(), reinterpret_cast<fftw_complex*>(s.c.data()), out.data.data());
    double inv_n = 1.0 / double(s.grid.size());
    for (double& x : out.data) x *= inv_n;
    return out;
}

/// Visit every stored spectral coefficient with its differentiation wavevector.
template <class F>
void for_each_mode(const Grid3& g, F&& f) {
    int nzh = g.n[2] / 2 + 1;
    std::size_t idx = 0;
    for (int i = 0; i < g.n[0]; ++i) {
        double kx = diff_wavenumber(g, 0, i);
        for (int j = 0; j < g.n[1]; ++j) {
            double ky = diff_wavenumber(g, 1, j);
            for (int k = 0; k < nzh; ++k, ++idx) {
                double kz = diff_wavenumber(g, 2, k);
                f(idx, i, j, k, Vec3{kx, ky, kz});
            }
        }
    }
}

inline ScalarField partial(const ScalarField& s, int axis) {
    Spectrum sp = forward(s);
    const Complex I(0.0, 1.0);
    for_each_mode(s.grid, [&](std::size_t idx, int, int, int, const Vec3& k) { sp.c[idx] *= I * k[axis]; });
    return inverse(std::move(sp));
}

inline VectorField grad(const ScalarField& s) {
    require_finite(s, "grad input");
    Spectrum sp = forward(s);
    VectorField out(s.grid);
    const Complex I(0.0, 1.0);
    for (int a = 0; a < 3; ++a) {
        Spectrum d(s.grid);
        for_each_mode(s.grid, [&](std::size_t idx, int, int, int, const Vec3& k) { d.c[idx] = I * k[a] * sp.c[idx]; });
        out[a] = inverse(std::move(d));
    }
    return out;
}

inline VectorField curl(const VectorField& v) {
    require_finite(v, "curl input");
    const Grid3& g = v.grid();
    std::array<Spectrum, 3> s{forward(v[0]), forward(v[1]), forward(v[2])};
    std::array<Spectrum, 3> r{Spectrum(g), Spectrum(g), Spectrum(g)};
    const Complex I(0.0, 1.0);
    for_each_mode(g, [&](std::size_t idx, int, int, int, const Vec3& k) {
        r[0].c[idx] = I * (k[1] * s[2].c[idx] - k[2] * s[1].c[idx]);
        r[1].c[idx] = I * (k[2] * s[0].c[idx] - k[0] * s[2].c[idx]);
        r[2].c[idx] = I * (k[0] * s[1].c[idx] - k[1] * s[0].c[idx]);
    });
    VectorField out(g);
    for (int a = 0; a < 3; ++a) out[a] = inverse(std::move(r[a]));
    return out;
}

inline ScalarField div(const VectorField& v) {
    require_finite(v, "div input");
    const Grid3& g = v.grid();
    std::array<Spectrum, 3> s{forward(v[0]), forward(v[1]), forward(v[2])};
    Spectrum r(g);
    const Complex I(0.0, 1.0);
    for_each_mode(g, [&](std::size_t idx, int, int, int, const Vec3& k) {
        r.c[idx] = I * (k[0] * s[0].c[idx] + k[1] * s[1].c[idx] + k[2] * s[2].c[idx]);
    });
    return inverse(std::move(r));
}

/// Zero-mean solution of lap(phi) = s (the mean of s is ignored).
inline ScalarField inverse_laplacian(const ScalarField& s) {
    Spectrum sp = forward(s);
    for_each_mode(s.grid, [&](std::size_t idx, int, int, int, const Vec3& k) {
        double k2 = dot(k, k);
        sp.c[idx] = k2 > 0.0 ? -sp.c[idx] / k2 : Complex(0.0);
    });
    return inverse(std::move(sp));
}

inline ScalarField laplacian(const ScalarField& s) {
    Spectrum sp = forward(s);
    for_each_mode(s.grid, [&](std::size_t idx, int, int, int, const Vec3& k) { sp.c[idx] *= -dot(k, k); });
    return inverse(std::move(sp));
}

/// Biot-Savart on the torus without precondition checks: the zero-mean,
/// divergence-free U whose curl is the solenoidal part of w.
inline VectorField biot_savart(const VectorField& w) {
    const Grid3& g = w.grid();
    std::array<Spectrum, 3> s{forward(w[0]), forward(w[1]), forward(w[2])};
    std::array<Spectrum, 3> r{Spectrum(g), Spectrum(g), Spectrum(g)};
    const Complex I(0.0, 1.0);
    for_each_mode(g, [&](std::size_t idx, int, int, int, const Vec3& k) {
        double k2 = dot(k, k);
        if (k2 == 0.0) return;
        Complex f = I / k2;
        r[0].c[idx] = f * (k[1] * s[2].c[idx] - k[2] * s[1].c[idx]);
        r[1].c[idx] = f * (k[2] * s[0].c[idx] - k[0] * s[2].c[idx]);
        r[2].c[idx] = f * (k[0] * s[1].c[idx] - k[1] * s[0].c[idx]);
    });
    VectorField out(g);
    for (int a = 0; a < 3; ++a) out[a] = inverse(std::move(r[a]));
    return out;
}

/// Remove the gradient part and the mean of v (Leray projection on the torus).
inline VectorField solenoidal_part(const VectorField& v) {
    const Grid3& g = v.grid();
    std::array<Spectrum, 3> s{forward(v[0]), forward(v[1]), forward(v[2])};
    for_each_mode(g, [&](std::size_t idx, int, int, int, const Vec3& kv) {
        double k2 = dot(kv, kv);
        if (k2 == 0.0) {
            // mean and Nyquist-only modes are dropped
            for (int a = 0; a < 3; ++a) s[a].c[idx] = 0.0;
            return;
        }
        Complex kd = kv[0] * s[0].c[idx] + kv[1] * s[1].c[idx] + kv[2] * s[2].c[idx];
        for (int a = 0; a < 3; ++a) s[a].c[idx] -= kv[a] * kd / k2;
    });
    VectorField out(g);
    for (int a = 0; a < 3; ++a) out[a] = inverse(std::move(s[a]));
    return out;
}

/// Tolerances for the inverse-curl preconditions, relative to the field scale.
struct InverseCurlTolerance {
    double mean = 1e-10;
    double divergence = 1e-8;
};

/// Velocity from vorticity: curl U = w, div U = 0, zero mean (harmonic part
/// fixed to zero). Rejects w with nonzero mean or nonzero divergence.
inline VectorField inverse_curl(const VectorField& w, InverseCurlTolerance tol = {}) {
    require_finite(w, "inverse_curl input");
    const Grid3& g = w.grid();
    double scale = w.max_norm();
    if (scale == 0.0) return VectorField(g);
    for (int a = 0; a < 3; ++a)
        if (std::abs(w[a].mean()) > tol.mean * scale)
            fail(ErrorKind::NonZeroMeanVorticity,
                 "component " + std::to_string(a) + " of the vorticity has nonzero mean");
    double kscale = 2.0 * std::numbers::pi / g.min_spacing();
    if (div(w).max_abs() > tol.divergence * scale * kscale)
        fail(ErrorKind::NotDivergenceFree, "vorticity divergence exceeds tolerance");
    return biot_savart(w);
}

/// Integral over the box (trapezoid rule; spectrally accurate for periodic data).
inline double integrate(const ScalarField& s) {
    require_finite(s, "integrand");
    return compensated_sum(s.data) * s.grid.cell_volume();
}

/// Sum of squared spectral coefficients scaled to match integrate(s*s).
inline double spectral_energy(const ScalarField& s) {
    Spectrum sp = forward(s);
    const Grid3& g = s.grid;
    int nz = g.n[2];
    std::vector<double> terms;
    terms.reserve(sp.c.size());
    for_each_mode(g, [&](std::size_t idx, int, int, int k, const Vec3&) {
        double w = (k == 0 || k == nz / 2) ? 1.0 : 2.0;
        terms.push_back(w * std::norm(sp.c[idx]));
    });
    double n = double(g.size());
    return compensated_sum(terms) * g.volume() / (n * n);
}

/// Largest retained |mode| per axis under the 2/3 rule.
inline int dealias_cutoff(int n) { return (n - 1) / 3; }

/// Zero every Fourier mode outside the 2/3-rule box.
inline ScalarField dealias(const ScalarField& s) {
    Spectrum sp = forward(s);
    const Grid3& g = s.grid;
    std::array<int, 3> cut{dealias_cutoff(g.n[0]), dealias_cutoff(g.n[1]), dealias_cutoff(g.n[2])};
    for_each_mode(g, [&](std::size_t idx, int i, int j, int k, const Vec3&) {
        if (std::abs(mode_number(g, 0, i)) > cut[0] || std::abs(mode_number(g, 1, j)) > cut[1] ||
            std::abs(mode_number(g, 2, k)) > cut[2])
            sp.c[idx] = 0.0;
    });
    return inverse(std::move(sp));
}

inline VectorField dealias(const VectorField& v) {
    VectorField r(v.grid());
    for (int a = 0; a < 3; ++a) r[a] = dealias(v[a]);
    return r;
}

}  // namespace wring

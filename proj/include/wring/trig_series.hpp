#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "wrg1.hpp"

namespace wring {

enum class TrigFn { Cos, Sin };

/// amp * prod_a fn_a(2 pi m_a x_a / L_a + phase_a)
struct TrigTerm {
    double amp = 1.0;
    Vec3 mode{0, 0, 0};
    std::array<TrigFn, 3> fn{TrigFn::Cos, TrigFn::Cos, TrigFn::Cos};
    Vec3 phase{0, 0, 0};
};

/// constant + linear . x + sum of separable trigonometric products, with an
/// analytic gradient. The linear part lets g = z style potentials through:
/// their gradient is periodic even though the scalar is not.
struct TrigSeries {
    double constant = 0.0;
    Vec3 linear{0, 0, 0};
    std::vector<TrigTerm> terms;

    static TrigSeries constant_value(double c) { return TrigSeries{c, {0, 0, 0}, {}}; }
    static TrigSeries coordinate(int axis) {
        TrigSeries s;
        s.linear[axis] = 1.0;
        return s;
    }

    double value(const Grid3& g, const Vec3& x) const {
        double v = constant + dot(linear, x);
        for (const auto& t : terms) {
            double p = t.amp;
            for (int a = 0; a < 3; ++a) p *= factor(g, t, a, x, false);
            v += p;
        }
        return v;
    }

    Vec3 gradient(const Grid3& g, const Vec3& x) const {
        Vec3 d = linear;
        for (const auto& t : terms)
            for (int a = 0; a < 3; ++a) {
                double p = t.amp;
                for (int b = 0; b < 3; ++b) p *= factor(g, t, b, x, a == b);
                d[a] += p;
            }
        return d;
    }

    bool has_linear_part() const { return linear[0] != 0.0 || linear[1] != 0.0 || linear[2] != 0.0; }

    /// Gradient periodicity requires integer mode numbers on the given box.
    void require_periodic_gradient(const std::string& what) const {
        for (const auto& t : terms)
            for (double m : t.mode)
                if (!std::isfinite(m) || std::abs(m - std::round(m)) > 1e-12)
                    fail(ErrorKind::NonPeriodic, what + " has a non-integer mode number");
    }

    void require_periodic(const std::string& what) const {
        require_periodic_gradient(what);
        if (has_linear_part()) fail(ErrorKind::NonPeriodic, what + " has a linear (non-periodic) part");
    }

private:
    static double factor(const Grid3& g, const TrigTerm& t, int a, const Vec3& x, bool derivative) {
        double k = 2.0 * std::numbers::pi * t.mode[a] / g.box[a];
        double arg = k * x[a] + t.phase[a];
        if (!derivative) return t.fn[a] == TrigFn::Cos ? std::cos(arg) : std::sin(arg);
        return t.fn[a] == TrigFn::Cos ? -k * std::sin(arg) : k * std::cos(arg);
    }
};

/// Zero-mean random trigonometric polynomial with integer modes |m_a| <= max_mode.
template <class Rng>
TrigSeries random_band_limited(Rng& rng, int max_mode, int terms, double amplitude = 1.0) {
    std::uniform_int_distribution<int> mode(0, max_mode);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> amp(-amplitude, amplitude);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    TrigSeries s;
    while (int(s.terms.size()) < terms) {
        TrigTerm t;
        t.amp = amp(rng);
        t.mode = {double(mode(rng)), double(mode(rng)), double(mode(rng))};
        if (t.mode[0] == 0 && t.mode[1] == 0 && t.mode[2] == 0) continue;
        for (int a = 0; a < 3; ++a) {
            t.fn[a] = coin(rng) ? TrigFn::Sin : TrigFn::Cos;
            t.phase[a] = phase(rng);
        }
        s.terms.push_back(t);
    }
    return s;
}

inline void to_json(json& j, const TrigTerm& t) {
    json fn = json::array();
    for (auto f : t.fn) fn.push_back(f == TrigFn::Cos ? "cos" : "sin");
    j = {{"amp", t.amp}, {"mode", t.mode}, {"fn", fn}, {"phase", t.phase}};
}

inline void from_json(const json& j, TrigTerm& t) {
    t.amp = j.value("amp", 1.0);
    t.mode = j.value("mode", Vec3{0, 0, 0});
    t.phase = j.value("phase", Vec3{0, 0, 0});
    if (j.contains("fn")) {
        const auto& fn = j.at("fn");
        if (!fn.is_array() || fn.size() != 3) fail(ErrorKind::BadArgument, "trig term 'fn' needs three entries");
        for (int a = 0; a < 3; ++a) {
            auto s = fn[a].get<std::string>();
            if (s == "cos")
                t.fn[a] = TrigFn::Cos;
            else if (s == "sin")
                t.fn[a] = TrigFn::Sin;
            else
                fail(ErrorKind::BadArgument, "trig term function must be 'cos' or 'sin'");
        }
    }
}

inline void to_json(json& j, const TrigSeries& s) {
    j = {{"const", s.constant}, {"linear", s.linear}, {"terms", s.terms}};
}

inline void from_json(const json& j, TrigSeries& s) {
    s.constant = j.value("const", 0.0);
    s.linear = j.value("linear", Vec3{0, 0, 0});
    s.terms = j.value("terms", std::vector<TrigTerm>{});
}

}  // namespace wring

#pragma once

#include <numbers>

#include "wrg1.hpp"

namespace wring {

/// Every tunable default in one place. `wring --defaults` prints this table
/// and docs/defaults.json mirrors it.
struct Defaults {
    int grid_n = 64;
    double box_length = 2 * std::numbers::pi;

    double integrability_tol = 1e-8;       // max|A.W| / (max|A| max|W|)
    double curl_consistency_tol = 1e-8;    // |curl A - W| / |W|, generated bundles
    double diffeo_consistency_tol = 1e-6;  // |curl A' - W'| / |W'| after a shear map
    double flux_tol = 1e-10;               // |flux| / (max|W| * area)
    double mean_tol = 1e-10;               // inverse_curl mean check, relative
    double divergence_tol = 1e-8;          // inverse_curl divergence check, relative

    double eta_eps = 1e-6;            // exclusion threshold on the eta denominator, relative to its max
    double irrotational_floor = 1e-10;  // |W| below this (relative) admits H = 0
    double min_coverage = 0.5;        // minimum admissible volume fraction for an eta choice
    double identity_tol = 1e-7;       // max|A x H - W| / max|W| on the mask

    double clebsch_min_f = 1e-3;  // min|f| / max|f| for a Clebsch potential
    double kupka_radius_fraction = 0.25;
    double ring_core_radius = 0.35;
    double ring_min_clearance = 1e-3;

    double cfl = 0.4;
    double cfl_max = 0.5;
    double drift_bound = 1e-6;
    double steady_rate_threshold = 1e-12;
    double steady_gv_threshold = 1e-6;
    double conservation_eps = 0.2;
};

inline const Defaults& defaults() {
    static const Defaults d{};
    return d;
}

inline json defaults_json() {
    const Defaults& d = defaults();
    return {
        {"grid_n", d.grid_n},
        {"box_length", d.box_length},
        {"integrability_tol", d.integrability_tol},
        {"curl_consistency_tol", d.curl_consistency_tol},
        {"diffeo_consistency_tol", d.diffeo_consistency_tol},
        {"flux_tol", d.flux_tol},
        {"mean_tol", d.mean_tol},
        {"divergence_tol", d.divergence_tol},
        {"eta_eps", d.eta_eps},
        {"irrotational_floor", d.irrotational_floor},
        {"min_coverage", d.min_coverage},
        {"identity_tol", d.identity_tol},
        {"clebsch_min_f", d.clebsch_min_f},
        {"kupka_radius_fraction", d.kupka_radius_fraction},
        {"ring_core_radius", d.ring_core_radius},
        {"ring_min_clearance", d.ring_min_clearance},
        {"cfl", d.cfl},
        {"cfl_max", d.cfl_max},
        {"drift_bound", d.drift_bound},
        {"steady_rate_threshold", d.steady_rate_threshold},
        {"steady_gv_threshold", d.steady_gv_threshold},
        {"conservation_eps", d.conservation_eps},
    };
}

}  // namespace wring

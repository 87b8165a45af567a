#pragma once

// Shared expensive fixtures, built once per test binary run.

#include "geodex/census.hpp"
#include "geodex/geodesic.hpp"
#include "geodex/metric.hpp"

namespace fixtures {

inline const geodex::metric_spec& plane() {
    static const geodex::metric_spec m =
        geodex::make_flat_metric(geodex::make_euclidean_plane());
    return m;
}

inline const geodex::metric_spec& torus() {
    static const geodex::metric_spec m =
        geodex::make_flat_metric(geodex::make_unit_square_torus());
    return m;
}

inline const geodex::metric_spec& sphere() {
    static const geodex::metric_spec m = geodex::make_round_sphere_metric(1.0);
    return m;
}

inline const geodex::metric_spec& randers_torus() {
    static const geodex::metric_spec m = [] {
        Eigen::VectorXd beta(2);
        beta << 0.3, 0.2;
        return geodex::make_randers_metric(geodex::make_unit_square_torus(), beta);
    }();
    return m;
}

inline Eigen::VectorXd pt(double a, double b) {
    Eigen::VectorXd x(2);
    x << a, b;
    return x;
}

/// The unit-sphere equator as a closed constant-speed geodesic on [0, 1].
inline const geodex::geodesic_path& equator() {
    static const geodex::geodesic_path p =
        geodex::integrate_ivp(sphere(), pt(M_PI / 2, 0.0), pt(0.0, 2.0 * M_PI), 2000);
    return p;
}

/// Great-circle arc of the given length starting on the equator.
inline geodex::geodesic_path equator_arc(double length, int steps = 1000) {
    return geodex::integrate_ivp(sphere(), pt(M_PI / 2, 0.0), pt(0.0, length), steps);
}

/// Census of torus geodesics (0,0) -> (0.3, 0.4) below length 2.
inline const geodex::census_table& torus_census() {
    static const geodex::census_table t = geodex::build_census(
        torus(), pt(0.0, 0.0), pt(0.3, 0.4), 2.0, 1, 1000, 0, /*with_hessian=*/false);
    return t;
}

/// Census of sphere geodesics between equatorial points phi = 0 and phi = 1
/// below length 4*pi (covers indices 0 through 3).
inline const geodex::census_table& sphere_census() {
    static const geodex::census_table t =
        geodex::build_census(sphere(), pt(M_PI / 2, 0.0), pt(M_PI / 2, 1.0), 4.0 * M_PI);
    return t;
}

}  // namespace fixtures

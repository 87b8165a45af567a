#pragma once

#include <Eigen/Dense>
#include <vector>

namespace geodex {

enum class chart_kind {
    euclidean_plane,
    periodic_lattice,
    sphere_chart,
    ellipsoid_chart,
};

std::string chart_kind_name(chart_kind k);
chart_kind chart_kind_from_name(const std::string& name);

/// A manifold presented in one coordinate chart. Tori are charts with a
/// periodic lattice identification; spheres and ellipsoids use spherical
/// coordinates (theta, phi) with an excluded polar cap, and carry the phi
/// period 2*pi as a rank-one lattice so closure and endpoint arithmetic can
/// be done modulo periods uniformly.
struct chart_manifold {
    int dimension = 2;
    chart_kind kind = chart_kind::euclidean_plane;

    Eigen::MatrixXd lattice;       ///< n x k period vectors (k may be < n)
    double radius = 1.0;           ///< sphere chart
    Eigen::Vector3d semi_axes{1.0, 1.0, 1.0};  ///< ellipsoid chart
    double pole_exclusion = 0.0;   ///< radians, sphere/ellipsoid charts

    /// Validates invariants (dimension >= 2, independent lattice,
    /// positive pole exclusion where required); throws domain_error.
    void validate() const;

    bool in_domain(const Eigen::VectorXd& x) const;

    /// Chart coefficient matrix a(x) of the base Riemannian structure.
    Eigen::MatrixXd metric_coeff(const Eigen::VectorXd& x) const;

    /// Partial derivatives d_k a(x), one matrix per coordinate direction.
    std::vector<Eigen::MatrixXd> metric_coeff_grad(const Eigen::VectorXd& x) const;

    bool has_periods() const { return lattice.size() > 0; }

    /// Subtracts the nearest combination of period vectors from dx.
    Eigen::VectorXd wrap_displacement(const Eigen::VectorXd& dx) const;

    /// Chart-coordinate distance between points modulo periods.
    double wrapped_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

chart_manifold make_euclidean_plane();
chart_manifold make_unit_square_torus();
chart_manifold make_lattice_torus(const Eigen::MatrixXd& lattice);
chart_manifold make_sphere(double radius, double pole_exclusion = 0.05);
chart_manifold make_ellipsoid(double a1, double a2, double a3, double pole_exclusion = 0.05);

}  // namespace geodex

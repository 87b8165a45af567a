#include "geodex/chart.hpp"

#include <cmath>

#include "geodex/errors.hpp"

namespace geodex {

std::string chart_kind_name(chart_kind k) {
    switch (k) {
        case chart_kind::euclidean_plane: return "euclidean-plane";
        case chart_kind::periodic_lattice: return "periodic-lattice";
        case chart_kind::sphere_chart: return "sphere-chart";
        case chart_kind::ellipsoid_chart: return "ellipsoid-chart";
    }
    return "unknown";
}

chart_kind chart_kind_from_name(const std::string& name) {
    if (name == "euclidean-plane") return chart_kind::euclidean_plane;
    if (name == "periodic-lattice") return chart_kind::periodic_lattice;
    if (name == "sphere-chart") return chart_kind::sphere_chart;
    if (name == "ellipsoid-chart") return chart_kind::ellipsoid_chart;
    throw domain_error("unknown chart kind: " + name);
}

void chart_manifold::validate() const {
    if (dimension < 2) throw domain_error("chart dimension must be at least 2");
    if (kind == chart_kind::periodic_lattice) {
        if (lattice.rows() != dimension || lattice.cols() < 1)
            throw domain_error("periodic lattice needs period vectors of chart dimension");
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(lattice);
        if (svd.rank() < lattice.cols())
            throw domain_error("lattice basis is linearly dependent");
    }
    if (kind == chart_kind::sphere_chart || kind == chart_kind::ellipsoid_chart) {
        if (pole_exclusion <= 0.0)
            throw domain_error("polar charts require a positive pole exclusion margin");
        if (dimension != 2)
            throw domain_error("polar charts are two-dimensional");
    }
    if (kind == chart_kind::sphere_chart && radius <= 0.0)
        throw domain_error("sphere radius must be positive");
    if (kind == chart_kind::ellipsoid_chart && semi_axes.minCoeff() <= 0.0)
        throw domain_error("ellipsoid semi-axes must be positive");
}

bool chart_manifold::in_domain(const Eigen::VectorXd& x) const {
    if (kind == chart_kind::sphere_chart || kind == chart_kind::ellipsoid_chart) {
        const double theta = x[0];
        return theta > pole_exclusion && theta < M_PI - pole_exclusion;
    }
    return true;
}

namespace {

// Embedding derivatives of (a1 sin t cos p, a2 sin t sin p, a3 cos t).
void ellipsoid_frames(const Eigen::Vector3d& ax, double th, double ph, Eigen::Vector3d& Xt,
                      Eigen::Vector3d& Xp, Eigen::Vector3d& Xtt, Eigen::Vector3d& Xtp,
                      Eigen::Vector3d& Xpp) {
    const double st = std::sin(th), ct = std::cos(th);
    const double sp = std::sin(ph), cp = std::cos(ph);
    Xt << ax[0] * ct * cp, ax[1] * ct * sp, -ax[2] * st;
    Xp << -ax[0] * st * sp, ax[1] * st * cp, 0.0;
    Xtt << -ax[0] * st * cp, -ax[1] * st * sp, -ax[2] * ct;
    Xtp << -ax[0] * ct * sp, ax[1] * ct * cp, 0.0;
    Xpp << -ax[0] * st * cp, -ax[1] * st * sp, 0.0;
}

}  // namespace

Eigen::MatrixXd chart_manifold::metric_coeff(const Eigen::VectorXd& x) const {
    switch (kind) {
        case chart_kind::euclidean_plane:
        case chart_kind::periodic_lattice:
            return Eigen::MatrixXd::Identity(dimension, dimension);
        case chart_kind::sphere_chart: {
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
            const double s = std::sin(x[0]);
            a(0, 0) = radius * radius;
            a(1, 1) = radius * radius * s * s;
            return a;
        }
        case chart_kind::ellipsoid_chart: {
            Eigen::Vector3d Xt, Xp, Xtt, Xtp, Xpp;
            ellipsoid_frames(semi_axes, x[0], x[1], Xt, Xp, Xtt, Xtp, Xpp);
            Eigen::MatrixXd a(2, 2);
            a(0, 0) = Xt.dot(Xt);
            a(0, 1) = a(1, 0) = Xt.dot(Xp);
            a(1, 1) = Xp.dot(Xp);
            return a;
        }
    }
    throw domain_error("unreachable chart kind");
}

std::vector<Eigen::MatrixXd> chart_manifold::metric_coeff_grad(const Eigen::VectorXd& x) const {
    std::vector<Eigen::MatrixXd> grad(dimension, Eigen::MatrixXd::Zero(dimension, dimension));
    switch (kind) {
        case chart_kind::euclidean_plane:
        case chart_kind::periodic_lattice:
            return grad;
        case chart_kind::sphere_chart: {
            grad[0](1, 1) = radius * radius * std::sin(2.0 * x[0]);
            return grad;
        }
        case chart_kind::ellipsoid_chart: {
            Eigen::Vector3d Xt, Xp, Xtt, Xtp, Xpp;
            ellipsoid_frames(semi_axes, x[0], x[1], Xt, Xp, Xtt, Xtp, Xpp);
            const Eigen::Vector3d d1[2] = {Xt, Xp};
            const Eigen::Vector3d d2[2][2] = {{Xtt, Xtp}, {Xtp, Xpp}};
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        grad[k](i, j) = d2[k][i].dot(d1[j]) + d1[i].dot(d2[k][j]);
            return grad;
        }
    }
    throw domain_error("unreachable chart kind");
}

Eigen::VectorXd chart_manifold::wrap_displacement(const Eigen::VectorXd& dx) const {
    if (!has_periods()) return dx;
    // Nearest lattice combination by least-squares rounding with a +-1
    // neighborhood search (robust near Voronoi boundaries).
    const Eigen::MatrixXd& L = lattice;
    const Eigen::VectorXd k0 =
        (L.transpose() * L).ldlt().solve(L.transpose() * dx).array().round();
    const int kcols = static_cast<int>(L.cols());
    Eigen::VectorXd best = dx - L * k0;
    double best_norm = best.squaredNorm();
    Eigen::VectorXd k = k0;
    const int span = 1;
    std::vector<int> offset(kcols, -span);
    while (true) {
        for (int c = 0; c < kcols; ++c) k[c] = k0[c] + offset[c];
        const Eigen::VectorXd cand = dx - L * k;
        const double norm = cand.squaredNorm();
        if (norm < best_norm) {
            best_norm = norm;
            best = cand;
        }
        int c = 0;
        while (c < kcols && ++offset[c] > span) offset[c++] = -span;
        if (c == kcols) break;
    }
    return best;
}

double chart_manifold::wrapped_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return wrap_displacement(y - x).norm();
}

chart_manifold make_euclidean_plane() {
    chart_manifold c;
    c.dimension = 2;
    c.kind = chart_kind::euclidean_plane;
    c.validate();
    return c;
}

chart_manifold make_unit_square_torus() {
    return make_lattice_torus(Eigen::MatrixXd::Identity(2, 2));
}

chart_manifold make_lattice_torus(const Eigen::MatrixXd& lattice) {
    chart_manifold c;
    c.dimension = static_cast<int>(lattice.rows());
    c.kind = chart_kind::periodic_lattice;
    c.lattice = lattice;
    c.validate();
    return c;
}

chart_manifold make_sphere(double radius, double pole_exclusion) {
    chart_manifold c;
    c.dimension = 2;
    c.kind = chart_kind::sphere_chart;
    c.radius = radius;
    c.pole_exclusion = pole_exclusion;
    c.lattice = Eigen::MatrixXd::Zero(2, 1);
    c.lattice(1, 0) = 2.0 * M_PI;  // phi period
    c.validate();
    return c;
}

chart_manifold make_ellipsoid(double a1, double a2, double a3, double pole_exclusion) {
    chart_manifold c;
    c.dimension = 2;
    c.kind = chart_kind::ellipsoid_chart;
    c.semi_axes << a1, a2, a3;
    c.pole_exclusion = pole_exclusion;
    c.lattice = Eigen::MatrixXd::Zero(2, 1);
    c.lattice(1, 0) = 2.0 * M_PI;  // phi period
    c.validate();
    return c;
}

}  // namespace geodex

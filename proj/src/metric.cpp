#include "geodex/metric.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "geodex/errors.hpp"
#include "geodex/hash.hpp"

namespace geodex {

std::string metric_kind_name(metric_kind k) {
    return k == metric_kind::riemannian ? "riemannian" : "randers";
}

metric_kind metric_kind_from_name(const std::string& name) {
    if (name == "riemannian") return metric_kind::riemannian;
    if (name == "randers") return metric_kind::randers;
    throw domain_error("unknown metric kind: " + name);
}

void metric_spec::validate() const {
    manifold.validate();
    if (kind == metric_kind::randers && beta.size() != manifold.dimension)
        throw domain_error("randers one-form must have one component per chart coordinate");
}

namespace {

void require_in_domain(const metric_spec& m, const Eigen::VectorXd& x) {
    if (!m.manifold.in_domain(x)) {
        std::ostringstream os;
        os << "point outside chart domain (theta = " << x[0] << ")";
        throw domain_error(os.str());
    }
}

/// Closed-form fundamental tensor without the positive-definiteness gate.
Eigen::MatrixXd fundamental_tensor_raw(const metric_spec& m, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& v) {
    const Eigen::MatrixXd a = m.manifold.metric_coeff(x);
    if (m.kind == metric_kind::riemannian) return a;
    const double alpha = std::sqrt(v.dot(a * v));
    const Eigen::VectorXd l = a * v / alpha;
    const double F = alpha + m.beta.dot(v);
    const Eigen::VectorXd lb = l + m.beta;
    return (F / alpha) * (a - l * l.transpose()) + lb * lb.transpose();
}

}  // namespace

double eval_F(const metric_spec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    require_in_domain(m, x);
    if (v.isZero(0.0)) return 0.0;
    const Eigen::MatrixXd a = m.manifold.metric_coeff(x);
    const double alpha = std::sqrt(v.dot(a * v));
    if (m.kind == metric_kind::riemannian) return alpha;
    return alpha + m.beta.dot(v);
}

Eigen::MatrixXd fundamental_tensor(const metric_spec& m, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v) {
    require_in_domain(m, x);
    if (v.isZero(0.0)) throw domain_error("fundamental tensor requires a nonzero vector");
    Eigen::MatrixXd g = fundamental_tensor_raw(m, x, v);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        std::vector<double> xs(x.data(), x.data() + x.size());
        std::vector<double> vs(v.data(), v.data() + v.size());
        throw convexity_error("fundamental tensor not positive definite", xs, vs);
    }
    return g;
}

Eigen::MatrixXd fundamental_tensor_fd(const metric_spec& m, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& v) {
    // Central second differences of F^2 with the fixed step for second
    // derivatives; g = Hessian / 2.
    const double h = 1e-4;
    const int n = static_cast<int>(v.size());
    Eigen::MatrixXd g(n, n);
    auto F2 = [&](const Eigen::VectorXd& w) {
        const double f = eval_F(m, x, w);
        return f * f;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Eigen::VectorXd ei = Eigen::VectorXd::Zero(n), ej = Eigen::VectorXd::Zero(n);
            ei[i] = h;
            ej[j] = h;
            const double d =
                (F2(v + ei + ej) - F2(v + ei - ej) - F2(v - ei + ej) + F2(v - ei - ej)) /
                (4.0 * h * h);
            g(i, j) = g(j, i) = d / 2.0;
        }
    return g;
}

std::vector<Eigen::MatrixXd> cartan_tensor(const metric_spec& m, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& v) {
    require_in_domain(m, x);
    const int n = static_cast<int>(v.size());
    std::vector<Eigen::MatrixXd> C(n, Eigen::MatrixXd::Zero(n, n));
    if (m.kind == metric_kind::riemannian) return C;  // quadratic F^2: exact zero
    const Eigen::MatrixXd a = m.manifold.metric_coeff(x);
    const double alpha = std::sqrt(v.dot(a * v));
    const Eigen::VectorXd l = a * v / alpha;
    const Eigen::VectorXd mvec = m.beta - (m.beta.dot(v) / alpha) * l;
    const Eigen::MatrixXd A = a - l * l.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                C[i](j, k) =
                    (A(i, j) * mvec[k] + A(i, k) * mvec[j] + A(j, k) * mvec[i]) / alpha;
    return C;
}

std::vector<Eigen::MatrixXd> cartan_tensor_fd(const metric_spec& m, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& v) {
    // Third-order central differences of F^2 with the fixed third-derivative
    // step; C = (third vertical derivative of F^2) / 2... the trilinear form
    // normalization matches the closed form: C(u1,u2,u3) = (1/2) d^3 F^2.
    const double h = 1e-3;
    const int n = static_cast<int>(v.size());
    auto F2 = [&](const Eigen::VectorXd& w) {
        const double f = eval_F(m, x, w);
        return f * f;
    };
    std::vector<Eigen::MatrixXd> C(n, Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n) * h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int si = -1; si <= 1; si += 2)
                    for (int sj = -1; sj <= 1; sj += 2)
                        for (int sk = -1; sk <= 1; sk += 2)
                            s += si * sj * sk *
                                 F2(v + si * E.col(i) + sj * E.col(j) + sk * E.col(k));
                C[i](j, k) = s / (8.0 * h * h * h) / 2.0;
            }
    return C;
}

convexity_report check_strong_convexity(const metric_spec& m, int sample_count, unsigned seed) {
    convexity_report rep;
    rep.samples = sample_count;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = m.manifold.dimension;
    for (int s = 0; s < sample_count; ++s) {
        Eigen::VectorXd x(n);
        switch (m.manifold.kind) {
            case chart_kind::euclidean_plane:
                for (int i = 0; i < n; ++i) x[i] = 4.0 * unit(rng) - 2.0;
                break;
            case chart_kind::periodic_lattice: {
                Eigen::VectorXd frac(m.manifold.lattice.cols());
                for (int i = 0; i < frac.size(); ++i) frac[i] = unit(rng);
                x = m.manifold.lattice * frac;
                break;
            }
            case chart_kind::sphere_chart:
            case chart_kind::ellipsoid_chart: {
                const double margin = m.manifold.pole_exclusion;
                x.resize(2);
                x[0] = margin + (M_PI - 2.0 * margin) * unit(rng);
                x[1] = 2.0 * M_PI * unit(rng);
                break;
            }
        }
        Eigen::VectorXd v(n);
        const double angle = 2.0 * M_PI * unit(rng);
        v[0] = std::cos(angle);
        v[1] = std::sin(angle);
        for (int i = 2; i < n; ++i) v[i] = 0.0;
        const Eigen::MatrixXd g = fundamental_tensor_raw(m, x, v);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (lo < rep.min_eigenvalue) {
            rep.min_eigenvalue = lo;
            rep.witness_x = x;
            rep.witness_v = v;
        }
    }
    rep.pass = rep.min_eigenvalue > 0.0;
    return rep;
}

namespace {

std::string canonical_id_text(const metric_spec& m) {
    std::ostringstream os;
    os.precision(17);
    os << chart_kind_name(m.manifold.kind) << "|d" << m.manifold.dimension;
    if (m.manifold.kind == chart_kind::sphere_chart)
        os << "|r" << m.manifold.radius << "|pe" << m.manifold.pole_exclusion;
    if (m.manifold.kind == chart_kind::ellipsoid_chart)
        os << "|ax" << m.manifold.semi_axes[0] << "," << m.manifold.semi_axes[1] << ","
           << m.manifold.semi_axes[2] << "|pe" << m.manifold.pole_exclusion;
    if (m.manifold.kind == chart_kind::periodic_lattice) {
        os << "|L";
        for (int c = 0; c < m.manifold.lattice.cols(); ++c)
            for (int r = 0; r < m.manifold.lattice.rows(); ++r)
                os << m.manifold.lattice(r, c) << ",";
    }
    os << "|" << metric_kind_name(m.kind);
    if (m.kind == metric_kind::randers) {
        os << "|b";
        for (int i = 0; i < m.beta.size(); ++i) os << m.beta[i] << ",";
    }
    return os.str();
}

metric_spec finalize(metric_spec m) {
    m.validate();
    m.id = fnv1a_hex(canonical_id_text(m));
    return m;
}

}  // namespace

metric_spec make_flat_metric(chart_manifold manifold) {
    metric_spec m;
    m.manifold = std::move(manifold);
    m.kind = metric_kind::riemannian;
    m.reversible = true;
    return finalize(std::move(m));
}

metric_spec make_randers_metric(chart_manifold manifold, const Eigen::VectorXd& beta) {
    metric_spec m;
    m.manifold = std::move(manifold);
    m.kind = metric_kind::randers;
    m.beta = beta;
    m.reversible = beta.isZero(0.0);
    return finalize(std::move(m));
}

metric_spec make_round_sphere_metric(double radius, double pole_exclusion) {
    metric_spec m;
    m.manifold = make_sphere(radius, pole_exclusion);
    m.kind = metric_kind::riemannian;
    m.reversible = true;
    return finalize(std::move(m));
}

metric_spec make_ellipsoid_metric(double a1, double a2, double a3, double pole_exclusion) {
    metric_spec m;
    m.manifold = make_ellipsoid(a1, a2, a3, pole_exclusion);
    m.kind = metric_kind::riemannian;
    m.reversible = true;
    return finalize(std::move(m));
}

}  // namespace geodex

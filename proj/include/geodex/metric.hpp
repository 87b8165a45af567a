#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "geodex/chart.hpp"

namespace geodex {

enum class metric_kind { riemannian, randers };

std::string metric_kind_name(metric_kind k);
metric_kind metric_kind_from_name(const std::string& name);

/// A Finsler structure F on a chart manifold. riemannian: F^2 = a(x)(v, v).
/// randers: F = sqrt(a(x)(v, v)) + beta(v) with a constant-coefficient
/// one-form beta in chart components; strongly convex iff |beta|_a < 1.
struct metric_spec {
    chart_manifold manifold;
    metric_kind kind = metric_kind::riemannian;
    Eigen::VectorXd beta;     ///< randers one-form components (empty otherwise)
    bool reversible = true;   ///< F(-v) = F(v) for all sampled v
    std::string id;           ///< config hash stamped into outputs

    void validate() const;
};

/// F(x, v). Zero only for v = 0. Throws domain_error off-chart.
double eval_F(const metric_spec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

/// Fundamental tensor g_v: the vertical Hessian of F^2/2, closed form.
/// Throws convexity_error when the result is not positive definite.
Eigen::MatrixXd fundamental_tensor(const metric_spec& m, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v);

/// Same tensor by central finite differences of F^2 (step 1e-4); the
/// independent cross-check route for the closed form.
Eigen::MatrixXd fundamental_tensor_fd(const metric_spec& m, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& v);

/// Cartan tensor C_v (third vertical derivative of F^2/2), closed form;
/// identically zero for riemannian kinds. Returned as one matrix per first
/// slot: result[i](j, k) = C_v(e_i, e_j, e_k).
std::vector<Eigen::MatrixXd> cartan_tensor(const metric_spec& m, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& v);

/// Cartan tensor by third-order central finite differences of F^2 (step 1e-3).
std::vector<Eigen::MatrixXd> cartan_tensor_fd(const metric_spec& m, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& v);

struct convexity_report {
    bool pass = false;
    double min_eigenvalue = 0.0;
    Eigen::VectorXd witness_x, witness_v;  ///< sample attaining the minimum
    int samples = 0;
};

/// Samples (x, v) quasi-uniformly over the chart times the unit sphere of
/// directions with a seeded generator and reports the minimum eigenvalue of
/// g_v. Failures are reported, never thrown.
convexity_report check_strong_convexity(const metric_spec& m, int sample_count, unsigned seed);

metric_spec make_flat_metric(chart_manifold manifold);
metric_spec make_randers_metric(chart_manifold manifold, const Eigen::VectorXd& beta);
metric_spec make_round_sphere_metric(double radius, double pole_exclusion = 0.05);
metric_spec make_ellipsoid_metric(double a1, double a2, double a3, double pole_exclusion = 0.05);

}  // namespace geodex

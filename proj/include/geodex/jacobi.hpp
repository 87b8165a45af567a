#pragma once

#include <Eigen/Dense>
#include <vector>

#include "geodex/errors.hpp"
#include "geodex/geodesic.hpp"

namespace geodex {

/// Linearization of the geodesic flow along one geodesic. The variational
/// system in chart coordinates is
///     J'' = A(t) J + B(t) J'        (A = dS/dx, B = dS/dv, S = spray)
/// and the covariant form is recovered through the connection contraction
/// C(t) = -B(t)/2:
///     (d/dt + C)^2 J = R(t) J,      R = A + Cdot + C^2,
/// where R is the curvature operator J -> R^T(T,J)T in coordinates.
struct jacobi_system {
    metric_spec metric;
    geodesic_path geodesic;
    /// Samples live on a uniform grid of 2*var_steps+1 points (integer and
    /// half-integer multiples of 1/var_steps) so the variational integrator
    /// has exact midpoint coefficients.
    std::vector<double> sample_t;
    std::vector<Eigen::MatrixXd> curvature_samples;   ///< R(t)
    std::vector<Eigen::MatrixXd> connection_samples;  ///< C(t)
    std::vector<Eigen::MatrixXd> cdot_samples;        ///< flow derivative of C
    std::vector<Eigen::MatrixXd> gram_samples;        ///< g_T(t)
    int var_steps = 2000;  ///< step count for variational integration

    int dimension() const { return geodesic.dimension(); }
};

/// Pointwise linearization data at one phase point.
struct flow_linearization {
    Eigen::MatrixXd A;     ///< dS/dx
    Eigen::MatrixXd B;     ///< dS/dv
    Eigen::MatrixXd C;     ///< -B/2 (connection contraction)
    Eigen::MatrixXd Cdot;  ///< derivative of C along the flow
    Eigen::MatrixXd R;     ///< A + Cdot + C^2
    Eigen::MatrixXd G;     ///< fundamental tensor g_v
};

flow_linearization linearize_at(const metric_spec& m, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v, bool with_curvature = true);

/// Builds the variational system along a verified geodesic. Rejects paths
/// whose sampled acceleration deviates from the spray (relative residual
/// above 1e-5).
jacobi_system linearize(const metric_spec& m, const geodesic_path& gamma);

/// One sampled Jacobi field (values and coordinate derivatives on the
/// variational grid, t uniform with var_steps intervals).
struct jacobi_field {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> J;
    std::vector<Eigen::VectorXd> Jdot;
};

/// Fixed-step 4th-order integration of the variational system; linear in the
/// initial conditions to machine precision.
jacobi_field solve_jacobi(const jacobi_system& sys, const Eigen::VectorXd& J0,
                          const Eigen::VectorXd& J0dot);

/// Covariant derivative samples D J = Jdot + C J along the geodesic.
std::vector<Eigen::VectorXd> covariant_derivative(const jacobi_system& sys,
                                                  const jacobi_field& field);

/// The 2n x 2n matrix mapping (J(0), J'(0)) -> (J(1), J'(1)).
Eigen::MatrixXd monodromy(const jacobi_system& sys);

/// Dense state-transition record Phi(t_k) on an aligned sub-grid of the
/// variational grid (used by conjugate-point detection).
struct transition_record {
    std::vector<double> t;
    std::vector<Eigen::MatrixXd> Phi;  ///< 2n x 2n
};

transition_record transition_matrices(const jacobi_system& sys, int grid_points);

struct jacobi_subspaces {
    Eigen::MatrixXd monodromy;
    int dim_Jcl = 0;       ///< fields with J(1) = J(0)
    int dim_Jp = 0;        ///< periodic fields: monodromy fixed points
    int dim_J0 = 0;        ///< fields with J(0) = J(1) = 0
    int dim_J0_cap_Jp = 0;
    Eigen::MatrixXd basis_Jcl;  ///< 2n x dim_Jcl initial conditions (orthonormal)
    double rank_tolerance = 1e-6;
    std::vector<warning_kind> warnings;
};

/// Kernel dimensions of the closure / periodicity / Dirichlet conditions on
/// the monodromy, by SVD with rank_tol relative to the largest singular
/// value; near-cutoff singular values attach an ambiguous-rank warning.
jacobi_subspaces compute_jacobi_subspaces(const jacobi_system& sys, double rank_tol = 1e-6);

struct conjugate_point {
    double t = 0.0;
    int multiplicity = 1;
};

struct conjugate_report {
    std::vector<conjugate_point> points;   ///< interior times in (0,1)
    std::vector<warning_kind> warnings;    ///< tangency flags
    int total_multiplicity() const {
        int s = 0;
        for (const auto& p : points) s += p.multiplicity;
        return s;
    }
};

/// Interior zeros of the Dirichlet end map (sign changes / rank drops of the
/// n x n block determinant on a 2000-point grid, bisection-refined to 1e-10);
/// multiplicity from the rank drop.
conjugate_report conjugate_points(const jacobi_system& sys, int grid_points = 2000,
                                  double rank_tol = 1e-6);

struct b_form_report {
    Eigen::MatrixXd matrix;  ///< k x k, symmetric
    int n_minus = 0, n_zero = 0, n_plus = 0;
    bool kernel_dim_check = false;  ///< dim ker b == dim J0 + dim Jp - dim(J0 cap Jp)
    std::vector<warning_kind> warnings;
};

/// Boundary bilinear form b(J_i, J_j) = g_T(DJ_i(1) - DJ_i(0), J_j(0)) on the
/// closure subspace basis, with signature by symmetric eigenvalue inertia.
/// The kernel cutoff floor uses max(largest |eigenvalue|, speed^2) so the
/// identically-zero case is classified as all-kernel.
b_form_report b_form(const jacobi_system& sys, const jacobi_subspaces& subs,
                     double rank_tol = 1e-6);

}  // namespace geodex

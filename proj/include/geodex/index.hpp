#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>

#include "geodex/banded.hpp"
#include "geodex/jacobi.hpp"

namespace geodex {

enum class boundary_condition { dirichlet, periodic };

/// Default finite-element resolution for a path of the given length: 200
/// segments for short paths, scaling up for long iterates so discrete kernel
/// modes stay separated from genuine small eigenvalues.
int auto_segments(double length);

/// Piecewise-linear finite-element matrix of the second-variation form
///     I(V, W) = integral g_T(DV, DW) + g_T(R V, W) dt,
/// D the covariant derivative along the geodesic, on a uniform grid.
/// Dirichlet pins V(0) = V(1) = 0; periodic identifies the end nodes (the
/// wrap-around coupling is kept banded by a folded node ordering).
banded_symmetric index_form_matrix_banded(const jacobi_system& sys, boundary_condition bc,
                                          int segments);

/// Dense copy of the same matrix (tests, bindings, small systems).
Eigen::MatrixXd index_form_matrix(const jacobi_system& sys, boundary_condition bc,
                                  int segments);

struct morse_index_result {
    int index = 0;
    int nullity = 0;
    bool ambiguous = false;  ///< some eigenvalue within factor 10 of the cutoff
    double scale = 0.0;      ///< largest |eigenvalue|
    int segments = 0;
};

/// Counts eigenvalues below -kernel_tol*scale (index) and within the cutoff
/// (nullity), scale = largest |eigenvalue| of the finite-element matrix.
morse_index_result morse_index(const jacobi_system& sys, boundary_condition bc,
                               int segments = 0, double kernel_tol = 1e-6);

/// Index of the finite-difference Hessian of the discrete broken-segment
/// energy  sum_i F^2(x_i, x_{i+1} - x_i) / (2 h)  over node positions, the
/// method-independent cross-check. Throws step_size_error when the Hessian
/// is too asymmetric after symmetrization.
int hessian_crosscheck(const metric_spec& m, const geodesic_path& gamma,
                       boundary_condition bc, int nodes = 200, double kernel_tol = 1e-6);

struct index_report {
    int lambda_dirichlet = 0;
    int nullity_dirichlet = 0;
    std::optional<int> lambda_periodic;
    std::optional<int> nullity_periodic;
    std::optional<int> concavity;  ///< lambda_periodic - lambda_dirichlet
    std::map<std::string, int> method_agreement;  ///< fem / conjugate-points / hessian
    int segments_used = 0;
    double kernel_tol = 1e-6;
    bool ambiguous = false;
};

/// Assembles the full per-geodesic report: Dirichlet index by three methods,
/// periodic index and concavity for closed paths.
index_report compute_index_report(const metric_spec& m, const geodesic_path& gamma,
                                  int segments = 0, bool with_hessian = true,
                                  double kernel_tol = 1e-6);

struct identity_report {
    int lambda_periodic = 0;       ///< left side
    int lambda_dirichlet = 0;      ///< right side terms:
    int dim_J0 = 0;
    int dim_J0_cap_Jp = 0;
    int b_n_minus = 0;
    int right_side = 0;
    bool identity_holds = false;

    int concavity = 0;             ///< lambda_periodic - lambda_dirichlet
    int dim_ker_b = 0;
    int dim_Jp = 0;
    int concavity_formula = 0;     ///< dim ker b + n_minus(b) - dim Jp
    bool concavity_formula_holds = false;
    bool concavity_bounds_hold = false;  ///< 0 <= con <= 2 dim M
    int sharper_upper_bound = 0;   ///< dim M - 1, reported only

    outcome result = outcome::inconclusive;
    std::vector<warning_kind> warnings;
};

/// Computes both sides of the index decomposition
///     lambda_periodic = lambda_dirichlet + dim J0 - dim(J0 cap Jp) + n_minus(b)
/// independently (periodic FEM on the left; Dirichlet FEM, subspace
/// dimensions and the b-form signature on the right), plus the concavity
/// formula and bounds. Upstream ambiguity makes the outcome inconclusive,
/// never a failure.
identity_report verify_index_decomposition(const metric_spec& m, const geodesic_path& c,
                                           int base_point_index = 0, int segments = 0,
                                           double kernel_tol = 1e-6, double rank_tol = 1e-6);

/// Value of the second-variation form I(J, V) where J is a Jacobi field
/// given by initial conditions and V is a piecewise-linear nodal field;
/// quadrature at Gauss points with exact Jacobi samples (no interpolation of
/// J). Used by orthogonality and restriction tests.
double index_form_pairing(const jacobi_system& sys, const Eigen::VectorXd& J0,
                          const Eigen::VectorXd& J0dot,
                          const std::vector<Eigen::VectorXd>& nodal_values,
                          boundary_condition bc);

/// I(J_a, J_b) for two Jacobi fields by composite Simpson quadrature on the
/// variational grid; used to verify that the boundary form b is the
/// restriction of the second-variation form to the closure subspace.
double index_form_jacobi_pair(const jacobi_system& sys, const Eigen::VectorXd& Ja0,
                              const Eigen::VectorXd& Ja0dot, const Eigen::VectorXd& Jb0,
                              const Eigen::VectorXd& Jb0dot);

}  // namespace geodex

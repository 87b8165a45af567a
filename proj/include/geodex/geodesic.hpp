#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "geodex/errors.hpp"
#include "geodex/metric.hpp"

namespace geodex {

/// A sampled geodesic on [0,1], parametrized proportionally to arc length:
/// F(v(t)) is constant, energy = length^2 / 2. Sample knots need not be
/// uniform (concatenations allocate knots per piece).
struct geodesic_path {
    std::string metric_id;
    std::vector<double> t;             ///< increasing knots, t.front()=0, t.back()=1
    std::vector<Eigen::VectorXd> x;    ///< positions at knots
    std::vector<Eigen::VectorXd> v;    ///< velocities at knots (dx/dt)
    double length = 0.0;
    double energy = 0.0;
    bool is_closed = false;
    int base_point_index = 0;          ///< sample index of the base point (closed paths)

    int dimension() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
    double speed() const { return length; }  ///< constant-speed F value on [0,1]
};

/// Cubic Hermite evaluation of (x(t), v(t)) between knots; exact at knots.
class path_interpolant {
public:
    explicit path_interpolant(const geodesic_path& path) : path_(&path) {}
    void eval(double t, Eigen::VectorXd& x, Eigen::VectorXd& v) const;

private:
    const geodesic_path* path_;
};

/// Geodesic acceleration: the second-order coefficient of the Euler-Lagrange
/// equations of the energy density F^2/2; degree-2 homogeneous in v.
Eigen::VectorXd spray(const metric_spec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

/// Classical fixed-step 4th-order integration of the geodesic equation on
/// [0,1]. Throws chart_exit_error (with exit time) when the trajectory
/// enters an excluded polar cap.
geodesic_path integrate_ivp(const metric_spec& m, const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& v0, int steps = 1000);

struct shooting_result {
    std::vector<geodesic_path> paths;   ///< sorted by (length, direction angle)
    std::vector<double> residuals;      ///< endpoint chart distance per path
    int duplicates_merged = 0;
    std::vector<warning_kind> warnings;
};

/// Multi-start shooting solver for geodesics from p to q with length below
/// max_length: direction x speed grid, damped Newton on the endpoint
/// residual (finite-difference Jacobian), dedup, re-verification.
shooting_result solve_bvp(const metric_spec& m, const Eigen::VectorXd& p,
                          const Eigen::VectorXd& q, double max_length,
                          int grid_density = 1, int steps = 1000);

/// Rough lower estimate of the Finsler distance from p to q (chart chords
/// modulo periods); used for search-completeness heuristics only.
double chord_length_estimate(const metric_spec& m, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& q);

/// gamma0 followed by m laps of the closed geodesic c based at gamma0's
/// endpoint, reparametrized to constant speed on [0,1]. The junction must be
/// velocity-aligned (angular tolerance 1e-6) or not_a_geodesic_error is
/// thrown; m = 0 returns gamma0 unchanged.
geodesic_path concatenate_iterate(const metric_spec& m, const geodesic_path& gamma0,
                                  const geodesic_path& c, int iterations);

/// The closed geodesic traversed m times at constant speed.
geodesic_path iterate_closed(const metric_spec& m, const geodesic_path& c, int iterations);

/// Splits gamma at parameter t0 into two constant-speed arcs on [0,1] whose
/// lengths sum to the original.
std::pair<geodesic_path, geodesic_path> split_at(const metric_spec& m,
                                                 const geodesic_path& gamma, double t0);

/// Rotates a closed path's samples so the sample nearest the given chart
/// point becomes t = 0 (the new base point). Throws when the point is not on
/// the path (distance > tol).
geodesic_path rebase_closed(const metric_spec& m, const geodesic_path& c,
                            const Eigen::VectorXd& at_point, double tol = 1e-6);

/// Constant-speed sub-arc of a closed path from the sample nearest p forward
/// (in increasing t) to the sample nearest q.
geodesic_path arc_between(const metric_spec& m, const geodesic_path& c,
                          const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                          double tol = 1e-6);

struct closed_search_result {
    bool found = false;
    geodesic_path path;     ///< closed geodesic through p and q, based at p
};

/// Finds a closed geodesic through p and q of length <= max_length by
/// extending the shortest connecting geodesic and refining the closure
/// (Gauss-Newton on the period and direction).
closed_search_result find_closed_through(const metric_spec& m, const Eigen::VectorXd& p,
                                         const Eigen::VectorXd& q, double max_length,
                                         int steps = 1000);

}  // namespace geodex

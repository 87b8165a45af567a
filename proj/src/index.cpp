#include "geodex/index.hpp"

#include <algorithm>
#include <cmath>

#include "geodex/metric.hpp"

namespace geodex {

namespace {

/// Folded ring ordering keeping periodic wrap-around coupling banded: the
/// cycle 0,1,...,N-1,0 is traversed as 0,2,4,...,5,3,1 so ring neighbors sit
/// at folded distance <= 2.
int fold_node(int i, int N) { return i <= N - 1 - i ? 2 * i : 2 * (N - 1 - i) + 1; }

struct gauss_data {
    double t;
    double w;
    Eigen::MatrixXd G, C, Q;  ///< Gram, connection, symmetrized curvature term
};

gauss_data linearize_gauss(const metric_spec& m, const path_interpolant& interp, double t,
                           double w) {
    Eigen::VectorXd x, v;
    interp.eval(t, x, v);
    flow_linearization lin = linearize_at(m, x, v, true);
    gauss_data out;
    out.t = t;
    out.w = w;
    out.G = std::move(lin.G);
    out.C = std::move(lin.C);
    const Eigen::MatrixXd RtG = lin.R.transpose() * out.G;
    out.Q = 0.5 * (RtG + RtG.transpose());
    return out;
}

}  // namespace

int auto_segments(double length) {
    const int want = std::max(200, static_cast<int>(std::ceil(26.0 * length)));
    return std::clamp(want, 8, 1500);
}

banded_symmetric index_form_matrix_banded(const jacobi_system& sys, boundary_condition bc,
                                          int segments) {
    if (segments < 2) throw domain_error("index form needs at least 2 segments");
    const int n = sys.dimension();
    const int N = segments;
    const metric_spec& m = sys.metric;
    path_interpolant interp(sys.geodesic);

    const bool periodic = bc == boundary_condition::periodic;
    const int free_nodes = periodic ? N : N - 1;
    const int halfbw = periodic ? 3 * n - 1 : 2 * n - 1;
    banded_symmetric K(n * free_nodes, halfbw);

    // Scalar unknown index of (node, component); -1 for a pinned node.
    auto dof = [&](int node, int comp) {
        if (periodic) {
            node %= N;
            return n * fold_node(node, N) + comp;
        }
        if (node == 0 || node == N) return -1;
        return n * (node - 1) + comp;
    };

    const double h = 1.0 / N;
    const double gauss_off = 0.5 / std::sqrt(3.0);
    for (int e = 0; e < N; ++e) {
        const double t0 = e * h;
        Eigen::MatrixXd elem = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (int gp = 0; gp < 2; ++gp) {
            const double u = 0.5 + (gp == 0 ? -gauss_off : gauss_off);
            const gauss_data gd = linearize_gauss(m, interp, t0 + u * h, 0.5 * h);
            const double shape[2] = {1.0 - u, u};
            const double dshape[2] = {-1.0 / h, 1.0 / h};
            Eigen::MatrixXd D[2];
            for (int a = 0; a < 2; ++a)
                D[a] = dshape[a] * Eigen::MatrixXd::Identity(n, n) + shape[a] * gd.C;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const Eigen::MatrixXd block =
                        gd.w * (D[a].transpose() * gd.G * D[b] + shape[a] * shape[b] * gd.Q);
                    elem.block(a * n, b * n, n, n) += block;
                }
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int ci = 0; ci < n; ++ci)
                    for (int cj = 0; cj < n; ++cj) {
                        const int gi = dof(e + a, ci), gj = dof(e + b, cj);
                        if (gi < 0 || gj < 0 || gi > gj) continue;
                        // Diagonal blocks of the element matrix land once per
                        // (gi, gj) pair; off-diagonal element blocks are the
                        // transpose pair, of which we keep the upper half.
                        K.add(gi, gj, elem(a * n + ci, b * n + cj));
                    }
    }
    return K;
}

Eigen::MatrixXd index_form_matrix(const jacobi_system& sys, boundary_condition bc,
                                  int segments) {
    return index_form_matrix_banded(sys, bc, segments).dense();
}

morse_index_result morse_index(const jacobi_system& sys, boundary_condition bc, int segments,
                               double kernel_tol) {
    if (segments <= 0) segments = auto_segments(sys.geodesic.length);
    const banded_symmetric K = index_form_matrix_banded(sys, bc, segments);
    const inertia_counts counts = banded_inertia(K, kernel_tol);
    morse_index_result out;
    out.index = counts.negative;
    out.nullity = counts.zero;
    out.ambiguous = counts.in_guard_band > 0;
    out.scale = counts.scale;
    out.segments = segments;
    return out;
}

int hessian_crosscheck(const metric_spec& m, const geodesic_path& gamma, boundary_condition bc,
                       int nodes, double kernel_tol) {
    if (nodes < 8) throw domain_error("hessian crosscheck needs at least 8 nodes");
    const int n = gamma.dimension();
    const int N = nodes;
    const bool periodic = bc == boundary_condition::periodic;
    if (periodic && !gamma.is_closed)
        throw domain_error("periodic crosscheck requires a closed path");

    // Discrete broken-segment energy nodes x_0..x_N on the path; x_N is a
    // fixed endpoint (Dirichlet) or x_0 shifted by the chart lap offset.
    path_interpolant interp(gamma);
    std::vector<Eigen::VectorXd> node_x(N + 1);
    Eigen::VectorXd vdump;
    for (int i = 0; i <= N; ++i) interp.eval(static_cast<double>(i) / N, node_x[i], vdump);
    const Eigen::VectorXd lap_offset = gamma.x.back() - gamma.x.front();

    const double h = 1.0 / N;
    auto segment_energy = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const Eigen::VectorXd d = b - a;
        const double f = eval_F(m, a, d);
        return f * f / (2.0 * h);
    };

    auto dof = [&](int node, int comp) {
        if (periodic) return n * fold_node(node % N, N) + comp;
        if (node == 0 || node == N) return -1;
        return n * (node - 1) + comp;
    };
    const int free_nodes = periodic ? N : N - 1;
    const int halfbw = periodic ? 3 * n - 1 : 2 * n - 1;
    banded_symmetric H(n * free_nodes, halfbw);

    const double delta = 1e-4;
    double worst_asym = 0.0, scale_probe = 0.0;
    for (int e = 0; e < N; ++e) {
        // Hessian of the segment energy e(x_e, x_{e+1}) in its own 2n
        // variables by central second differences.
        const Eigen::VectorXd base_a = node_x[e];
        const Eigen::VectorXd base_b =
            periodic && e == N - 1 ? Eigen::VectorXd(node_x[0] + lap_offset) : node_x[e + 1];
        auto energy_at = [&](const Eigen::VectorXd& pert) {
            return segment_energy(base_a + pert.head(n), base_b + pert.tail(n));
        };
        Eigen::MatrixXd He(2 * n, 2 * n);
        const double e0 = energy_at(Eigen::VectorXd::Zero(2 * n));
        for (int a = 0; a < 2 * n; ++a) {
            Eigen::VectorXd pa = Eigen::VectorXd::Zero(2 * n);
            pa[a] = delta;
            He(a, a) = (energy_at(pa) - 2.0 * e0 + energy_at(-pa)) / (delta * delta);
            for (int b = a + 1; b < 2 * n; ++b) {
                Eigen::VectorXd pb = Eigen::VectorXd::Zero(2 * n);
                pb[b] = delta;
                const double mixed = (energy_at(pa + pb) - energy_at(pa - pb) -
                                      energy_at(-pa + pb) + energy_at(-pa - pb)) /
                                     (4.0 * delta * delta);
                He(a, b) = He(b, a) = mixed;
            }
        }
        scale_probe = std::max(scale_probe, He.cwiseAbs().maxCoeff());
        worst_asym = std::max(worst_asym, (He - He.transpose()).cwiseAbs().maxCoeff());
        He = 0.5 * (He + He.transpose()).eval();

        const int node_of[2] = {e, e + 1};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int ci = 0; ci < n; ++ci)
                    for (int cj = 0; cj < n; ++cj) {
                        const int gi = dof(node_of[a], ci), gj = dof(node_of[b], cj);
                        if (gi < 0 || gj < 0 || gi > gj) continue;
                        H.add(gi, gj, He(a * n + ci, b * n + cj));
                    }
    }
    if (worst_asym > 1e-3 * std::max(scale_probe, 1.0))
        throw step_size_error("finite-difference hessian is too asymmetric");

    return banded_inertia(H, kernel_tol).negative;
}

index_report compute_index_report(const metric_spec& m, const geodesic_path& gamma,
                                  int segments, bool with_hessian, double kernel_tol) {
    index_report out;
    out.kernel_tol = kernel_tol;
    jacobi_system sys = linearize(m, gamma);

    const morse_index_result dir = morse_index(sys, boundary_condition::dirichlet, segments,
                                               kernel_tol);
    out.lambda_dirichlet = dir.index;
    out.nullity_dirichlet = dir.nullity;
    out.segments_used = dir.segments;
    out.ambiguous = dir.ambiguous;
    out.method_agreement["fem"] = dir.index;

    const conjugate_report conj = conjugate_points(sys);
    out.method_agreement["conjugate"] = conj.total_multiplicity();

    if (with_hessian) {
        const int nodes = std::max(200, dir.segments);
        out.method_agreement["hessian"] =
            hessian_crosscheck(m, gamma, boundary_condition::dirichlet, nodes, kernel_tol);
    }

    if (gamma.is_closed) {
        const morse_index_result per = morse_index(sys, boundary_condition::periodic, segments,
                                                   kernel_tol);
        out.lambda_periodic = per.index;
        out.nullity_periodic = per.nullity;
        out.concavity = per.index - dir.index;
        out.ambiguous = out.ambiguous || per.ambiguous;
    }
    return out;
}

identity_report verify_index_decomposition(const metric_spec& m, const geodesic_path& c,
                                           int base_point_index, int segments,
                                           double kernel_tol, double rank_tol) {
    if (!c.is_closed) throw domain_error("index decomposition applies to closed geodesics");
    geodesic_path based = c;
    if (base_point_index != 0) {
        if (base_point_index < 0 || base_point_index >= static_cast<int>(c.x.size()))
            throw domain_error("base point index out of range");
        based = integrate_ivp(m, c.x[base_point_index], c.v[base_point_index],
                              static_cast<int>(c.t.size()) - 1);
        if (!based.is_closed)
            throw not_a_geodesic_error("rebased loop failed to close");
    }

    identity_report out;
    jacobi_system sys = linearize(m, based);
    const int n = sys.dimension();

    const morse_index_result per =
        morse_index(sys, boundary_condition::periodic, segments, kernel_tol);
    const morse_index_result dir =
        morse_index(sys, boundary_condition::dirichlet, segments, kernel_tol);
    const jacobi_subspaces subs = compute_jacobi_subspaces(sys, rank_tol);
    const b_form_report bf = b_form(sys, subs, rank_tol);

    out.lambda_periodic = per.index;
    out.lambda_dirichlet = dir.index;
    out.dim_J0 = subs.dim_J0;
    out.dim_J0_cap_Jp = subs.dim_J0_cap_Jp;
    out.b_n_minus = bf.n_minus;
    out.right_side = dir.index + subs.dim_J0 - subs.dim_J0_cap_Jp + bf.n_minus;
    out.identity_holds = per.index == out.right_side;

    out.concavity = per.index - dir.index;
    out.dim_ker_b = bf.n_zero;
    out.dim_Jp = subs.dim_Jp;
    out.concavity_formula = bf.n_zero + bf.n_minus - subs.dim_Jp;
    out.concavity_formula_holds = out.concavity == out.concavity_formula;
    out.concavity_bounds_hold = out.concavity >= 0 && out.concavity <= 2 * n;
    out.sharper_upper_bound = n - 1;

    for (auto w : subs.warnings) out.warnings.push_back(w);
    for (auto w : bf.warnings) out.warnings.push_back(w);
    if (per.ambiguous || dir.ambiguous)
        out.warnings.push_back(warning_kind::ambiguous_kernel);
    if (!bf.kernel_dim_check) out.warnings.push_back(warning_kind::ambiguous_rank);

    if (!out.warnings.empty())
        out.result = outcome::inconclusive;
    else if (out.identity_holds && out.concavity_formula_holds && out.concavity_bounds_hold)
        out.result = outcome::pass;
    else
        out.result = outcome::fail;
    return out;
}

double index_form_pairing(const jacobi_system& sys, const Eigen::VectorXd& J0,
                          const Eigen::VectorXd& J0dot,
                          const std::vector<Eigen::VectorXd>& nodal_values,
                          boundary_condition bc) {
    const int n = sys.dimension();
    const int M = static_cast<int>(nodal_values.size()) - 1;
    if (M < 1) throw domain_error("nodal field needs at least 2 nodes");
    (void)bc;  // the integral formula is identical for both boundary conditions

    const jacobi_field f = solve_jacobi(sys, J0, J0dot);
    const metric_spec& m = sys.metric;
    path_interpolant interp(sys.geodesic);

    // Cubic Hermite interpolation of the solved Jacobi samples.
    const int NV = sys.var_steps;
    auto jacobi_eval = [&](double t, Eigen::VectorXd& J, Eigen::VectorXd& Jd) {
        const double s = std::clamp(t, 0.0, 1.0) * NV;
        const int k = std::clamp(static_cast<int>(s), 0, NV - 1);
        const double u = s - k;
        const double hh = 1.0 / NV;
        const double h00 = (2 * u - 3) * u * u + 1, h10 = ((u - 2) * u + 1) * u;
        const double h01 = (3 - 2 * u) * u * u, h11 = (u - 1) * u * u;
        J = h00 * f.J[k] + h10 * hh * f.Jdot[k] + h01 * f.J[k + 1] + h11 * hh * f.Jdot[k + 1];
        const double d00 = 6 * u * (u - 1), d10 = (3 * u - 4) * u + 1;
        const double d01 = -d00, d11 = (3 * u - 2) * u;
        Jd = (d00 * f.J[k] + d10 * hh * f.Jdot[k] + d01 * f.J[k + 1] +
              d11 * hh * f.Jdot[k + 1]) /
             hh;
    };

    const double h = 1.0 / M;
    const double gauss_off = 0.5 / std::sqrt(3.0);
    double total = 0.0;
    Eigen::VectorXd J(n), Jd(n);
    for (int e = 0; e < M; ++e) {
        const Eigen::VectorXd& W0 = nodal_values[e];
        const Eigen::VectorXd& W1 = nodal_values[e + 1];
        const Eigen::VectorXd Wslope = (W1 - W0) / h;
        for (int gp = 0; gp < 2; ++gp) {
            const double u = 0.5 + (gp == 0 ? -gauss_off : gauss_off);
            const gauss_data gd = linearize_gauss(m, interp, (e + u) * h, 0.5 * h);
            jacobi_eval(gd.t, J, Jd);
            const Eigen::VectorXd DJ = Jd + gd.C * J;
            const Eigen::VectorXd W = (1.0 - u) * W0 + u * W1;
            const Eigen::VectorXd DW = Wslope + gd.C * W;
            total += gd.w * (DJ.dot(gd.G * DW) + J.dot(gd.Q * W));
        }
    }
    return total;
}

double index_form_jacobi_pair(const jacobi_system& sys, const Eigen::VectorXd& Ja0,
                              const Eigen::VectorXd& Ja0dot, const Eigen::VectorXd& Jb0,
                              const Eigen::VectorXd& Jb0dot) {
    const jacobi_field fa = solve_jacobi(sys, Ja0, Ja0dot);
    const jacobi_field fb = solve_jacobi(sys, Jb0, Jb0dot);
    const auto Da = covariant_derivative(sys, fa);
    const auto Db = covariant_derivative(sys, fb);
    const int N = sys.var_steps;

    std::vector<double> integrand(N + 1);
    for (int k = 0; k <= N; ++k) {
        const Eigen::MatrixXd& G = sys.gram_samples[2 * k];
        const Eigen::MatrixXd RtG = sys.curvature_samples[2 * k].transpose() * G;
        const Eigen::MatrixXd Q = 0.5 * (RtG + RtG.transpose());
        integrand[k] = Da[k].dot(G * Db[k]) + fa.J[k].dot(Q * fb.J[k]);
    }
    // Composite Simpson (N is even by construction of the variational grid).
    const double h = 1.0 / N;
    double total = 0.0;
    int limit = N;
    if (N % 2 != 0) {
        limit = N - 3;
        total += 3.0 * h / 8.0 *
                 (integrand[limit] + 3.0 * integrand[limit + 1] + 3.0 * integrand[limit + 2] +
                  integrand[N]);
    }
    for (int k = 0; k < limit; k += 2)
        total += h / 3.0 * (integrand[k] + 4.0 * integrand[k + 1] + integrand[k + 2]);
    return total;
}

}  // namespace geodex

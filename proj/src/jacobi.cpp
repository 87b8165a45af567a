#include "geodex/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "geodex/metric.hpp"

namespace geodex {

namespace {

constexpr double kSprayResidualTol = 1e-5;

Eigen::MatrixXd spray_jacobian_x(const metric_spec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& v) {
    const int n = static_cast<int>(x.size());
    const double h = 6e-6 * (1.0 + x.norm());
    Eigen::MatrixXd A(n, n);
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        A.col(c) = (spray(m, xp, v) - spray(m, xm, v)) / (2.0 * h);
    }
    return A;
}

Eigen::MatrixXd spray_jacobian_v(const metric_spec& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& v) {
    const int n = static_cast<int>(x.size());
    const double h = 6e-6 * (1.0 + v.norm());
    Eigen::MatrixXd B(n, n);
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXd vp = v, vm = v;
        vp[c] += h;
        vm[c] -= h;
        B.col(c) = (spray(m, x, vp) - spray(m, x, vm)) / (2.0 * h);
    }
    return B;
}

/// 2n x 2n first-order system matrix [[0, I], [A, B]] rebuilt from stored
/// R, C, Cdot samples (A = R - Cdot - C^2, B = -2C, exact by construction).
struct block_system {
    const jacobi_system* sys;
    int n;

    Eigen::MatrixXd operator()(int idx) const {
        const Eigen::MatrixXd& C = sys->connection_samples[idx];
        const Eigen::MatrixXd A =
            sys->curvature_samples[idx] - sys->cdot_samples[idx] - C * C;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        M.topRightCorner(n, n).setIdentity();
        M.bottomLeftCorner(n, n) = A;
        M.bottomRightCorner(n, n) = -2.0 * C;
        return M;
    }
};

/// One RK4 step of Y' = M(t) Y over [t_k, t_{k+1}] with stored coefficients
/// at the endpoints and midpoint (fine-grid indices 2k, 2k+1, 2k+2).
template <typename MatLike>
void rk4_linear_step(MatLike& Y, const Eigen::MatrixXd& M0, const Eigen::MatrixXd& Mh,
                     const Eigen::MatrixXd& M1, double h) {
    const MatLike k1 = M0 * Y;
    const MatLike k2 = Mh * (Y + 0.5 * h * k1);
    const MatLike k3 = Mh * (Y + 0.5 * h * k2);
    const MatLike k4 = M1 * (Y + h * k3);
    Y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct rank_result {
    int rank = 0;
    bool ambiguous = false;
};

rank_result svd_rank(const Eigen::MatrixXd& M, double rank_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    rank_result out;
    if (s.size() == 0) return out;
    const double smax = s[0];
    if (smax <= 0.0) return out;  // zero matrix: rank 0, unambiguous
    const double cut = rank_tol * smax;
    for (int i = 0; i < s.size(); ++i) {
        if (s[i] > cut) ++out.rank;
        if (s[i] > 0.1 * cut && s[i] < 10.0 * cut) out.ambiguous = true;
    }
    return out;
}

}  // namespace

flow_linearization linearize_at(const metric_spec& m, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& v, bool with_curvature) {
    flow_linearization out;
    out.B = spray_jacobian_v(m, x, v);
    out.C = -0.5 * out.B;
    out.G = fundamental_tensor(m, x, v);
    if (!with_curvature) return out;
    out.A = spray_jacobian_x(m, x, v);
    // Flow derivative of C by central differences along the phase line
    // (x, v) + eps (v, S); first order in eps matches the flow exactly.
    const Eigen::VectorXd S = spray(m, x, v);
    const double eps = 1e-5 / (1.0 + v.norm());
    const Eigen::MatrixXd Cp = -0.5 * spray_jacobian_v(m, x + eps * v, v + eps * S);
    const Eigen::MatrixXd Cm = -0.5 * spray_jacobian_v(m, x - eps * v, v - eps * S);
    out.Cdot = (Cp - Cm) / (2.0 * eps);
    out.R = out.A + out.Cdot + out.C * out.C;
    return out;
}

jacobi_system linearize(const metric_spec& m, const geodesic_path& gamma) {
    if (gamma.t.size() < 5) throw domain_error("path has too few samples to linearize");
    const int n = gamma.dimension();
    const double speed = gamma.speed();
    if (!(speed > 0.0)) throw domain_error("path has zero speed");

    // Verify the samples satisfy the geodesic equation: 5-point derivative of
    // the velocity samples against the spray, where spacing is uniform.
    const int count = static_cast<int>(gamma.t.size());
    const int stride = std::max(1, count / 200);
    const double accel_scale = std::max(1.0, speed * speed);
    double worst = 0.0;
    for (int i = 2; i + 2 < count; i += stride) {
        const double h = gamma.t[i + 1] - gamma.t[i];
        bool uniform = true;
        for (int d = -2; d < 2; ++d)
            if (std::abs((gamma.t[i + d + 1] - gamma.t[i + d]) - h) > 1e-12 * (1.0 + h))
                uniform = false;
        if (!uniform || h <= 0.0) continue;
        const Eigen::VectorXd accel_fd =
            (-gamma.v[i + 2] + 8.0 * gamma.v[i + 1] - 8.0 * gamma.v[i - 1] + gamma.v[i - 2]) /
            (12.0 * h);
        const Eigen::VectorXd accel = spray(m, gamma.x[i], gamma.v[i]);
        worst = std::max(worst, (accel_fd - accel).norm() / accel_scale);
    }
    if (worst > kSprayResidualTol)
        throw not_a_geodesic_error("sampled path does not satisfy the geodesic equation");

    jacobi_system sys;
    sys.metric = m;
    sys.geodesic = gamma;
    sys.var_steps = std::max(2000, 250 * static_cast<int>(std::ceil(gamma.length)));

    const int fine = 2 * sys.var_steps + 1;
    sys.sample_t.resize(fine);
    sys.curvature_samples.resize(fine);
    sys.connection_samples.resize(fine);
    sys.cdot_samples.resize(fine);
    sys.gram_samples.resize(fine);
    path_interpolant interp(gamma);
    Eigen::VectorXd x(n), v(n);
    for (int k = 0; k < fine; ++k) {
        const double t = static_cast<double>(k) / (fine - 1);
        sys.sample_t[k] = t;
        interp.eval(t, x, v);
        flow_linearization lin = linearize_at(m, x, v, true);
        sys.curvature_samples[k] = std::move(lin.R);
        sys.connection_samples[k] = std::move(lin.C);
        sys.cdot_samples[k] = std::move(lin.Cdot);
        sys.gram_samples[k] = std::move(lin.G);
    }
    return sys;
}

jacobi_field solve_jacobi(const jacobi_system& sys, const Eigen::VectorXd& J0,
                          const Eigen::VectorXd& J0dot) {
    const int n = sys.dimension();
    const int N = sys.var_steps;
    block_system blocks{&sys, n};
    jacobi_field out;
    out.t.resize(N + 1);
    out.J.resize(N + 1);
    out.Jdot.resize(N + 1);

    Eigen::VectorXd y(2 * n);
    y.head(n) = J0;
    y.tail(n) = J0dot;
    out.t[0] = 0.0;
    out.J[0] = J0;
    out.Jdot[0] = J0dot;
    const double h = 1.0 / N;
    for (int k = 0; k < N; ++k) {
        rk4_linear_step(y, blocks(2 * k), blocks(2 * k + 1), blocks(2 * k + 2), h);
        out.t[k + 1] = static_cast<double>(k + 1) / N;
        out.J[k + 1] = y.head(n);
        out.Jdot[k + 1] = y.tail(n);
    }
    return out;
}

std::vector<Eigen::VectorXd> covariant_derivative(const jacobi_system& sys,
                                                  const jacobi_field& field) {
    std::vector<Eigen::VectorXd> out(field.t.size());
    for (size_t k = 0; k < field.t.size(); ++k)
        out[k] = field.Jdot[k] + sys.connection_samples[2 * k] * field.J[k];
    return out;
}

Eigen::MatrixXd monodromy(const jacobi_system& sys) {
    const int n = sys.dimension();
    block_system blocks{&sys, n};
    Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double h = 1.0 / sys.var_steps;
    for (int k = 0; k < sys.var_steps; ++k)
        rk4_linear_step(Phi, blocks(2 * k), blocks(2 * k + 1), blocks(2 * k + 2), h);
    return Phi;
}

transition_record transition_matrices(const jacobi_system& sys, int grid_points) {
    if (grid_points < 2) throw domain_error("transition grid needs at least 2 points");
    const int n = sys.dimension();
    const int N = sys.var_steps;
    const int stride = std::max(1, N / grid_points);
    block_system blocks{&sys, n};

    transition_record rec;
    Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    rec.t.push_back(0.0);
    rec.Phi.push_back(Phi);
    const double h = 1.0 / N;
    for (int k = 0; k < N; ++k) {
        rk4_linear_step(Phi, blocks(2 * k), blocks(2 * k + 1), blocks(2 * k + 2), h);
        if ((k + 1) % stride == 0 || k + 1 == N) {
            rec.t.push_back(static_cast<double>(k + 1) / N);
            rec.Phi.push_back(Phi);
        }
    }
    return rec;
}

jacobi_subspaces compute_jacobi_subspaces(const jacobi_system& sys, double rank_tol) {
    const int n = sys.dimension();
    jacobi_subspaces out;
    out.rank_tolerance = rank_tol;
    out.monodromy = monodromy(sys);
    const Eigen::MatrixXd& M = out.monodromy;

    const Eigen::MatrixXd M11 = M.topLeftCorner(n, n);
    const Eigen::MatrixXd M12 = M.topRightCorner(n, n);
    const Eigen::MatrixXd M22 = M.bottomRightCorner(n, n);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    bool ambiguous = false;
    {
        const auto r = svd_rank(M - Eigen::MatrixXd::Identity(2 * n, 2 * n), rank_tol);
        out.dim_Jp = 2 * n - r.rank;
        ambiguous |= r.ambiguous;
    }
    Eigen::MatrixXd closure(n, 2 * n);
    closure << M11 - eye, M12;
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(closure, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        const double smax = s.size() > 0 ? s[0] : 0.0;
        int rank = 0;
        if (smax > 0.0) {
            const double cut = rank_tol * smax;
            for (int i = 0; i < s.size(); ++i) {
                if (s[i] > cut) ++rank;
                if (s[i] > 0.1 * cut && s[i] < 10.0 * cut) ambiguous = true;
            }
        }
        out.dim_Jcl = 2 * n - rank;
        out.basis_Jcl = svd.matrixV().rightCols(out.dim_Jcl);
    }
    {
        const auto r = svd_rank(M12, rank_tol);
        out.dim_J0 = n - r.rank;
        ambiguous |= r.ambiguous;
    }
    {
        Eigen::MatrixXd stacked(2 * n, n);
        stacked << M12, M22 - eye;
        const auto r = svd_rank(stacked, rank_tol);
        out.dim_J0_cap_Jp = n - r.rank;
        ambiguous |= r.ambiguous;
    }
    if (ambiguous) out.warnings.push_back(warning_kind::ambiguous_rank);
    return out;
}

conjugate_report conjugate_points(const jacobi_system& sys, int grid_points, double rank_tol) {
    const int n = sys.dimension();
    const int N = sys.var_steps;
    block_system blocks{&sys, n};
    conjugate_report out;

    // Dense pass storing Phi at every variational step would be heavy for long
    // paths, so record at ~grid_points resolution and re-integrate locally.
    transition_record rec = transition_matrices(sys, std::min(grid_points, N));

    // Phi at an arbitrary parameter: restart from the last recorded grid time
    // <= t, stepping through full variational steps, then one partial step
    // with linearly interpolated coefficients.
    auto phi_at = [&](double t) {
        const auto it = std::upper_bound(rec.t.begin(), rec.t.end(), t);
        int ri = static_cast<int>(it - rec.t.begin()) - 1;
        ri = std::clamp(ri, 0, static_cast<int>(rec.t.size()) - 1);
        Eigen::MatrixXd Phi = rec.Phi[ri];
        const double h = 1.0 / N;
        int k = static_cast<int>(std::lround(rec.t[ri] * N));
        while ((k + 1) * h <= t + 1e-15 && k < N) {
            rk4_linear_step(Phi, blocks(2 * k), blocks(2 * k + 1), blocks(2 * k + 2), h);
            ++k;
        }
        const double rem = t - k * h;
        if (rem > 1e-15) {
            auto interp_block = [&](double tau) {
                const double fi = tau * 2.0 * N;
                const int lo = std::clamp(static_cast<int>(fi), 0, 2 * N - 1);
                const double w = fi - lo;
                return ((1.0 - w) * blocks(lo) + w * blocks(lo + 1)).eval();
            };
            const Eigen::MatrixXd M0 = interp_block(k * h);
            const Eigen::MatrixXd Mh = interp_block(k * h + 0.5 * rem);
            const Eigen::MatrixXd M1 = interp_block(k * h + rem);
            rk4_linear_step(Phi, M0, Mh, M1, rem);
        }
        return Phi;
    };

    auto end_map_det = [&](const Eigen::MatrixXd& Phi) {
        return Phi.topRightCorner(n, n).determinant();
    };

    const int G = grid_points;
    std::vector<double> ts(G + 1), dets(G + 1);
    {
        // Determinants on the scan grid, from a single sweep.
        Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(2 * n, 2 * n);
        const double h = 1.0 / N;
        int k = 0;
        for (int gi = 0; gi <= G; ++gi) {
            const double t = static_cast<double>(gi) / G;
            while ((k + 1) <= static_cast<int>(std::floor(t * N + 1e-12)) && k < N) {
                rk4_linear_step(Phi, blocks(2 * k), blocks(2 * k + 1), blocks(2 * k + 2), h);
                ++k;
            }
            if (std::abs(t - k * h) < 1e-14) {
                ts[gi] = t;
                dets[gi] = end_map_det(Phi);
            } else {
                ts[gi] = t;
                dets[gi] = end_map_det(phi_at(t));
            }
        }
    }

    double det_scale = 0.0;
    for (double d : dets) det_scale = std::max(det_scale, std::abs(d));
    if (det_scale <= 0.0) return out;  // degenerate; no interior detection possible

    auto multiplicity_at = [&](double t) {
        const Eigen::MatrixXd E = phi_at(t).topRightCorner(n, n);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(E);
        const auto& s = svd.singularValues();
        const double smax = std::max(s[0], 1e-300);
        int null_dim = 0;
        for (int i = 0; i < s.size(); ++i)
            if (s[i] <= rank_tol * smax) ++null_dim;
        return std::max(1, null_dim);
    };

    // Sign changes, bisected to parameter accuracy 1e-10.
    for (int gi = 1; gi < G; ++gi) {
        const double a = ts[gi], b = ts[gi + 1];
        const double da = dets[gi], db = dets[gi + 1];
        if (da == 0.0) continue;  // handled as a grid-node tangency below
        if (da * db < 0.0) {
            double lo = a, hi = b, dlo = da;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double dm = end_map_det(phi_at(mid));
                if (dlo * dm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    dlo = dm;
                }
            }
            const double t_star = 0.5 * (lo + hi);
            // A zero of the end map at the closed endpoint t = 1 is not an
            // interior conjugate point; drop sign flips caused by roundoff
            // of a vanishing endpoint determinant.
            if (t_star > 1.0 - 2.0 / G && std::abs(dets[G]) < 1e-9 * det_scale) continue;
            out.points.push_back({t_star, multiplicity_at(t_star)});
        }
    }

    // Tangential (even-order) zeros: local minima of |det| dipping far below
    // scale without a sign change.
    for (int gi = 2; gi < G - 1; ++gi) {
        const double m0 = std::abs(dets[gi]);
        if (m0 > 1e-9 * det_scale) continue;
        if (m0 > std::abs(dets[gi - 1]) || m0 > std::abs(dets[gi + 1])) continue;
        if (dets[gi - 1] * dets[gi + 1] < 0.0) continue;  // covered by bisection
        double lo = ts[gi - 1], hi = ts[gi + 1];
        for (int it = 0; it < 60; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (std::abs(end_map_det(phi_at(m1))) < std::abs(end_map_det(phi_at(m2))))
                hi = m2;
            else
                lo = m1;
        }
        const double t_star = 0.5 * (lo + hi);
        if (std::abs(end_map_det(phi_at(t_star))) < 1e-10 * det_scale) {
            bool dup = false;
            for (const auto& p : out.points)
                if (std::abs(p.t - t_star) < 2.0 / G) dup = true;
            if (!dup) {
                out.points.push_back({t_star, multiplicity_at(t_star)});
                out.warnings.push_back(warning_kind::conjugate_tangency);
            }
        }
    }

    std::sort(out.points.begin(), out.points.end(),
              [](const conjugate_point& a, const conjugate_point& b) { return a.t < b.t; });
    return out;
}

b_form_report b_form(const jacobi_system& sys, const jacobi_subspaces& subs, double rank_tol) {
    const int n = sys.dimension();
    const int k = subs.dim_Jcl;
    b_form_report out;
    out.matrix = Eigen::MatrixXd::Zero(k, k);

    std::vector<Eigen::VectorXd> J0s(k), jump(k);
    for (int i = 0; i < k; ++i) {
        const Eigen::VectorXd ic = subs.basis_Jcl.col(i);
        jacobi_field f = solve_jacobi(sys, ic.head(n), ic.tail(n));
        const auto D = covariant_derivative(sys, f);
        J0s[i] = f.J.front();
        jump[i] = D.back() - D.front();
    }
    const Eigen::MatrixXd& G0 = sys.gram_samples.front();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out.matrix(i, j) = jump[i].dot(G0 * J0s[j]);

    const double speed = sys.geodesic.speed();
    double asym = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            asym = std::max(asym, std::abs(out.matrix(i, j) - out.matrix(j, i)));
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();

    double eig_scale = 0.0;
    Eigen::VectorXd eigs;
    if (k > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix);
        eigs = es.eigenvalues();
        eig_scale = std::max(std::abs(eigs[0]), std::abs(eigs[k - 1]));
    }
    const double floor_scale = std::max(eig_scale, speed * speed);
    const double cut = rank_tol * floor_scale;
    if (asym > cut) out.warnings.push_back(warning_kind::ambiguous_rank);

    bool near_cut = false;
    for (int i = 0; i < k; ++i) {
        const double e = eigs[i];
        if (e < -cut)
            ++out.n_minus;
        else if (e > cut)
            ++out.n_plus;
        else
            ++out.n_zero;
        if (std::abs(e) > 0.1 * cut && std::abs(e) < 10.0 * cut) near_cut = true;
    }
    if (near_cut) out.warnings.push_back(warning_kind::ambiguous_kernel);

    out.kernel_dim_check =
        out.n_zero == subs.dim_J0 + subs.dim_Jp - subs.dim_J0_cap_Jp;
    return out;
}

}  // namespace geodex

#include "geodex/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace geodex {

namespace {

constexpr double kBvpResidualTol = 1e-8;   ///< accepted endpoint chart distance
constexpr double kDedupAngleTol = 1e-4;    ///< radians between initial directions
constexpr double kDedupLengthTol = 1e-5;   ///< relative length difference
constexpr double kJunctionAngleTol = 1e-6; ///< radians at concatenation junctions

struct phase_state {
    Eigen::VectorXd x, v;
};

phase_state rk4_step(const metric_spec& m, const phase_state& y, double h) {
    auto acc = [&](const phase_state& s) { return spray(m, s.x, s.v); };
    const Eigen::VectorXd a1 = acc(y);
    phase_state y2{y.x + 0.5 * h * y.v, y.v + 0.5 * h * a1};
    const Eigen::VectorXd a2 = acc(y2);
    phase_state y3{y.x + 0.5 * h * y2.v, y.v + 0.5 * h * a2};
    const Eigen::VectorXd a3 = acc(y3);
    phase_state y4{y.x + h * y3.v, y.v + h * a3};
    const Eigen::VectorXd a4 = acc(y4);
    phase_state out;
    out.x = y.x + h / 6.0 * (y.v + 2.0 * y2.v + 2.0 * y3.v + y4.v);
    out.v = y.v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    return out;
}

/// Endpoint-only integration (no sample storage) for shooting residuals.
phase_state integrate_endpoint(const metric_spec& m, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& v0, int steps) {
    phase_state y{x0, v0};
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        y = rk4_step(m, y, h);
        if (!m.manifold.in_domain(y.x))
            throw chart_exit_error("trajectory entered excluded polar cap",
                                   static_cast<double>(s + 1) / steps);
    }
    return y;
}

/// Composite quadrature of sampled values on a uniform grid (Simpson where
/// the interval count is even, with a 3/8 tail when odd).
double integrate_samples(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;
    if (n <= 0) return 0.0;
    double total = 0.0;
    int limit = n;
    if (n % 2 != 0) {
        if (n >= 3) {
            limit = n - 3;
            total += 3.0 * h / 8.0 * (f[limit] + 3.0 * f[limit + 1] + 3.0 * f[limit + 2] + f[n]);
        } else {
            return h * (0.5 * f[0] + 0.5 * f[1]);  // single trapezoid
        }
    }
    for (int i = 0; i < limit; i += 2)
        total += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    return total;
}

double direction_angle(const Eigen::VectorXd& v) { return std::atan2(v[1], v[0]); }

double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
    const double c = u.dot(w) / (u.norm() * w.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

void path_interpolant::eval(double t, Eigen::VectorXd& x, Eigen::VectorXd& v) const {
    const auto& p = *path_;
    t = std::clamp(t, 0.0, 1.0);
    const auto it = std::upper_bound(p.t.begin(), p.t.end(), t);
    int i = static_cast<int>(it - p.t.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(p.t.size()) - 2);
    const double h = p.t[i + 1] - p.t[i];
    const double u = (t - p.t[i]) / h;
    const double h00 = (2 * u - 3) * u * u + 1, h10 = ((u - 2) * u + 1) * u;
    const double h01 = (3 - 2 * u) * u * u, h11 = (u - 1) * u * u;
    x = h00 * p.x[i] + h10 * h * p.v[i] + h01 * p.x[i + 1] + h11 * h * p.v[i + 1];
    const double d00 = 6 * u * (u - 1), d10 = (3 * u - 4) * u + 1;
    const double d01 = -d00, d11 = (3 * u - 2) * u;
    v = (d00 * p.x[i] + d10 * h * p.v[i] + d01 * p.x[i + 1] + d11 * h * p.v[i + 1]) / h;
}

Eigen::VectorXd spray(const metric_spec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    const int n = static_cast<int>(x.size());
    const Eigen::MatrixXd a = m.manifold.metric_coeff(x);
    const std::vector<Eigen::MatrixXd> da = m.manifold.metric_coeff_grad(x);

    Eigen::VectorXd grad_L(n);       // d(F^2/2)/dx
    Eigen::MatrixXd mixed(n, n);     // mixed(i,k) = d^2(F^2/2)/dv_i dx_k
    Eigen::MatrixXd g;

    if (m.kind == metric_kind::riemannian) {
        for (int k = 0; k < n; ++k) {
            grad_L[k] = 0.5 * v.dot(da[k] * v);
            mixed.col(k) = da[k] * v;
        }
        g = a;
    } else {
        const double alpha = std::sqrt(v.dot(a * v));
        const Eigen::VectorXd av = a * v;
        const double F = alpha + m.beta.dot(v);
        const Eigen::VectorXd lF = av / alpha + m.beta;  // dF/dv
        for (int k = 0; k < n; ++k) {
            const double dk_alpha = 0.5 * v.dot(da[k] * v) / alpha;
            grad_L[k] = F * dk_alpha;  // constant-coefficient one-form: dF/dx = dalpha/dx
            const Eigen::VectorXd dk_lF =
                (da[k] * v) / alpha - av * (v.dot(da[k] * v)) / (2.0 * alpha * alpha * alpha);
            mixed.col(k) = dk_alpha * lF + F * dk_lF;
        }
        const Eigen::VectorXd l = av / alpha;
        const Eigen::VectorXd lb = l + m.beta;
        g = (F / alpha) * (a - l * l.transpose()) + lb * lb.transpose();
    }

    const Eigen::VectorXd rhs = grad_L - mixed * v;
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
        std::vector<double> xs(x.data(), x.data() + n), vs(v.data(), v.data() + n);
        throw convexity_error("singular fundamental tensor in geodesic equation", xs, vs);
    }
    return llt.solve(rhs);
}

geodesic_path integrate_ivp(const metric_spec& m, const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& v0, int steps) {
    if (steps < 16) throw domain_error("integration requires at least 16 steps");
    if (v0.isZero(0.0)) throw domain_error("integration requires a nonzero initial velocity");
    if (!m.manifold.in_domain(x0)) throw domain_error("initial point outside chart domain");

    geodesic_path p;
    p.metric_id = m.id;
    p.t.reserve(steps + 1);
    p.x.reserve(steps + 1);
    p.v.reserve(steps + 1);

    phase_state y{x0, v0};
    p.t.push_back(0.0);
    p.x.push_back(y.x);
    p.v.push_back(y.v);
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        y = rk4_step(m, y, h);
        if (!m.manifold.in_domain(y.x))
            throw chart_exit_error("trajectory entered excluded polar cap",
                                   static_cast<double>(s + 1) / steps);
        p.t.push_back(static_cast<double>(s + 1) / steps);
        p.x.push_back(y.x);
        p.v.push_back(y.v);
    }

    std::vector<double> fs(p.x.size()), f2s(p.x.size());
    for (size_t i = 0; i < p.x.size(); ++i) {
        fs[i] = eval_F(m, p.x[i], p.v[i]);
        f2s[i] = fs[i] * fs[i];
    }
    p.length = integrate_samples(fs, h);
    p.energy = 0.5 * integrate_samples(f2s, h);

    const double speed = std::max(1.0, fs.front());
    const Eigen::VectorXd dx = m.manifold.wrap_displacement(p.x.back() - p.x.front());
    p.is_closed = dx.norm() <= 1e-8 * speed && (p.v.back() - p.v.front()).norm() <= 1e-8 * speed;
    return p;
}

double chord_length_estimate(const metric_spec& m, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& q) {
    // F-length of straight chart segments toward q and its period translates;
    // heuristic only (chart segments are not geodesics on curved charts).
    const Eigen::VectorXd base = m.manifold.wrap_displacement(q - p);
    double best = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> candidates{base};
    if (m.manifold.has_periods()) {
        const auto& L = m.manifold.lattice;
        for (int c = 0; c < L.cols(); ++c) {
            candidates.push_back(base + L.col(c));
            candidates.push_back(base - L.col(c));
        }
    }
    for (const auto& d : candidates) {
        double len = 0.0;
        const int quad = 16;
        bool ok = true;
        for (int i = 0; i < quad; ++i) {
            const Eigen::VectorXd xm = p + (i + 0.5) / quad * d;
            if (!m.manifold.in_domain(xm)) {
                ok = false;
                break;
            }
            len += eval_F(m, xm, d) / quad;
        }
        if (ok) best = std::min(best, len);
    }
    return best;
}

shooting_result solve_bvp(const metric_spec& m, const Eigen::VectorXd& p,
                          const Eigen::VectorXd& q, double max_length, int grid_density,
                          int steps) {
    if (max_length <= 0.0) throw domain_error("max_length must be positive");
    if (grid_density < 1) throw domain_error("grid_density must be positive");
    if (m.manifold.wrapped_distance(p, q) < 1e-12)
        throw domain_error("boundary points coincide (mod periods)");
    if (!m.manifold.in_domain(p) || !m.manifold.in_domain(q))
        throw domain_error("boundary point outside chart domain");

    const int n = m.manifold.dimension;
    shooting_result out;

    auto wrap_residual = [&](const Eigen::VectorXd& x_end) {
        return m.manifold.wrap_displacement(x_end - q);
    };

    struct candidate {
        Eigen::VectorXd w;  // initial velocity
        double length;
        double angle;
        double residual;
    };
    std::vector<candidate> coarse_found;

    // Coarse stage: damped Newton at reduced step counts; starts that stall
    // are abandoned early. Duplicate basins are merged before polishing.
    auto try_start = [&](Eigen::VectorXd w) {
        const double f0 = eval_F(m, p, w);
        if (!(f0 > 1e-12) || f0 > 1.2 * max_length) return;
        const int coarse = std::clamp(static_cast<int>(32.0 * f0), 160, 1600);
        Eigen::VectorXd r;
        try {
            r = wrap_residual(integrate_endpoint(m, p, w, coarse).x);
        } catch (const chart_exit_error&) {
            return;
        }
        double rn = r.norm();
        const double rn_start = rn;
        for (int iter = 0; iter < 12 && rn > 1e-9; ++iter) {
            if (iter >= 4 && rn > 0.25 * rn_start) return;  // stalled basin
            Eigen::MatrixXd J(n, n);
            bool jac_ok = true;
            for (int c = 0; c < n; ++c) {
                Eigen::VectorXd wc = w;
                const double hfd = 1e-6 * (1.0 + std::abs(w[c]));
                wc[c] += hfd;
                try {
                    J.col(c) = (wrap_residual(integrate_endpoint(m, p, wc, coarse).x) - r) / hfd;
                } catch (const chart_exit_error&) {
                    jac_ok = false;
                    break;
                }
            }
            if (!jac_ok) return;
            Eigen::VectorXd step = J.fullPivLu().solve(-r);
            if (!step.allFinite()) return;
            double scale = 1.0;
            bool improved = false;
            for (int half = 0; half < 4; ++half) {
                const Eigen::VectorXd w_try = w + scale * step;
                try {
                    const Eigen::VectorXd r_try =
                        wrap_residual(integrate_endpoint(m, p, w_try, coarse).x);
                    if (r_try.norm() < rn) {
                        w = w_try;
                        r = r_try;
                        rn = r_try.norm();
                        improved = true;
                        break;
                    }
                } catch (const chart_exit_error&) {
                }
                scale *= 0.5;
            }
            if (!improved) return;
        }
        if (rn > 1e-6) return;
        coarse_found.push_back({w, eval_F(m, p, w), direction_angle(w), rn});
    };

    // Fine polish of one deduplicated coarse candidate.
    auto polish = [&](candidate& c) {
        Eigen::VectorXd w = c.w;
        const int fine = std::max(steps, static_cast<int>(120.0 * std::ceil(c.length)));
        for (int iter = 0; iter < 5; ++iter) {
            Eigen::VectorXd rf;
            try {
                rf = wrap_residual(integrate_endpoint(m, p, w, fine).x);
            } catch (const chart_exit_error&) {
                return false;
            }
            if (rf.norm() <= 0.02 * kBvpResidualTol) break;
            Eigen::MatrixXd J(n, n);
            for (int col = 0; col < n; ++col) {
                Eigen::VectorXd wc = w;
                const double hfd = 1e-6 * (1.0 + std::abs(w[col]));
                wc[col] += hfd;
                try {
                    J.col(col) =
                        (wrap_residual(integrate_endpoint(m, p, wc, fine).x) - rf) / hfd;
                } catch (const chart_exit_error&) {
                    return false;
                }
            }
            const Eigen::VectorXd step = J.fullPivLu().solve(-rf);
            if (!step.allFinite()) return false;
            w += step;
        }
        const double flen = eval_F(m, p, w);
        if (!(flen < max_length)) return false;
        try {
            c.residual = wrap_residual(integrate_endpoint(m, p, w, fine).x).norm();
        } catch (const chart_exit_error&) {
            return false;
        }
        if (c.residual > kBvpResidualTol) return false;
        c.w = w;
        c.length = flen;
        c.angle = direction_angle(w);
        return true;
    };

    // Direction x speed grid plus exact chord seeds toward period translates.
    const int n_dirs = 64 * grid_density;
    const double chord = chord_length_estimate(m, p, q);
    std::vector<double> speeds;
    for (double s = std::max(0.35 * chord, 0.04 * max_length); s < 1.02 * max_length; s *= 1.30)
        speeds.push_back(s);
    speeds.push_back(0.999 * max_length);

    for (int d = 0; d < n_dirs; ++d) {
        const double ang = 2.0 * M_PI * d / n_dirs;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        u[0] = std::cos(ang);
        u[1] = std::sin(ang);
        double fu;
        try {
            fu = eval_F(m, p, u);
        } catch (const domain_error&) {
            continue;
        }
        if (fu <= 1e-12) continue;
        u /= fu;  // unit vector of the indicatrix
        for (double s : speeds) try_start(s * u);
    }
    if (m.manifold.has_periods() && m.manifold.kind != chart_kind::sphere_chart &&
        m.manifold.kind != chart_kind::ellipsoid_chart) {
        // Flat charts: seed exact displacement vectors q + lattice*k - p.
        const auto& L = m.manifold.lattice;
        const int kc = static_cast<int>(L.cols());
        const int reach = 1 + static_cast<int>(std::ceil(max_length));
        std::vector<int> kk(kc, -reach);
        while (true) {
            Eigen::VectorXd disp = q - p;
            for (int c = 0; c < kc; ++c) disp += static_cast<double>(kk[c]) * L.col(c);
            if (disp.norm() > 1e-12) try_start(disp);
            int c = 0;
            while (c < kc && ++kk[c] > reach) kk[c++] = -reach;
            if (c == kc) break;
        }
    }

    // Canonical order, then dedup; duplicate basins merge before the fine
    // polish so each distinct geodesic is polished once.
    auto order = [](const candidate& a, const candidate& b) {
        return a.length != b.length ? a.length < b.length : a.angle < b.angle;
    };
    auto merge_duplicates = [&](std::vector<candidate>& cands, bool count) {
        std::sort(cands.begin(), cands.end(), order);
        std::vector<candidate> kept;
        for (auto& c : cands) {
            bool dup = false;
            for (const auto& u : kept) {
                const double da = std::abs(std::remainder(c.angle - u.angle, 2.0 * M_PI));
                if (da < kDedupAngleTol &&
                    std::abs(c.length - u.length) <
                        kDedupLengthTol * std::max(c.length, u.length)) {
                    dup = true;
                    break;
                }
            }
            if (dup) {
                if (count) ++out.duplicates_merged;
            } else {
                kept.push_back(std::move(c));
            }
        }
        cands = std::move(kept);
    };

    merge_duplicates(coarse_found, true);
    std::vector<candidate> unique;
    for (auto& c : coarse_found) {
        if (c.length >= 1.001 * max_length) continue;  // cannot polish below the cap
        if (polish(c)) unique.push_back(std::move(c));
    }
    merge_duplicates(unique, true);

    for (const auto& c : unique) {
        const int fine = std::max(steps, static_cast<int>(120.0 * std::ceil(c.length)));
        try {
            geodesic_path path = integrate_ivp(m, p, c.w, fine);
            out.paths.push_back(std::move(path));
            out.residuals.push_back(c.residual);
        } catch (const chart_exit_error&) {
        }
    }

    if (out.paths.empty() && chord < max_length)
        out.warnings.push_back(warning_kind::incomplete_search);
    return out;
}

geodesic_path concatenate_iterate(const metric_spec& m, const geodesic_path& gamma0,
                                  const geodesic_path& c, int iterations) {
    if (iterations < 0) throw domain_error("iterate count must be nonnegative");
    if (iterations == 0) return gamma0;
    if (!c.is_closed) throw domain_error("iterate requires a closed geodesic");

    const Eigen::VectorXd junction_gap =
        m.manifold.wrap_displacement(c.x.front() - gamma0.x.back());
    if (junction_gap.norm() > 1e-6 * (1.0 + gamma0.x.back().norm()))
        throw not_a_geodesic_error("concatenation junction points differ");
    if (angle_between(gamma0.v.back(), c.v.front()) > kJunctionAngleTol)
        throw not_a_geodesic_error("concatenation junction velocities are not aligned");

    const double l0 = gamma0.length, lc = c.length;
    const double L = l0 + iterations * lc;
    geodesic_path out;
    out.metric_id = gamma0.metric_id;
    const size_t total = gamma0.t.size() + iterations * (c.t.size() - 1);
    out.t.reserve(total);
    out.x.reserve(total);
    out.v.reserve(total);

    for (size_t i = 0; i < gamma0.t.size(); ++i) {
        out.t.push_back(gamma0.t[i] * l0 / L);
        out.x.push_back(gamma0.x[i]);
        out.v.push_back(gamma0.v[i] * (L / l0));
    }
    const Eigen::VectorXd lap_offset = c.x.back() - c.x.front();
    const Eigen::VectorXd start_offset = gamma0.x.back() - c.x.front();
    for (int lap = 0; lap < iterations; ++lap) {
        const Eigen::VectorXd offset = start_offset + static_cast<double>(lap) * lap_offset;
        for (size_t i = 1; i < c.t.size(); ++i) {
            out.t.push_back((l0 + (lap + c.t[i]) * lc) / L);
            out.x.push_back(c.x[i] + offset);
            out.v.push_back(c.v[i] * (L / lc));
        }
    }
    out.length = L;
    out.energy = 0.5 * L * L;
    const Eigen::VectorXd dx = m.manifold.wrap_displacement(out.x.back() - out.x.front());
    out.is_closed =
        dx.norm() <= 1e-8 * std::max(1.0, L) && (out.v.back() - out.v.front()).norm() <= 1e-8 * L;
    return out;
}

geodesic_path iterate_closed(const metric_spec& m, const geodesic_path& c, int iterations) {
    (void)m;
    if (iterations < 1) throw domain_error("iterate count must be positive");
    if (!c.is_closed) throw domain_error("iterate requires a closed geodesic");
    geodesic_path out;
    out.metric_id = c.metric_id;
    const size_t total = iterations * (c.t.size() - 1) + 1;
    out.t.reserve(total);
    out.x.reserve(total);
    out.v.reserve(total);
    const double mm = iterations;
    const Eigen::VectorXd lap_offset = c.x.back() - c.x.front();
    out.t.push_back(0.0);
    out.x.push_back(c.x.front());
    out.v.push_back(c.v.front() * mm);
    for (int lap = 0; lap < iterations; ++lap) {
        const Eigen::VectorXd offset = static_cast<double>(lap) * lap_offset;
        for (size_t i = 1; i < c.t.size(); ++i) {
            out.t.push_back((lap + c.t[i]) / mm);
            out.x.push_back(c.x[i] + offset);
            out.v.push_back(c.v[i] * mm);
        }
    }
    out.length = mm * c.length;
    out.energy = 0.5 * out.length * out.length;
    out.is_closed = true;
    out.base_point_index = 0;
    return out;
}

std::pair<geodesic_path, geodesic_path> split_at(const metric_spec& m,
                                                 const geodesic_path& gamma, double t0) {
    if (!(t0 > 0.0 && t0 < 1.0)) throw domain_error("split parameter must lie in (0,1)");
    path_interpolant interp(gamma);
    Eigen::VectorXd xs, vs;
    interp.eval(t0, xs, vs);

    geodesic_path first, second;
    first.metric_id = second.metric_id = gamma.metric_id;
    for (size_t i = 0; i < gamma.t.size() && gamma.t[i] < t0 - 1e-14; ++i) {
        first.t.push_back(gamma.t[i] / t0);
        first.x.push_back(gamma.x[i]);
        first.v.push_back(gamma.v[i] * t0);
    }
    first.t.push_back(1.0);
    first.x.push_back(xs);
    first.v.push_back(vs * t0);
    first.length = gamma.length * t0;
    first.energy = 0.5 * first.length * first.length;

    second.t.push_back(0.0);
    second.x.push_back(xs);
    second.v.push_back(vs * (1.0 - t0));
    for (size_t i = 0; i < gamma.t.size(); ++i) {
        if (gamma.t[i] <= t0 + 1e-14) continue;
        second.t.push_back((gamma.t[i] - t0) / (1.0 - t0));
        second.x.push_back(gamma.x[i]);
        second.v.push_back(gamma.v[i] * (1.0 - t0));
    }
    second.length = gamma.length * (1.0 - t0);
    second.energy = 0.5 * second.length * second.length;
    (void)m;
    return {std::move(first), std::move(second)};
}

namespace {

/// Parameter of the sample nearest to a chart point, refined on the Hermite
/// interpolant by derivative bisection; returns (t*, distance).
std::pair<double, double> locate_on_path(const metric_spec& m, const geodesic_path& c,
                                         const Eigen::VectorXd& point) {
    int best_i = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < c.x.size(); ++i) {
        const double d = m.manifold.wrapped_distance(c.x[i], point);
        if (d < best_d) {
            best_d = d;
            best_i = static_cast<int>(i);
        }
    }
    path_interpolant interp(c);
    auto dist2_grad = [&](double t) {
        Eigen::VectorXd x, v;
        interp.eval(t, x, v);
        const Eigen::VectorXd d = m.manifold.wrap_displacement(x - point);
        return d.dot(v);
    };
    const double span = 1.0 / static_cast<double>(c.t.size());
    double lo = std::max(0.0, c.t[best_i] - 2.0 * span);
    double hi = std::min(1.0, c.t[best_i] + 2.0 * span);
    double glo = dist2_grad(lo), ghi = dist2_grad(hi);
    double t_star = c.t[best_i];
    if (glo * ghi < 0.0) {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = dist2_grad(mid);
            if (glo * gm <= 0.0) {
                hi = mid;
                ghi = gm;
            } else {
                lo = mid;
                glo = gm;
            }
        }
        t_star = 0.5 * (lo + hi);
    }
    Eigen::VectorXd x, v;
    interp.eval(t_star, x, v);
    return {t_star, m.manifold.wrapped_distance(x, point)};
}

}  // namespace

geodesic_path rebase_closed(const metric_spec& m, const geodesic_path& c,
                            const Eigen::VectorXd& at_point, double tol) {
    if (!c.is_closed) throw domain_error("rebase requires a closed geodesic");
    const auto [t_star, dist] = locate_on_path(m, c, at_point);
    if (dist > tol) {
        std::ostringstream os;
        os << "point is not on the closed geodesic (distance " << dist << ")";
        throw domain_error(os.str());
    }
    path_interpolant interp(c);
    Eigen::VectorXd x0, v0;
    interp.eval(t_star, x0, v0);
    const int steps = static_cast<int>(c.t.size()) - 1;
    geodesic_path rebased = integrate_ivp(m, x0, v0, steps);
    rebased.is_closed = true;
    rebased.base_point_index = 0;
    return rebased;
}

geodesic_path arc_between(const metric_spec& m, const geodesic_path& c,
                          const Eigen::VectorXd& p, const Eigen::VectorXd& q, double tol) {
    if (!c.is_closed) throw domain_error("arc extraction requires a closed geodesic");
    const auto [tp, dp] = locate_on_path(m, c, p);
    const auto [tq, dq] = locate_on_path(m, c, q);
    if (dp > tol || dq > tol) throw domain_error("arc endpoints are not on the closed geodesic");
    double dt = tq - tp;
    dt -= std::floor(dt);  // forward arc in (0, 1)
    if (dt < 1e-12) throw domain_error("arc endpoints coincide on the curve");
    path_interpolant interp(c);
    Eigen::VectorXd x0, v0;
    interp.eval(tp, x0, v0);
    const int steps = std::max(64, static_cast<int>(std::ceil(dt * (c.t.size() - 1))));
    return integrate_ivp(m, x0, v0 * dt, steps);
}

closed_search_result find_closed_through(const metric_spec& m, const Eigen::VectorXd& p,
                                         const Eigen::VectorXd& q, double max_length,
                                         int steps) {
    closed_search_result out;
    shooting_result shots = solve_bvp(m, p, q, max_length, 1, steps);
    for (const auto& seed : shots.paths) {
        Eigen::VectorXd u = seed.v.front() / seed.length;  // unit-speed direction
        // Scan the unit-speed ray for a return to (p, u).
        const int scan_steps = std::max(1000, static_cast<int>(60.0 * max_length));
        geodesic_path ray;
        try {
            ray = integrate_ivp(m, p, u * max_length, scan_steps);
        } catch (const chart_exit_error&) {
            continue;
        }
        double period_guess = -1.0;
        for (size_t i = 1; i < ray.t.size(); ++i) {
            const double t_len = ray.t[i] * max_length;
            const double here = m.manifold.wrapped_distance(ray.x[i], p);
            const double vel_gap = (ray.v[i] / max_length - u).norm();
            // A genuine return sits much closer to p than the arc length
            // traveled; a generic nearby pass does not.
            if (t_len > 0.25 && here < 0.02 * t_len && vel_gap < 0.05) {
                period_guess = t_len;
                break;
            }
        }
        if (period_guess <= 0.0) continue;

        // Gauss-Newton on (direction angle, period): residual is the phase
        // gap after one loop.
        double ang = direction_angle(u);
        double T = period_guess;
        const int n = m.manifold.dimension;
        auto loop_residual = [&](double a, double t_per, bool& ok) {
            Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
            dir[0] = std::cos(a);
            dir[1] = std::sin(a);
            const double f = eval_F(m, p, dir);
            Eigen::VectorXd r(2 * n);
            ok = true;
            try {
                const int isteps = std::clamp(static_cast<int>(120.0 * t_per), 400, 12000);
                const phase_state end = integrate_endpoint(m, p, dir / f * t_per, isteps);
                r.head(n) = m.manifold.wrap_displacement(end.x - p);
                r.tail(n) = end.v - dir / f * t_per;
            } catch (const chart_exit_error&) {
                ok = false;
            }
            return r;
        };
        bool ok = true;
        Eigen::VectorXd r = loop_residual(ang, T, ok);
        if (!ok) continue;
        bool converged = false;
        for (int iter = 0; iter < 20; ++iter) {
            if (r.norm() < 1e-10 * std::max(1.0, T)) {
                converged = true;
                break;
            }
            const double ha = 1e-7, ht = 1e-7 * std::max(1.0, T);
            bool ok_a = true, ok_t = true;
            const Eigen::VectorXd ra = loop_residual(ang + ha, T, ok_a);
            const Eigen::VectorXd rt = loop_residual(ang, T + ht, ok_t);
            if (!ok_a || !ok_t) break;
            Eigen::MatrixXd J(2 * n, 2);
            J.col(0) = (ra - r) / ha;
            J.col(1) = (rt - r) / ht;
            const Eigen::Vector2d step =
                (J.transpose() * J).ldlt().solve(-J.transpose() * r);
            if (!step.allFinite()) break;
            ang += step[0];
            T += step[1];
            // Trust region around the scanned period; the trivial zero-period
            // loop is a spurious fixed point of the closure residual.
            if (T < 0.6 * period_guess || T > std::min(max_length, 1.5 * period_guess)) break;
            r = loop_residual(ang, T, ok);
            if (!ok) break;
        }
        if (!converged || T < 0.25) continue;

        Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
        dir[0] = std::cos(ang);
        dir[1] = std::sin(ang);
        const double f = eval_F(m, p, dir);
        const int isteps = std::clamp(static_cast<int>(250.0 * T), 1000, 24000);
        geodesic_path closed = integrate_ivp(m, p, dir / f * T, isteps);
        if (!closed.is_closed) continue;
        const double dist_q = locate_on_path(m, closed, q).second;
        if (dist_q > 1e-5 * std::max(1.0, closed.length)) continue;  // must pass through q
        out.found = true;
        out.path = std::move(closed);
        return out;
    }
    return out;
}

}  // namespace geodex

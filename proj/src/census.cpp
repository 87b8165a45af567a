#include "geodex/census.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geodex/metric.hpp"

namespace geodex {

namespace {

constexpr double kCoverTol = 1e-6;

/// Distance from a chart point to the interpolated support of a path
/// (nearest-sample bracket refined by golden-section on the squared chart
/// distance, period-aware).
double distance_to_path(const metric_spec& m, const geodesic_path& c,
                        const Eigen::VectorXd& point) {
    int best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < c.x.size(); ++i) {
        const double d = m.manifold.wrapped_distance(c.x[i], point);
        if (d < best) {
            best = d;
            best_i = static_cast<int>(i);
        }
    }
    path_interpolant interp(c);
    auto dist = [&](double t) {
        Eigen::VectorXd x, v;
        interp.eval(t, x, v);
        return m.manifold.wrapped_distance(x, point);
    };
    const double span = 1.5 / static_cast<double>(c.t.size());
    double lo = std::max(0.0, c.t[best_i] - span);
    double hi = std::min(1.0, c.t[best_i] + span);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
    double fa = dist(a), fb = dist(b);
    for (int it = 0; it < 60; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = dist(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = dist(b);
        }
    }
    return std::min({best, fa, fb});
}

bool support_covered(const metric_spec& m, const geodesic_path& entry,
                     const std::vector<geodesic_path>& covering) {
    const int probes = 48;
    path_interpolant interp(entry);
    for (int i = 0; i <= probes; ++i) {
        Eigen::VectorXd x, v;
        interp.eval(static_cast<double>(i) / probes, x, v);
        bool on_some = false;
        for (const auto& c : covering)
            if (distance_to_path(m, c, x) <= kCoverTol) {
                on_some = true;
                break;
            }
        if (!on_some) return false;
    }
    return true;
}

/// Largest slope a1 admitting a finite offset, then the smallest offset
/// a2 >= 0, for ladder[m] - ladder[m'] >= a1 (m - m') - a2 over all pairs.
std::pair<double, double> fit_gap_constants(const std::vector<std::pair<int, int>>& ladder) {
    double a1 = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ladder.size(); ++i)
        for (size_t j = 0; j < i; ++j) {
            const double dm = ladder[i].first - ladder[j].first;
            const double dl = ladder[i].second - ladder[j].second;
            a1 = std::min(a1, dl / dm);
        }
    if (!std::isfinite(a1)) return {0.0, 0.0};
    double a2 = 0.0;
    for (size_t i = 0; i < ladder.size(); ++i)
        for (size_t j = 0; j < i; ++j) {
            const double dm = ladder[i].first - ladder[j].first;
            const double dl = ladder[i].second - ladder[j].second;
            a2 = std::max(a2, a1 * dm - dl);
        }
    return {a1, a2};
}

bool is_flat_chart(const chart_manifold& c) {
    return c.kind == chart_kind::euclidean_plane || c.kind == chart_kind::periodic_lattice;
}

}  // namespace

int census_table::count_below(double L) const {
    int c = 0;
    for (const auto& e : entries)
        if (e.length < L) ++c;
    return c;
}

std::optional<std::vector<census_oracle_entry>> closed_form_census(const metric_spec& m,
                                                                   const Eigen::VectorXd& p,
                                                                   const Eigen::VectorXd& q,
                                                                   double L_max) {
    std::vector<census_oracle_entry> out;
    if (is_flat_chart(m.manifold)) {
        // Straight chart segments toward q + lattice translates; the one-form
        // part adds beta . displacement; flat geodesics carry no conjugate
        // points, so every index is zero.
        std::vector<Eigen::VectorXd> disps;
        const Eigen::VectorXd base = q - p;
        if (!m.manifold.has_periods()) {
            disps.push_back(base);
        } else {
            const auto& L = m.manifold.lattice;
            const int kc = static_cast<int>(L.cols());
            double min_period = std::numeric_limits<double>::infinity();
            for (int c = 0; c < kc; ++c) min_period = std::min(min_period, L.col(c).norm());
            const int reach =
                2 + static_cast<int>(std::ceil((L_max + base.norm()) / min_period));
            std::vector<int> kk(kc, -reach);
            while (true) {
                Eigen::VectorXd d = base;
                for (int c = 0; c < kc; ++c) d += static_cast<double>(kk[c]) * L.col(c);
                disps.push_back(d);
                int c = 0;
                while (c < kc && ++kk[c] > reach) kk[c++] = -reach;
                if (c == kc) break;
            }
        }
        for (const auto& d : disps) {
            if (d.norm() < 1e-12) continue;
            double len = d.norm();
            if (m.kind == metric_kind::randers) len += m.beta.dot(d);
            if (len < L_max) out.push_back({len, 0});
        }
        std::sort(out.begin(), out.end(),
                  [](const census_oracle_entry& a, const census_oracle_entry& b) {
                      return a.length < b.length;
                  });
        return out;
    }
    if (m.manifold.kind == chart_kind::sphere_chart && m.kind == metric_kind::riemannian) {
        // Non-antipodal pairs: all connecting geodesics run along the unique
        // great circle; arc lengths d + 2 pi k and (2 pi - d) + 2 pi k, index
        // = number of interior conjugate points = floor(len / pi).
        const double r = m.manifold.radius;
        const double ct = std::cos(p[0]) * std::cos(q[0]) +
                          std::sin(p[0]) * std::sin(q[0]) * std::cos(q[1] - p[1]);
        const double d = r * std::acos(std::clamp(ct, -1.0, 1.0));
        const double circ = 2.0 * M_PI * r;
        if (d < 1e-9 || circ / 2.0 - d < 1e-9) return std::nullopt;  // conjugate pair
        for (double len = d; len < L_max; len += circ)
            out.push_back({len, static_cast<int>(std::floor(len / (M_PI * r)))});
        for (double len = circ - d; len < L_max; len += circ)
            out.push_back({len, static_cast<int>(std::floor(len / (M_PI * r)))});
        std::sort(out.begin(), out.end(),
                  [](const census_oracle_entry& a, const census_oracle_entry& b) {
                      return a.length < b.length;
                  });
        return out;
    }
    return std::nullopt;
}

census_table build_census(const metric_spec& m, const Eigen::VectorXd& p,
                          const Eigen::VectorXd& q, double L_max, int grid_density, int steps,
                          int segments, bool with_hessian) {
    census_table table;
    table.p = p;
    table.q = q;

    shooting_result shots = solve_bvp(m, p, q, L_max, grid_density, steps);
    table.warnings = shots.warnings;

    for (auto& path : shots.paths) {
        census_entry e;
        e.length = path.length;
        e.report = compute_index_report(m, path, segments, with_hessian);
        e.index = e.report.lambda_dirichlet;
        e.nullity = e.report.nullity_dirichlet;
        e.path = std::move(path);
        table.entries.push_back(std::move(e));
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const census_entry& a, const census_entry& b) { return a.length < b.length; });

    for (const auto& e : table.entries) ++table.N_k[e.index];
    for (size_t i = 0; i < table.entries.size(); ++i) {
        const double L = table.entries[i].length;
        if (i + 1 < table.entries.size() && table.entries[i + 1].length - L < 1e-9) continue;
        table.N_of_L.emplace_back(L, static_cast<int>(i + 1));
    }
    table.pair_non_conjugate = std::all_of(
        table.entries.begin(), table.entries.end(),
        [](const census_entry& e) { return e.nullity == 0; });

    if (auto oracle = closed_form_census(m, p, q, L_max)) {
        bool match = oracle->size() == table.entries.size();
        for (size_t i = 0; match && i < oracle->size(); ++i) {
            match = std::abs((*oracle)[i].length - table.entries[i].length) <=
                        1e-6 * std::max(1.0, (*oracle)[i].length) &&
                    (*oracle)[i].index == table.entries[i].index;
        }
        if (match)
            table.completeness = completeness_tag::oracle_exact;
        else
            table.warnings.push_back(warning_kind::incomplete_search);
    }
    return table;
}

covered_bound_report covered_bound_check(const metric_spec& m, const census_table& table,
                                         const std::vector<geodesic_path>& covering) {
    covered_bound_report out;
    if (covering.empty()) return out;  // not applicable
    for (const auto& e : table.entries)
        if (!support_covered(m, e.path, covering)) return out;

    out.applicable = true;
    out.covering_count = static_cast<int>(covering.size());
    out.L0 = std::numeric_limits<double>::infinity();
    for (const auto& c : covering) out.L0 = std::min(out.L0, c.length);

    bool all_hold = true;
    for (const auto& [L, count] : table.N_of_L) {
        covered_bound_report::sample s;
        s.L = L;
        s.lhs = count;
        s.rhs = 2.0 * out.covering_count * (1.0 + L / out.L0);
        all_hold = all_hold && s.lhs <= s.rhs;
        out.samples.push_back(s);
    }
    out.result = all_hold ? outcome::pass : outcome::fail;
    return out;
}

subadditivity_report subadditivity_check(const metric_spec& m, const geodesic_path& gamma,
                                         const std::vector<double>& split_points,
                                         int segments) {
    subadditivity_report out;
    jacobi_system sys = linearize(m, gamma);
    const morse_index_result whole =
        morse_index(sys, boundary_condition::dirichlet, segments);
    out.lambda_whole = whole.index;

    for (double t0 : split_points) {
        auto [first, second] = split_at(m, gamma, t0);
        jacobi_system s1 = linearize(m, first);
        jacobi_system s2 = linearize(m, second);
        const morse_index_result r1 = morse_index(s1, boundary_condition::dirichlet, segments);
        const morse_index_result r2 = morse_index(s2, boundary_condition::dirichlet, segments);
        subadditivity_report::split sp;
        sp.t0 = t0;
        sp.lambda_whole = whole.index;
        sp.lambda_first = r1.index;
        sp.lambda_second = r2.index;
        if (whole.ambiguous || r1.ambiguous || r2.ambiguous)
            sp.result = outcome::inconclusive;
        else
            sp.result = whole.index >= r1.index + r2.index ? outcome::pass : outcome::fail;
        if (sp.result == outcome::fail) out.result = outcome::fail;
        else if (sp.result == outcome::inconclusive && out.result == outcome::pass)
            out.result = outcome::inconclusive;
        out.splits.push_back(sp);
    }
    return out;
}

growth_report iterate_growth(const metric_spec& m, const geodesic_path& c,
                             const Eigen::VectorXd& p, const Eigen::VectorXd& q, int m_max) {
    if (m_max < 4) throw domain_error("iterate growth requires m_max >= 4");
    growth_report out;

    const geodesic_path c_p = rebase_closed(m, c, p);
    const geodesic_path c_q = rebase_closed(m, c, q);
    const geodesic_path arc = arc_between(m, c, p, q);

    for (int mm = 1; mm <= m_max; ++mm) {
        growth_report::row row;
        row.m = mm;
        try {
            const geodesic_path concat = concatenate_iterate(m, arc, c_q, mm);
            const geodesic_path iter = iterate_closed(m, c_p, mm);
            jacobi_system sys_g = linearize(m, concat);
            jacobi_system sys_c = linearize(m, iter);
            const morse_index_result lg =
                morse_index(sys_g, boundary_condition::dirichlet);
            const morse_index_result lt = morse_index(sys_c, boundary_condition::periodic);
            const morse_index_result lc = morse_index(sys_c, boundary_condition::dirichlet);
            row.lambda_concat = lg.index;
            row.lambda_tilde = lt.index;
            row.concavity = lt.index - lc.index;
            row.ambiguous = lg.ambiguous || lt.ambiguous || lc.ambiguous;
        } catch (const chart_exit_error&) {
            out.warnings.push_back(warning_kind::truncated_iterate);
            break;
        }
        out.rows.push_back(row);
    }

    std::vector<std::pair<int, int>> ladder;
    for (const auto& r : out.rows) ladder.emplace_back(r.m, r.lambda_tilde);
    std::tie(out.fitted_slope, out.fitted_intercept) = fit_gap_constants(ladder);
    out.all_zero = std::all_of(out.rows.begin(), out.rows.end(), [](const growth_report::row& r) {
        return r.lambda_concat == 0 && r.lambda_tilde == 0;
    });
    return out;
}

int betti_table::value(int k) const {
    if (k < 0) return 0;
    if (space == "S2") return 1;
    if (space == "S3") return k % 2 == 0 ? 1 : 0;
    throw domain_error("no shipped Betti table for space tag '" + space + "'");
}

betti_table loop_space_betti(const std::string& space) {
    if (space != "S2" && space != "S3")
        throw domain_error("shipped Betti tables cover loop spaces of S2 and S3 only");
    betti_table t;
    t.space = space;
    return t;
}

morse_inequality_report morse_inequality_check(const census_table& table,
                                               const betti_table& betti, int k_max) {
    morse_inequality_report out;
    out.asserted = table.completeness == completeness_tag::oracle_exact;

    int max_realized = -1;
    for (const auto& [k, count] : table.N_k)
        if (count > 0) max_realized = std::max(max_realized, k);
    if (out.asserted && max_realized < k_max)
        throw insufficient_data_error(
            "census realizes indices only up to " + std::to_string(max_realized) +
            "; increase L_max to cover k_max = " + std::to_string(k_max));

    bool all_hold = true;
    for (int k = 0; k <= k_max; ++k) {
        morse_inequality_report::row row;
        row.k = k;
        row.betti = betti.value(k);
        const auto it = table.N_k.find(k);
        row.N_k = it == table.N_k.end() ? 0 : it->second;
        row.holds = row.betti <= row.N_k;
        all_hold = all_hold && row.holds;
        out.rows.push_back(row);
    }
    if (!out.asserted)
        out.result = outcome::inconclusive;  // reported, not asserted
    else
        out.result = all_hold ? outcome::pass : outcome::fail;
    return out;
}

contradiction_demo_report boundedness_contradiction_demo(
    const metric_spec& m, const std::vector<geodesic_path>& covering, const Eigen::VectorXd& p,
    const Eigen::VectorXd& q, int k_max) {
    contradiction_demo_report out;
    std::ostringstream story;
    if (covering.empty()) {
        out.narrative = "No covering closed geodesics supplied; the counting bound "
                        "presupposes a finite covering, so the demonstration is "
                        "not applicable.";
        return out;
    }

    double L0 = std::numeric_limits<double>::infinity();
    for (const auto& c : covering) L0 = std::min(L0, c.length);
    const double L_max = std::max(4.0 * L0, (k_max + 2) * L0);
    census_table table = build_census(m, p, q, L_max, 1, 1000, 0, false);
    for (const auto& e : table.entries)
        if (!support_covered(m, e.path, covering)) {
            out.narrative = "A census geodesic leaves the covering family; the bound "
                            "presupposes covering, so the demonstration is not applicable.";
            return out;
        }

    out.applicable = true;
    out.covering_count = static_cast<int>(covering.size());
    story << "All " << table.entries.size() << " geodesics from p to q up to length " << L_max
          << " lie on " << out.covering_count << " closed geodesic(s).\n";

    // Periodic index ladder of each covering geodesic's iterates.
    const int ladder_max = 6;
    bool any_growth = false;
    for (const auto& c : covering) {
        contradiction_demo_report::ladder lad;
        lad.length = c.length;
        std::vector<std::pair<int, int>> rows;
        for (int mm = 1; mm <= ladder_max; ++mm) {
            const geodesic_path iter = iterate_closed(m, c, mm);
            jacobi_system sys = linearize(m, iter);
            rows.emplace_back(mm, morse_index(sys, boundary_condition::periodic).index);
        }
        std::tie(lad.b1, lad.b2) = fit_gap_constants(rows);
        any_growth = any_growth || lad.b1 > 0.0;
        out.ladders.push_back(lad);
        story << "Closed geodesic of length " << c.length << ": iterate index ladder grows "
              << "with slope b1 = " << lad.b1 << ", offset b2 = " << lad.b2 << ".\n";
    }

    double ratio = 2.0;
    for (const auto& lad : out.ladders)
        if (lad.b1 > 0.0) ratio = std::max(ratio, lad.b2 / lad.b1);
    out.uniform_bound = out.covering_count * ratio;

    // With growing ladders every index level receives boundedly many
    // iterates, so N_k <= K for all k; a bounded (all-zero) ladder instead
    // forces N_k = 0 for k >= 1, and the k = 0 count is a finite-length
    // census fact outside the ladder argument.
    const int k_lo = any_growth ? 0 : 1;
    bool all_hold = true;
    for (int k = k_lo; k <= k_max; ++k) {
        contradiction_demo_report::row row;
        row.k = k;
        const auto it = table.N_k.find(k);
        row.N_k = it == table.N_k.end() ? 0 : it->second;
        row.holds = row.N_k <= out.uniform_bound;
        all_hold = all_hold && row.holds;
        out.rows.push_back(row);
    }
    story << "Uniform bound K = " << out.covering_count << " x max(b2/b1, 2) = "
          << out.uniform_bound << "; every realized index level k satisfies N_k <= K.\n";
    if (any_growth)
        story << "A loop-space homology with unbounded Betti numbers would force N_k to "
                 "exceed any such K by the Morse inequalities, a contradiction; here the "
                 "Betti numbers are bounded, so the counting sits exactly at the boundary "
                 "case (N_k = 1 on the round sphere).";
    else
        story << "Every ladder is bounded (flat case): indices above zero never occur, and "
                 "the finite k = 0 count is a census fact outside the ladder argument.";
    out.narrative = story.str();
    out.result = all_hold ? outcome::pass : outcome::fail;
    return out;
}

}  // namespace geodex

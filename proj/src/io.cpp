#include "geodex/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geodex/hash.hpp"

namespace geodex {

using nlohmann::json;

namespace {

std::string chart_kind_tag(chart_kind k) {
    switch (k) {
        case chart_kind::euclidean_plane: return "euclidean-plane";
        case chart_kind::periodic_lattice: return "periodic-lattice";
        case chart_kind::sphere_chart: return "sphere-chart";
        case chart_kind::ellipsoid_chart: return "ellipsoid-chart";
    }
    return "unknown";
}

json lattice_to_json(const Eigen::MatrixXd& L) {
    json cols = json::array();
    for (int c = 0; c < L.cols(); ++c) {
        json col = json::array();
        for (int r = 0; r < L.rows(); ++r) col.push_back(L(r, c));
        cols.push_back(col);
    }
    return cols;
}

Eigen::VectorXd vector_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
    return v;
}

}  // namespace

metric_spec metric_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw domain_error(std::string("metric JSON is malformed: ") + e.what());
    }
    if (!j.contains("manifold") || !j.contains("kind"))
        throw domain_error("metric JSON needs 'manifold' and 'kind'");

    const json& jm = j["manifold"];
    const std::string ck = jm.value("kind", "");
    if (jm.value("dimension", 2) != 2)
        throw domain_error("only 2-dimensional charts are supported");

    chart_manifold chart;
    if (ck == "euclidean-plane") {
        chart = make_euclidean_plane();
    } else if (ck == "periodic-lattice") {
        if (jm.contains("lattice")) {
            const json& jl = jm["lattice"];
            const int cols = static_cast<int>(jl.size());
            if (cols == 0) throw domain_error("periodic lattice needs at least one period");
            const int rows = static_cast<int>(jl[0].size());
            Eigen::MatrixXd L(rows, cols);
            for (int c = 0; c < cols; ++c)
                for (int r = 0; r < rows; ++r) L(r, c) = jl[c][r].get<double>();
            chart = make_lattice_torus(L);
        } else {
            chart = make_unit_square_torus();
        }
    } else if (ck == "sphere-chart") {
        chart = make_sphere(jm.value("radius", 1.0), jm.value("pole_exclusion", 0.05));
    } else if (ck == "ellipsoid-chart") {
        if (!jm.contains("semi_axes") || jm["semi_axes"].size() != 3)
            throw domain_error("ellipsoid chart needs 3 semi_axes");
        chart = make_ellipsoid(jm["semi_axes"][0].get<double>(),
                               jm["semi_axes"][1].get<double>(),
                               jm["semi_axes"][2].get<double>(),
                               jm.value("pole_exclusion", 0.05));
    } else {
        throw domain_error("unknown manifold kind '" + ck + "'");
    }

    const std::string mk = j["kind"].get<std::string>();
    if (mk == "riemannian") return make_flat_metric(std::move(chart));
    if (mk == "randers") {
        if (!j.contains("beta")) throw domain_error("randers metric needs 'beta'");
        const Eigen::VectorXd beta = vector_from_json(j["beta"]);
        if (beta.size() != chart.dimension)
            throw domain_error("beta dimension does not match the chart");
        return make_randers_metric(std::move(chart), beta);
    }
    throw domain_error("unknown metric kind '" + mk + "'");
}

metric_spec metric_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open metric file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return metric_from_json(ss.str());
}

std::string metric_to_json(const metric_spec& m) {
    json jm;
    jm["kind"] = chart_kind_tag(m.manifold.kind);
    jm["dimension"] = m.manifold.dimension;
    if (m.manifold.kind == chart_kind::sphere_chart) {
        jm["radius"] = m.manifold.radius;
        jm["pole_exclusion"] = m.manifold.pole_exclusion;
    }
    if (m.manifold.kind == chart_kind::ellipsoid_chart) {
        jm["semi_axes"] = {m.manifold.semi_axes[0], m.manifold.semi_axes[1],
                           m.manifold.semi_axes[2]};
        jm["pole_exclusion"] = m.manifold.pole_exclusion;
    }
    if (m.manifold.kind == chart_kind::periodic_lattice)
        jm["lattice"] = lattice_to_json(m.manifold.lattice);

    json j;
    j["manifold"] = jm;
    j["kind"] = m.kind == metric_kind::riemannian ? "riemannian" : "randers";
    if (m.kind == metric_kind::randers) {
        json b = json::array();
        for (int i = 0; i < m.beta.size(); ++i) b.push_back(m.beta[i]);
        j["beta"] = b;
    }
    return j.dump(2);
}

std::string config_hash(const std::string& canonical_text) { return fnv1a_hex(canonical_text); }

std::string path_to_json(const geodesic_path& p) {
    json j;
    j["metric_id"] = p.metric_id;
    j["length"] = p.length;
    j["energy"] = p.energy;
    j["is_closed"] = p.is_closed;
    j["base_point_index"] = p.base_point_index;
    j["t"] = p.t;
    json xs = json::array(), vs = json::array();
    for (size_t i = 0; i < p.x.size(); ++i) {
        json xr = json::array(), vr = json::array();
        for (int c = 0; c < p.x[i].size(); ++c) {
            xr.push_back(p.x[i][c]);
            vr.push_back(p.v[i][c]);
        }
        xs.push_back(xr);
        vs.push_back(vr);
    }
    j["x"] = xs;
    j["v"] = vs;
    return j.dump();
}

geodesic_path path_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw domain_error(std::string("path JSON is malformed: ") + e.what());
    }
    geodesic_path p;
    p.metric_id = j.value("metric_id", "");
    p.length = j.value("length", 0.0);
    p.energy = j.value("energy", 0.0);
    p.is_closed = j.value("is_closed", false);
    p.base_point_index = j.value("base_point_index", 0);
    p.t = j["t"].get<std::vector<double>>();
    for (const auto& row : j["x"]) p.x.push_back(vector_from_json(row));
    for (const auto& row : j["v"]) p.v.push_back(vector_from_json(row));
    if (p.t.size() != p.x.size() || p.t.size() != p.v.size())
        throw domain_error("path JSON arrays have mismatched lengths");
    return p;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string census_to_csv(const census_table& t, const std::string& config_hash) {
    std::ostringstream os;
    os << "# config_hash=" << config_hash << "\n";
    os << "length,index,nullity\n";
    for (const auto& e : t.entries)
        os << format_double(e.length) << "," << e.index << "," << e.nullity << "\n";
    return os.str();
}

std::string census_to_json(const census_table& t, const std::string& config_hash) {
    json j;
    j["config_hash"] = config_hash;
    j["p"] = std::vector<double>(t.p.data(), t.p.data() + t.p.size());
    j["q"] = std::vector<double>(t.q.data(), t.q.data() + t.q.size());
    j["completeness"] =
        t.completeness == completeness_tag::oracle_exact ? "oracle-exact" : "search-based";
    j["pair_non_conjugate"] = t.pair_non_conjugate;
    json entries = json::array();
    for (const auto& e : t.entries) {
        json je;
        je["length"] = e.length;
        je["index"] = e.index;
        je["nullity"] = e.nullity;
        entries.push_back(je);
    }
    j["entries"] = entries;
    json steps = json::array();
    for (const auto& [L, count] : t.N_of_L) steps.push_back({L, count});
    j["N_of_L"] = steps;
    json nk = json::object();
    for (const auto& [k, count] : t.N_k) nk[std::to_string(k)] = count;
    j["N_k"] = nk;
    json warns = json::array();
    for (auto w : t.warnings) warns.push_back(warning_name(w));
    j["warnings"] = warns;
    return j.dump(2);
}

std::string growth_to_csv(const growth_report& r, const std::string& config_hash) {
    std::ostringstream os;
    os << "# config_hash=" << config_hash << "\n";
    os << "m,lambda_concat,lambda_tilde,concavity,ambiguous\n";
    for (const auto& row : r.rows)
        os << row.m << "," << row.lambda_concat << "," << row.lambda_tilde << ","
           << row.concavity << "," << (row.ambiguous ? 1 : 0) << "\n";
    return os.str();
}

std::string growth_to_json(const growth_report& r, const std::string& config_hash) {
    json j;
    j["config_hash"] = config_hash;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr;
        jr["m"] = row.m;
        jr["lambda_concat"] = row.lambda_concat;
        jr["lambda_tilde"] = row.lambda_tilde;
        jr["concavity"] = row.concavity;
        jr["ambiguous"] = row.ambiguous;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    j["fitted_slope"] = r.fitted_slope;
    j["fitted_intercept"] = r.fitted_intercept;
    j["all_zero"] = r.all_zero;
    json warns = json::array();
    for (auto w : r.warnings) warns.push_back(warning_name(w));
    j["warnings"] = warns;
    return j.dump(2);
}

std::string identity_to_json(const identity_report& r, const std::string& config_hash) {
    json j;
    j["config_hash"] = config_hash;
    j["lambda_periodic"] = r.lambda_periodic;
    j["lambda_dirichlet"] = r.lambda_dirichlet;
    j["dim_J0"] = r.dim_J0;
    j["dim_J0_cap_Jp"] = r.dim_J0_cap_Jp;
    j["b_n_minus"] = r.b_n_minus;
    j["right_side"] = r.right_side;
    j["identity_holds"] = r.identity_holds;
    j["concavity"] = r.concavity;
    j["dim_ker_b"] = r.dim_ker_b;
    j["dim_Jp"] = r.dim_Jp;
    j["concavity_formula"] = r.concavity_formula;
    j["concavity_formula_holds"] = r.concavity_formula_holds;
    j["concavity_bounds_hold"] = r.concavity_bounds_hold;
    j["sharper_upper_bound"] = r.sharper_upper_bound;
    j["result"] = outcome_name(r.result);
    json warns = json::array();
    for (auto w : r.warnings) warns.push_back(warning_name(w));
    j["warnings"] = warns;
    return j.dump(2);
}

std::string identity_ledger_text(const identity_report& r) {
    std::ostringstream os;
    os << r.lambda_periodic << " = " << r.lambda_dirichlet << " + " << r.dim_J0 << " - "
       << r.dim_J0_cap_Jp << " + " << r.b_n_minus << "  ";
    switch (r.result) {
        case outcome::pass: os << "PASS"; break;
        case outcome::fail: os << "FAIL"; break;
        case outcome::inconclusive: os << "INCONCLUSIVE"; break;
    }
    return os.str();
}

std::string step_function_csv(const census_table& t) {
    std::ostringstream os;
    os << "L,N\n";
    for (const auto& [L, count] : t.N_of_L) os << format_double(L) << "," << count << "\n";
    return os.str();
}

std::string index_ladder_csv(const growth_report& r) {
    std::ostringstream os;
    os << "m,index\n";
    for (const auto& row : r.rows) os << row.m << "," << row.lambda_tilde << "\n";
    return os.str();
}

std::string path_samples_csv(const geodesic_path& p) {
    std::ostringstream os;
    os << "t";
    for (int c = 0; c < (p.x.empty() ? 0 : p.x[0].size()); ++c) os << ",x" << c;
    for (int c = 0; c < (p.v.empty() ? 0 : p.v[0].size()); ++c) os << ",v" << c;
    os << "\n";
    for (size_t i = 0; i < p.t.size(); ++i) {
        os << format_double(p.t[i]);
        for (int c = 0; c < p.x[i].size(); ++c) os << "," << format_double(p.x[i][c]);
        for (int c = 0; c < p.v[i].size(); ++c) os << "," << format_double(p.v[i][c]);
        os << "\n";
    }
    return os.str();
}

}  // namespace geodex

// geodex: geodesic census, Morse-index, and iterate-growth experiments on
// 2D Finsler metrics (Riemannian and Randers), with reproducible CSV/JSON
// artifacts.
//
// Exit codes: 0 success, 1 computation failure, 2 configuration error,
// 3 inconclusive result.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "geodex/io.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitComputation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;

Eigen::VectorXd parse_point(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw geodex::domain_error("bad coordinate '" + tok + "'");
    }
    if (vals.size() != 2) throw geodex::domain_error("points need exactly 2 coordinates");
    Eigen::VectorXd v(2);
    v << vals[0], vals[1];
    return v;
}

struct run_options {
    std::string metric_file;
    std::string command;
    std::string p_text = "0,0";
    std::string q_text = "0,0";
    double lmax = 10.0;
    int mmax = 8;
    int kmax = 6;
    int segments = 0;
    int steps = 1000;
    int grid = 1;
    unsigned seed = 12345;
    std::string out_dir;
    std::string format = "both";
};

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw geodex::domain_error("cannot write '" + path.string() + "'");
    out << body;
}

std::string make_config_hash(const run_options& opt, const geodex::metric_spec& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.id << "|" << opt.command << "|p" << opt.p_text << "|q" << opt.q_text << "|L"
       << opt.lmax << "|m" << opt.mmax << "|k" << opt.kmax << "|seg" << opt.segments << "|st"
       << opt.steps << "|g" << opt.grid << "|s" << opt.seed;
    return geodex::config_hash(os.str());
}

int run(const run_options& opt) {
    namespace fs = std::filesystem;
    const geodex::metric_spec metric = geodex::metric_from_json_file(opt.metric_file);
    const Eigen::VectorXd p = parse_point(opt.p_text);
    const Eigen::VectorXd q = parse_point(opt.q_text);
    if (opt.lmax <= 0 || opt.mmax <= 0 || opt.kmax < 0)
        throw geodex::domain_error("caps must be positive");
    if (opt.steps < 16 || opt.steps > 200000 || opt.segments < 0 || opt.segments > 20000 ||
        opt.grid < 1 || opt.grid > 64)
        throw geodex::domain_error("resolution outside documented range");

    const fs::path out_dir = opt.out_dir;
    fs::create_directories(out_dir);
    const std::string hash = make_config_hash(opt, metric);
    const bool want_json = opt.format == "json" || opt.format == "both";
    const bool want_csv = opt.format == "csv" || opt.format == "both";

    std::cout << "metric " << metric.id << "  config " << hash << "\n";

    if (opt.command == "geodesic") {
        const geodex::shooting_result shots =
            geodex::solve_bvp(metric, p, q, opt.lmax, opt.grid, opt.steps);
        std::cout << "geodesics found: " << shots.paths.size() << "\n";
        for (size_t i = 0; i < shots.paths.size(); ++i) {
            std::cout << "  [" << i << "] length " << shots.paths[i].length << " residual "
                      << shots.residuals[i] << "\n";
            if (want_json)
                write_file(out_dir / ("geodesic_" + std::to_string(i) + ".json"),
                           geodex::path_to_json(shots.paths[i]));
            if (want_csv)
                write_file(out_dir / ("geodesic_" + std::to_string(i) + ".csv"),
                           geodex::path_samples_csv(shots.paths[i]));
        }
        for (auto w : shots.warnings)
            std::cout << "warning: " << geodex::warning_name(w) << "\n";
        return shots.warnings.empty() ? kExitSuccess : kExitInconclusive;
    }

    if (opt.command == "index") {
        const geodex::shooting_result shots =
            geodex::solve_bvp(metric, p, q, opt.lmax, opt.grid, opt.steps);
        if (shots.paths.empty())
            throw geodex::insufficient_data_error("no geodesic below --lmax to index");
        const geodex::geodesic_path& shortest = shots.paths.front();
        const geodex::index_report rep =
            geodex::compute_index_report(metric, shortest, opt.segments);
        std::cout << "length " << shortest.length << "  dirichlet index "
                  << rep.lambda_dirichlet << "  nullity " << rep.nullity_dirichlet << "\n";
        for (const auto& [method, value] : rep.method_agreement)
            std::cout << "  " << method << ": " << value << "\n";
        nlohmann::json j;
        j["config_hash"] = hash;
        j["length"] = shortest.length;
        j["lambda_dirichlet"] = rep.lambda_dirichlet;
        j["nullity_dirichlet"] = rep.nullity_dirichlet;
        j["segments"] = rep.segments_used;
        j["ambiguous"] = rep.ambiguous;
        for (const auto& [method, value] : rep.method_agreement) j["methods"][method] = value;
        if (want_json) write_file(out_dir / "index.json", j.dump(2));
        return rep.ambiguous ? kExitInconclusive : kExitSuccess;
    }

    if (opt.command == "census") {
        const geodex::census_table table =
            geodex::build_census(metric, p, q, opt.lmax, opt.grid, opt.steps, opt.segments);
        std::cout << "census entries: " << table.entries.size() << " ("
                  << (table.completeness == geodex::completeness_tag::oracle_exact
                          ? "oracle-exact"
                          : "search-based")
                  << ")\n";
        for (const auto& e : table.entries)
            std::cout << "  length " << e.length << "  index " << e.index << "  nullity "
                      << e.nullity << "\n";
        if (want_csv) {
            write_file(out_dir / "census.csv", geodex::census_to_csv(table, hash));
            write_file(out_dir / "step_function.csv", geodex::step_function_csv(table));
        }
        if (want_json) write_file(out_dir / "census.json", geodex::census_to_json(table, hash));
        for (auto w : table.warnings)
            std::cout << "warning: " << geodex::warning_name(w) << "\n";
        return table.warnings.empty() ? kExitSuccess : kExitInconclusive;
    }

    if (opt.command == "growth") {
        const geodex::closed_search_result closed =
            geodex::find_closed_through(metric, p, q, opt.lmax, opt.steps);
        if (!closed.found)
            throw geodex::insufficient_data_error(
                "no closed geodesic through p and q below --lmax");
        const geodex::growth_report rep =
            geodex::iterate_growth(metric, closed.path, p, q, opt.mmax);
        std::cout << "closed geodesic length " << closed.path.length << "\n";
        for (const auto& row : rep.rows)
            std::cout << "  m=" << row.m << "  lambda(gamma^m)=" << row.lambda_concat
                      << "  lambda~(c^m)=" << row.lambda_tilde << "  con=" << row.concavity
                      << (row.ambiguous ? "  (ambiguous)" : "") << "\n";
        std::cout << "fitted slope a1 = " << rep.fitted_slope << ", offset a2 = "
                  << rep.fitted_intercept << (rep.all_zero ? "  [all indices zero]" : "")
                  << "\n";
        if (want_csv) {
            write_file(out_dir / "growth.csv", geodex::growth_to_csv(rep, hash));
            write_file(out_dir / "index_ladder.csv", geodex::index_ladder_csv(rep));
        }
        if (want_json) write_file(out_dir / "growth.json", geodex::growth_to_json(rep, hash));
        const bool ambiguous = !rep.warnings.empty() ||
                               std::any_of(rep.rows.begin(), rep.rows.end(),
                                           [](const auto& r) { return r.ambiguous; });
        return ambiguous ? kExitInconclusive : kExitSuccess;
    }

    if (opt.command == "verify") {
        const geodex::closed_search_result closed =
            geodex::find_closed_through(metric, p, q, opt.lmax, opt.steps);
        if (!closed.found)
            throw geodex::insufficient_data_error(
                "no closed geodesic through p and q below --lmax");
        const geodex::identity_report rep =
            geodex::verify_index_decomposition(metric, closed.path, 0, opt.segments);
        const std::string ledger = geodex::identity_ledger_text(rep);
        std::cout << ledger << "\n";
        write_file(out_dir / "identity.txt", ledger + "\n");
        if (want_json)
            write_file(out_dir / "identity.json", geodex::identity_to_json(rep, hash));
        switch (rep.result) {
            case geodex::outcome::pass: return kExitSuccess;
            case geodex::outcome::inconclusive: return kExitInconclusive;
            case geodex::outcome::fail: return kExitComputation;
        }
    }

    throw geodex::domain_error("unknown command '" + opt.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    run_options opt;
    if (const char* env_out = std::getenv("GEODEX_OUT")) opt.out_dir = env_out;
    if (opt.out_dir.empty()) opt.out_dir = ".";

    CLI::App app{
        "geodex: geodesic census, Morse index, and iterate-growth experiments "
        "on 2D Finsler metrics"};
    app.add_option("--metric", opt.metric_file, "metric description JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--command", opt.command,
                   "one of: geodesic | index | census | growth | verify")
        ->required()
        ->check(CLI::IsMember({"geodesic", "index", "census", "growth", "verify"}));
    app.add_option("--p", opt.p_text, "start point chart coordinates, e.g. 0.1,0.2");
    app.add_option("--q", opt.q_text, "end point chart coordinates");
    app.add_option("--lmax", opt.lmax, "length cap for searches");
    app.add_option("--mmax", opt.mmax, "largest iterate count (growth)");
    app.add_option("--kmax", opt.kmax, "largest index level (inequality checks)");
    app.add_option("--segments", opt.segments, "finite-element segments (0 = automatic)");
    app.add_option("--steps", opt.steps, "integration steps per unit parameter");
    app.add_option("--grid", opt.grid, "shooting direction-grid density multiplier");
    app.add_option("--seed", opt.seed, "seed for sampled checks");
    app.add_option("--out", opt.out_dir,
                   "output directory (default: $GEODEX_OUT or current directory)");
    app.add_option("--format", opt.format, "artifact format")
        ->check(CLI::IsMember({"json", "csv", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitSuccess : kExitConfig;
    }

    try {
        return run(opt);
    } catch (const geodex::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const geodex::insufficient_data_error& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return kExitComputation;
    }
}

#pragma once

#include <string>

#include "geodex/census.hpp"

namespace geodex {

/// Loads a metric from its JSON description:
///   {"manifold": {"kind": "sphere-chart" | "euclidean-plane" |
///                 "periodic-lattice" | "ellipsoid-chart",
///                 "dimension": 2, "radius": 1.0, "pole_exclusion": 0.05,
///                 "lattice": [[1,0],[0,1]], "semi_axes": [1.0,1.1,1.3]},
///    "kind": "riemannian" | "randers",
///    "beta": [0.5, 0.0]}
/// All numbers are IEEE double-precision decimal literals. The parsed metric
/// carries a content hash in .id.
metric_spec metric_from_json(const std::string& json_text);
metric_spec metric_from_json_file(const std::string& path);
std::string metric_to_json(const metric_spec& m);

/// FNV-1a hash of the canonical serialization; stamps outputs for
/// reproducibility.
std::string config_hash(const std::string& canonical_text);

std::string path_to_json(const geodesic_path& p);
geodesic_path path_from_json(const std::string& json_text);

/// Deterministic CSV writers: fixed column order, shortest-roundtrip doubles
/// via %.17g, '\n' line endings, header first. Identical inputs produce
/// byte-identical bodies.
std::string census_to_csv(const census_table& t, const std::string& config_hash);
std::string census_to_json(const census_table& t, const std::string& config_hash);
std::string growth_to_csv(const growth_report& r, const std::string& config_hash);
std::string growth_to_json(const growth_report& r, const std::string& config_hash);
std::string identity_to_json(const identity_report& r, const std::string& config_hash);

/// Human-readable decomposition ledger, one line per term, e.g.
///   "1 = 1 + 1 - 1 + 0  PASS".
std::string identity_ledger_text(const identity_report& r);

/// Two-column plot data: (L, N) step-function samples of a census and
/// (m, index) ladders of a growth report.
std::string step_function_csv(const census_table& t);
std::string index_ladder_csv(const growth_report& r);

std::string path_samples_csv(const geodesic_path& p);

/// %.17g formatting helper shared by all writers.
std::string format_double(double v);

}  // namespace geodex

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geodex/index.hpp"

namespace geodex {

enum class completeness_tag { oracle_exact, search_based };

struct census_entry {
    geodesic_path path;
    double length = 0.0;
    int index = 0;
    int nullity = 0;
    index_report report;
};

struct census_table {
    Eigen::VectorXd p, q;
    std::vector<census_entry> entries;             ///< sorted by length
    std::vector<std::pair<double, int>> N_of_L;    ///< (jump length, count at L+)
    std::map<int, int> N_k;                        ///< index k -> count
    completeness_tag completeness = completeness_tag::search_based;
    bool pair_non_conjugate = false;               ///< all entry nullities zero
    std::vector<warning_kind> warnings;

    int count_below(double L) const;
};

/// Enumerates geodesics p -> q with length < L_max via the shooting solver,
/// computes each entry's Dirichlet index, and tags completeness oracle-exact
/// when a closed-form enumeration is available (flat charts with periods,
/// round-sphere equatorial pairs) and matches.
census_table build_census(const metric_spec& m, const Eigen::VectorXd& p,
                          const Eigen::VectorXd& q, double L_max, int grid_density = 1,
                          int steps = 1000, int segments = 0, bool with_hessian = true);

/// Closed-form census oracle where one exists (used for the oracle-exact
/// tag and by tests): flat charts enumerate lattice translates; round-sphere
/// equatorial pairs enumerate great-circle arcs.
struct census_oracle_entry {
    double length;
    int index;
};
std::optional<std::vector<census_oracle_entry>> closed_form_census(
    const metric_spec& m, const Eigen::VectorXd& p, const Eigen::VectorXd& q, double L_max);

struct covered_bound_report {
    bool applicable = false;       ///< every entry lies on a covering geodesic
    int covering_count = 0;        ///< m
    double L0 = 0.0;               ///< shortest covering length
    struct sample {
        double L;                  ///< jump point
        int lhs;                   ///< N(p,q,L) at L+
        double rhs;                ///< 2 m (1 + L/L0)
    };
    std::vector<sample> samples;
    outcome result = outcome::inconclusive;
};

/// Checks N(p,q,L) <= 2 m (1 + L/L0) at every census jump point, provided
/// every entry's support lies on one of the covering closed geodesics
/// (verified pointwise to 1e-6); otherwise not-applicable.
covered_bound_report covered_bound_check(const metric_spec& m, const census_table& table,
                                         const std::vector<geodesic_path>& covering);

struct subadditivity_report {
    struct split {
        double t0;
        int lambda_whole, lambda_first, lambda_second;
        outcome result;
    };
    int lambda_whole = 0;
    std::vector<split> splits;
    outcome result = outcome::pass;  ///< fail if any split violates
};

/// Verifies the arc inequality lambda(gamma) >= lambda(gamma1) +
/// lambda(gamma2) for each split parameter; ambiguous kernels mark the split
/// inconclusive rather than failed.
subadditivity_report subadditivity_check(const metric_spec& m, const geodesic_path& gamma,
                                         const std::vector<double>& split_points,
                                         int segments = 0);

struct growth_report {
    struct row {
        int m;
        int lambda_concat;     ///< lambda(gamma^m), Dirichlet
        int lambda_tilde;      ///< lambda~(c^m), periodic
        int concavity;         ///< con(c^m)
        bool ambiguous;
    };
    std::vector<row> rows;
    double fitted_slope = 0.0;      ///< a1: largest slope admitting zero offset
    double fitted_intercept = 0.0;  ///< a2 >= 0
    bool all_zero = false;
    std::vector<warning_kind> warnings;
};

/// Builds gamma^m (the p->q arc of c concatenated with m laps of c based at
/// q) and c^m for m <= m_max, computes the index ladders, and fits the gap
/// constants (a1, a2) with lambda~(c^m) - lambda~(c^m') >= a1 (m - m') - a2
/// over all pairs.
growth_report iterate_growth(const metric_spec& m, const geodesic_path& c,
                             const Eigen::VectorXd& p, const Eigen::VectorXd& q, int m_max);

struct betti_table {
    std::string space;  ///< "S2" or "S3"
    std::string field = "Q";
    int value(int k) const;
};

betti_table loop_space_betti(const std::string& space);

struct morse_inequality_report {
    struct row {
        int k;
        int betti;
        int N_k;
        bool holds;
    };
    std::vector<row> rows;
    bool asserted = false;  ///< only oracle-exact tables assert
    outcome result = outcome::inconclusive;
};

/// Checks beta_k(loop space) <= N_k(p,q) for k <= k_max. Requires the table
/// to realize every index up to k_max (else insufficient_data_error asking
/// for a larger L_max); search-based tables report without asserting.
morse_inequality_report morse_inequality_check(const census_table& table,
                                               const betti_table& betti, int k_max);

struct contradiction_demo_report {
    bool applicable = false;
    int covering_count = 0;  ///< h
    struct ladder {
        double length;
        double b1 = 0.0, b2 = 0.0;  ///< per-geodesic index-gap fit
    };
    std::vector<ladder> ladders;
    double uniform_bound = 0.0;  ///< K = h * max_i max(b_i2 / b_i1, 2)
    struct row {
        int k;
        int N_k;
        bool holds;
    };
    std::vector<row> rows;       ///< N_k <= K at every realized index
    outcome result = outcome::inconclusive;
    std::string narrative;       ///< human-readable account of the bound
};

/// Demonstrates the counting step that would contradict unbounded Betti
/// numbers: when all p->q geodesics lie on h closed geodesics, the index
/// ladders along each force N_k <= K uniformly in k. On the shipped round
/// sphere this exhibits the boundary case (N_k = 1, no contradiction).
contradiction_demo_report boundedness_contradiction_demo(
    const metric_spec& m, const std::vector<geodesic_path>& covering,
    const Eigen::VectorXd& p, const Eigen::VectorXd& q, int k_max);

}  // namespace geodex

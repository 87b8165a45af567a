#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "geodex/census.hpp"
#include "oracles.hpp"

using namespace geodex;
using fixtures::pt;

TEST_CASE("torus census reproduces the lattice enumeration exactly") {
    const census_table& t = fixtures::torus_census();
    const auto oracle = oracles::lattice_census(
        fixtures::torus().manifold.lattice, pt(0, 0), pt(0.3, 0.4), Eigen::VectorXd(), 2.0);
    REQUIRE(oracle.size() == 13);
    REQUIRE(t.entries.size() == 13);
    CHECK(t.completeness == completeness_tag::oracle_exact);
    CHECK(t.warnings.empty());
    CHECK(t.pair_non_conjugate);
    for (size_t i = 0; i < 13; ++i) {
        CHECK(t.entries[i].length == doctest::Approx(oracle[i].length).epsilon(1e-8));
        CHECK(t.entries[i].index == 0);
        CHECK(t.entries[i].nullity == 0);
    }
    CHECK(t.N_k.at(0) == 13);
    CHECK(t.N_k.size() == 1);
}

TEST_CASE("counting function is a right-continuous step function of the cap") {
    const census_table& t = fixtures::torus_census();
    CHECK(t.count_below(0.49) == 0);
    CHECK(t.count_below(0.51) == 1);
    CHECK(t.count_below(1.0) == 4);
    CHECK(t.count_below(2.0) == 13);
    REQUIRE_FALSE(t.N_of_L.empty());
    CHECK(t.N_of_L.front().first == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(t.N_of_L.front().second == 1);
    CHECK(t.N_of_L.back().second == 13);
    // Jumps are sorted with strictly increasing counts.
    for (size_t i = 1; i < t.N_of_L.size(); ++i) {
        CHECK(t.N_of_L[i].first > t.N_of_L[i - 1].first);
        CHECK(t.N_of_L[i].second > t.N_of_L[i - 1].second);
    }
}

TEST_CASE("a cap below the shortest geodesic yields an empty, still-exact census") {
    const census_table t = build_census(fixtures::torus(), pt(0, 0), pt(0.3, 0.4), 0.4);
    CHECK(t.entries.empty());
    CHECK(t.N_of_L.empty());
    CHECK(t.completeness == completeness_tag::oracle_exact);
    CHECK(t.count_below(0.4) == 0);
}

TEST_CASE("sphere census: arc ladder with indices zero through three") {
    const census_table& t = fixtures::sphere_census();
    const auto oracle = oracles::sphere_arcs(1.0, 1.0, 4.0 * M_PI);
    REQUIRE(t.entries.size() == oracle.size());
    REQUIRE(t.entries.size() == 4);
    CHECK(t.completeness == completeness_tag::oracle_exact);
    CHECK(t.pair_non_conjugate);
    for (size_t i = 0; i < 4; ++i) {
        CHECK(t.entries[i].length == doctest::Approx(oracle[i].length).epsilon(1e-6));
        CHECK(t.entries[i].index == oracle[i].index);
        CHECK(t.entries[i].nullity == 0);
        // Independent index methods agree entry by entry.
        const auto& methods = t.entries[i].report.method_agreement;
        REQUIRE(methods.count("fem"));
        REQUIRE(methods.count("conjugate"));
        REQUIRE(methods.count("hessian"));
        CHECK(methods.at("fem") == t.entries[i].index);
        CHECK(methods.at("conjugate") == t.entries[i].index);
        CHECK(methods.at("hessian") == t.entries[i].index);
    }
    for (int k = 0; k <= 3; ++k) CHECK(t.N_k.at(k) == 1);
}

TEST_CASE("closed-form enumerations: plane, torus, drifted torus, sphere") {
    // Plane: exactly the straight segment.
    const auto plane = closed_form_census(fixtures::plane(), pt(0, 0), pt(3, 4), 6.0);
    REQUIRE(plane.has_value());
    REQUIRE(plane->size() == 1);
    CHECK((*plane)[0].length == doctest::Approx(5.0).epsilon(1e-12));

    // Drifted torus: lengths |d| + beta . d.
    Eigen::VectorXd beta(2);
    beta << 0.3, 0.2;
    const auto drifted =
        closed_form_census(fixtures::randers_torus(), pt(0, 0), pt(0.3, 0.4), 1.3);
    REQUIRE(drifted.has_value());
    const auto oracle = oracles::lattice_census(
        fixtures::randers_torus().manifold.lattice, pt(0, 0), pt(0.3, 0.4), beta, 1.3);
    REQUIRE(drifted->size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i)
        CHECK((*drifted)[i].length == doctest::Approx(oracle[i].length).epsilon(1e-12));

    // Sphere: arcs of the single great circle through a non-antipodal pair.
    const auto arcs =
        closed_form_census(fixtures::sphere(), pt(M_PI / 2, 0), pt(M_PI / 2, 1.0), 8.0);
    REQUIRE(arcs.has_value());
    const auto arc_oracle = oracles::sphere_arcs(1.0, 1.0, 8.0);
    REQUIRE(arcs->size() == arc_oracle.size());
    for (size_t i = 0; i < arcs->size(); ++i) {
        CHECK((*arcs)[i].length == doctest::Approx(arc_oracle[i].length).epsilon(1e-9));
        CHECK((*arcs)[i].index == arc_oracle[i].index);
    }

    // No closed form on the ellipsoid.
    CHECK_FALSE(closed_form_census(make_ellipsoid_metric(1.0, 1.1, 1.3), pt(M_PI / 2, 0),
                                   pt(M_PI / 2, 1.0), 8.0)
                    .has_value());
}

TEST_CASE("covering-count bound holds on the sphere ladder") {
    const covered_bound_report rep = covered_bound_check(
        fixtures::sphere(), fixtures::sphere_census(), {fixtures::equator()});
    REQUIRE(rep.applicable);
    CHECK(rep.covering_count == 1);
    CHECK(rep.L0 == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    CHECK(rep.result == outcome::pass);
    REQUIRE_FALSE(rep.samples.empty());
    for (const auto& s : rep.samples) {
        CHECK(s.rhs == doctest::Approx(2.0 * (1.0 + s.L / (2.0 * M_PI))).epsilon(1e-9));
        CHECK(s.lhs <= s.rhs + 1e-12);
    }
}

TEST_CASE("covering-count bound is not applicable when entries leave the covering") {
    const geodesic_path line = integrate_ivp(fixtures::torus(), pt(0, 0), pt(1.0, 0.0));
    const covered_bound_report rep =
        covered_bound_check(fixtures::torus(), fixtures::torus_census(), {line});
    CHECK_FALSE(rep.applicable);
    CHECK(rep.result == outcome::inconclusive);
}

TEST_CASE("index is superadditive across splittings") {
    const geodesic_path arc = fixtures::equator_arc(2.5 * M_PI);
    const subadditivity_report rep =
        subadditivity_check(fixtures::sphere(), arc, {0.3, 0.5});
    CHECK(rep.lambda_whole == 2);
    REQUIRE(rep.splits.size() == 2);
    CHECK(rep.splits[0].lambda_first == 0);
    CHECK(rep.splits[0].lambda_second == 1);
    CHECK(rep.splits[0].result == outcome::pass);
    CHECK(rep.splits[1].lambda_first == 1);
    CHECK(rep.splits[1].lambda_second == 1);
    CHECK(rep.splits[1].result == outcome::pass);
    CHECK(rep.result == outcome::pass);

    const geodesic_path line = integrate_ivp(fixtures::torus(), pt(0.1, 0.2), pt(1.0, 0.0));
    const subadditivity_report flat =
        subadditivity_check(fixtures::torus(), line, {0.25, 0.6});
    CHECK(flat.lambda_whole == 0);
    CHECK(flat.result == outcome::pass);
}

TEST_CASE("iterate ladders on the sphere grow linearly with slope two") {
    const growth_report rep = iterate_growth(fixtures::sphere(), fixtures::equator(),
                                             pt(M_PI / 2, 0.0), pt(M_PI / 2, 1.0), 4);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& row : rep.rows) {
        CHECK(row.lambda_tilde == 2 * row.m - 1);
        CHECK(row.lambda_concat == 2 * row.m);
        CHECK(row.concavity == 0);
    }
    CHECK(rep.fitted_slope >= 2.0 - 1e-9);
    CHECK(rep.fitted_slope == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.fitted_intercept >= 0.0);
    CHECK(rep.fitted_intercept <= 1e-9);
    CHECK_FALSE(rep.all_zero);
    CHECK(rep.warnings.empty());
}

TEST_CASE("iterate ladders on the flat torus are identically zero") {
    const geodesic_path line = integrate_ivp(fixtures::torus(), pt(0.0, 0.0), pt(1.0, 0.0));
    const growth_report rep =
        iterate_growth(fixtures::torus(), line, pt(0.0, 0.0), pt(0.5, 0.0), 4);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& row : rep.rows) {
        CHECK(row.lambda_concat == 0);
        CHECK(row.lambda_tilde == 0);
        CHECK(row.concavity == 0);
        CHECK_FALSE(row.ambiguous);
    }
    CHECK(rep.all_zero);
    CHECK(rep.fitted_slope == 0.0);
    CHECK(rep.fitted_intercept == 0.0);
}

TEST_CASE("loop-space Betti tables") {
    const betti_table s2 = loop_space_betti("S2");
    for (int k = 0; k <= 10; ++k) CHECK(s2.value(k) == 1);
    const betti_table s3 = loop_space_betti("S3");
    for (int k = 0; k <= 10; ++k) CHECK(s3.value(k) == (k % 2 == 0 ? 1 : 0));
    CHECK(s2.field == "Q");
    CHECK_THROWS_AS((void)loop_space_betti("S4"), domain_error);
}

TEST_CASE("Betti numbers bound the realized counts on the sphere") {
    const morse_inequality_report rep =
        morse_inequality_check(fixtures::sphere_census(), loop_space_betti("S2"), 3);
    CHECK(rep.asserted);
    CHECK(rep.result == outcome::pass);
    REQUIRE(rep.rows.size() == 4);
    for (const auto& row : rep.rows) {
        CHECK(row.betti == 1);
        CHECK(row.N_k == 1);
        CHECK(row.holds);
    }
}

TEST_CASE("inequality checks beyond the realized range demand more data") {
    CHECK_THROWS_AS((void)morse_inequality_check(fixtures::sphere_census(),
                                                 loop_space_betti("S2"), 6),
                    insufficient_data_error);
}

TEST_CASE("search-based tables report the inequality without asserting it") {
    census_table t = fixtures::sphere_census();
    t.completeness = completeness_tag::search_based;
    const morse_inequality_report rep = morse_inequality_check(t, loop_space_betti("S2"), 3);
    CHECK_FALSE(rep.asserted);
    CHECK(rep.result == outcome::inconclusive);
}

TEST_CASE("uniform count bound from iterate ladders on the sphere") {
    const contradiction_demo_report rep = boundedness_contradiction_demo(
        fixtures::sphere(), {fixtures::equator()}, pt(M_PI / 2, 0.0), pt(M_PI / 2, 1.0), 2);
    REQUIRE(rep.applicable);
    CHECK(rep.covering_count == 1);
    REQUIRE(rep.ladders.size() == 1);
    CHECK(rep.ladders[0].b1 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.uniform_bound >= 1.0);
    REQUIRE(rep.rows.size() == 3);  // growing ladders: rows from k = 0
    for (const auto& row : rep.rows) {
        CHECK(row.N_k == 1);
        CHECK(row.N_k <= rep.uniform_bound);
        CHECK(row.holds);
    }
    CHECK(rep.result == outcome::pass);
    CHECK_FALSE(rep.narrative.empty());
}

TEST_CASE("uniform count bound on a flat chart: the bounded-ladder branch") {
    // Tall-rectangle torus: below the cap every connecting geodesic runs
    // along the short closed line through p, so one covering loop suffices.
    Eigen::MatrixXd lattice = Eigen::MatrixXd::Zero(2, 2);
    lattice(0, 0) = 0.5;
    lattice(1, 1) = 3.0;
    const metric_spec m = make_flat_metric(make_lattice_torus(lattice));
    const geodesic_path loop = integrate_ivp(m, pt(0.0, 0.0), pt(0.5, 0.0));
    REQUIRE(loop.is_closed);
    REQUIRE(loop.length == doctest::Approx(0.5).epsilon(1e-12));

    const contradiction_demo_report rep =
        boundedness_contradiction_demo(m, {loop}, pt(0.0, 0.0), pt(0.25, 0.0), 2);
    REQUIRE(rep.applicable);
    REQUIRE(rep.ladders.size() == 1);
    CHECK(rep.ladders[0].b1 == 0.0);  // flat: no index growth
    // Bounded ladders: positive index levels never occur, and the k = 0
    // count stays outside the ladder rows.
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        CHECK(row.k >= 1);
        CHECK(row.N_k == 0);
        CHECK(row.holds);
    }
    CHECK(rep.result == outcome::pass);
}

TEST_CASE("uniform count bound without any covering is inconclusive") {
    const contradiction_demo_report rep = boundedness_contradiction_demo(
        fixtures::sphere(), {}, pt(M_PI / 2, 0.0), pt(M_PI / 2, 1.0), 3);
    CHECK_FALSE(rep.applicable);
    CHECK(rep.result == outcome::inconclusive);
}

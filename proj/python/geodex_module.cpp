// Python bindings for the geodex core: metric evaluation, geodesic
// integration and search, Morse indices, the index decomposition, and the
// census. Thin wrappers only; all numerics live in the C++ library.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geodex/census.hpp"
#include "geodex/geodesic.hpp"
#include "geodex/index.hpp"
#include "geodex/io.hpp"
#include "geodex/jacobi.hpp"
#include "geodex/metric.hpp"

namespace py = pybind11;
using namespace geodex;

namespace {

std::string outcome_str(outcome o) { return outcome_name(o); }

py::dict identity_to_dict(const identity_report& r) {
    py::dict d;
    d["lambda_periodic"] = r.lambda_periodic;
    d["lambda_dirichlet"] = r.lambda_dirichlet;
    d["dim_J0"] = r.dim_J0;
    d["dim_J0_cap_Jp"] = r.dim_J0_cap_Jp;
    d["b_n_minus"] = r.b_n_minus;
    d["right_side"] = r.right_side;
    d["identity_holds"] = r.identity_holds;
    d["concavity"] = r.concavity;
    d["dim_ker_b"] = r.dim_ker_b;
    d["dim_Jp"] = r.dim_Jp;
    d["concavity_formula"] = r.concavity_formula;
    d["concavity_formula_holds"] = r.concavity_formula_holds;
    d["concavity_bounds_hold"] = r.concavity_bounds_hold;
    d["result"] = outcome_str(r.result);
    py::list warn;
    for (auto w : r.warnings) warn.append(std::string(warning_name(w)));
    d["warnings"] = warn;
    return d;
}

py::dict index_report_to_dict(const index_report& r) {
    py::dict d;
    d["lambda_dirichlet"] = r.lambda_dirichlet;
    d["nullity_dirichlet"] = r.nullity_dirichlet;
    if (r.lambda_periodic) d["lambda_periodic"] = *r.lambda_periodic;
    if (r.nullity_periodic) d["nullity_periodic"] = *r.nullity_periodic;
    if (r.concavity) d["concavity"] = *r.concavity;
    py::dict methods;
    for (const auto& [k, v] : r.method_agreement) methods[py::str(k)] = v;
    d["methods"] = methods;
    d["segments"] = r.segments_used;
    d["ambiguous"] = r.ambiguous;
    return d;
}

}  // namespace

PYBIND11_MODULE(_geodex, mod) {
    mod.doc() = "Finsler geodesics, Morse indices, and census experiments";

    py::register_exception<domain_error>(mod, "DomainError");
    py::register_exception<convexity_error>(mod, "ConvexityError");
    py::register_exception<chart_exit_error>(mod, "ChartExitError");
    py::register_exception<not_a_geodesic_error>(mod, "NotAGeodesicError");
    py::register_exception<step_size_error>(mod, "StepSizeError");
    py::register_exception<insufficient_data_error>(mod, "InsufficientDataError");

    py::class_<metric_spec>(mod, "Metric")
        .def_property_readonly("id", [](const metric_spec& m) { return m.id; })
        .def_property_readonly("dimension",
                               [](const metric_spec& m) { return m.manifold.dimension; })
        .def_property_readonly("kind",
                               [](const metric_spec& m) { return metric_kind_name(m.kind); })
        .def_property_readonly("reversible", [](const metric_spec& m) { return m.reversible; })
        .def("to_json", [](const metric_spec& m) { return metric_to_json(m); })
        .def("__repr__", [](const metric_spec& m) {
            return "<Metric " + metric_kind_name(m.kind) + " " + m.id + ">";
        });

    py::class_<geodesic_path>(mod, "Path")
        .def_property_readonly("length", [](const geodesic_path& p) { return p.length; })
        .def_property_readonly("energy", [](const geodesic_path& p) { return p.energy; })
        .def_property_readonly("is_closed",
                               [](const geodesic_path& p) { return p.is_closed; })
        .def_property_readonly("t", [](const geodesic_path& p) { return p.t; })
        .def_property_readonly("x", [](const geodesic_path& p) { return p.x; })
        .def_property_readonly("v", [](const geodesic_path& p) { return p.v; })
        .def("to_json", [](const geodesic_path& p) { return path_to_json(p); })
        .def("__repr__", [](const geodesic_path& p) {
            return "<Path length=" + format_double(p.length) +
                   (p.is_closed ? " closed>" : ">");
        });

    mod.def("load_metric", &metric_from_json, py::arg("json_text"),
            "Parse a metric from its JSON description.");
    mod.def("load_metric_file", &metric_from_json_file, py::arg("path"));
    mod.def(
        "sphere_metric",
        [](double radius, double pole_exclusion) {
            return make_round_sphere_metric(radius, pole_exclusion);
        },
        py::arg("radius") = 1.0, py::arg("pole_exclusion") = 0.05);
    mod.def(
        "ellipsoid_metric",
        [](double a1, double a2, double a3, double pole_exclusion) {
            return make_ellipsoid_metric(a1, a2, a3, pole_exclusion);
        },
        py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("pole_exclusion") = 0.05);

    mod.def(
        "F",
        [](const metric_spec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
            return eval_F(m, x, v);
        },
        py::arg("metric"), py::arg("x"), py::arg("v"), "Finsler norm F(x, v).");
    mod.def(
        "fundamental_tensor",
        [](const metric_spec& m, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
            return fundamental_tensor(m, x, v);
        },
        py::arg("metric"), py::arg("x"), py::arg("v"));

    mod.def(
        "integrate",
        [](const metric_spec& m, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
           int steps) { return integrate_ivp(m, x0, v0, steps); },
        py::arg("metric"), py::arg("x0"), py::arg("v0"), py::arg("steps") = 1000,
        "Integrate the geodesic with initial position and velocity over [0, 1].");

    mod.def(
        "connect",
        [](const metric_spec& m, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
           double max_length, int grid_density, int steps) {
            shooting_result r = solve_bvp(m, p, q, max_length, grid_density, steps);
            py::list warn;
            for (auto w : r.warnings) warn.append(std::string(warning_name(w)));
            return py::make_tuple(r.paths, r.residuals, warn);
        },
        py::arg("metric"), py::arg("p"), py::arg("q"), py::arg("max_length"),
        py::arg("grid_density") = 1, py::arg("steps") = 1000,
        "All geodesics from p to q shorter than max_length: (paths, residuals, warnings).");

    mod.def(
        "closed_through",
        [](const metric_spec& m, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
           double max_length, int steps) -> py::object {
            closed_search_result r = find_closed_through(m, p, q, max_length, steps);
            if (!r.found) return py::none();
            return py::cast(r.path);
        },
        py::arg("metric"), py::arg("p"), py::arg("q"), py::arg("max_length"),
        py::arg("steps") = 1000,
        "Closed geodesic through p and q below max_length, or None.");

    mod.def(
        "morse_index",
        [](const metric_spec& m, const geodesic_path& gamma, bool periodic, int segments) {
            jacobi_system sys = linearize(m, gamma);
            morse_index_result r = morse_index(
                sys, periodic ? boundary_condition::periodic : boundary_condition::dirichlet,
                segments);
            py::dict d;
            d["index"] = r.index;
            d["nullity"] = r.nullity;
            d["ambiguous"] = r.ambiguous;
            d["segments"] = r.segments;
            return d;
        },
        py::arg("metric"), py::arg("path"), py::arg("periodic") = false,
        py::arg("segments") = 0);

    mod.def(
        "index_report",
        [](const metric_spec& m, const geodesic_path& gamma, int segments, bool with_hessian) {
            return index_report_to_dict(
                compute_index_report(m, gamma, segments, with_hessian));
        },
        py::arg("metric"), py::arg("path"), py::arg("segments") = 0,
        py::arg("with_hessian") = true,
        "Dirichlet index by three methods; periodic index and concavity for closed paths.");

    mod.def(
        "verify_identity",
        [](const metric_spec& m, const geodesic_path& c, int segments) {
            return identity_to_dict(verify_index_decomposition(m, c, 0, segments));
        },
        py::arg("metric"), py::arg("path"), py::arg("segments") = 0,
        "Both sides of the periodic/Dirichlet index decomposition, independently.");

    mod.def(
        "census",
        [](const metric_spec& m, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
           double L_max, int grid_density, int steps, int segments, bool with_hessian) {
            census_table t =
                build_census(m, p, q, L_max, grid_density, steps, segments, with_hessian);
            py::dict d;
            py::list entries;
            for (const auto& e : t.entries) {
                py::dict ed;
                ed["length"] = e.length;
                ed["index"] = e.index;
                ed["nullity"] = e.nullity;
                entries.append(ed);
            }
            d["entries"] = entries;
            d["oracle_exact"] = t.completeness == completeness_tag::oracle_exact;
            d["pair_non_conjugate"] = t.pair_non_conjugate;
            py::list jumps;
            for (const auto& [L, N] : t.N_of_L) jumps.append(py::make_tuple(L, N));
            d["N_of_L"] = jumps;
            py::dict nk;
            for (const auto& [k, c] : t.N_k) nk[py::int_(k)] = c;
            d["N_k"] = nk;
            py::list warn;
            for (auto w : t.warnings) warn.append(std::string(warning_name(w)));
            d["warnings"] = warn;
            return d;
        },
        py::arg("metric"), py::arg("p"), py::arg("q"), py::arg("L_max"),
        py::arg("grid_density") = 1, py::arg("steps") = 1000, py::arg("segments") = 0,
        py::arg("with_hessian") = true,
        "Census of geodesics from p to q with length below L_max.");
}

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geodex {

/// Raised when a chart point lies outside the admissible domain
/// (e.g. inside a polar exclusion cap) or a configuration value is invalid.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the fundamental tensor fails to be positive definite at a
/// sampled (x, v); carries the offending sample.
struct convexity_error : std::runtime_error {
    std::vector<double> x, v;
    convexity_error(const std::string& what, std::vector<double> x_, std::vector<double> v_)
        : std::runtime_error(what), x(std::move(x_)), v(std::move(v_)) {}
};

/// Raised when an integrated trajectory leaves the chart domain; carries the
/// earliest parameter time at which the exit was detected.
struct chart_exit_error : std::runtime_error {
    double exit_time;
    chart_exit_error(const std::string& what, double t) : std::runtime_error(what), exit_time(t) {}
};

/// Raised when a concatenation junction is not velocity-aligned, or when an
/// operation requiring a verified geodesic receives a path that fails the
/// spray-residual check.
struct not_a_geodesic_error : std::runtime_error {
    explicit not_a_geodesic_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a finite-difference Hessian is too asymmetric to trust,
/// indicating an unsuitable step size.
struct step_size_error : std::runtime_error {
    explicit step_size_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an inequality experiment is asked for data the inputs cannot
/// provide (e.g. a Morse-inequality check beyond the realized index range).
struct insufficient_data_error : std::runtime_error {
    explicit insufficient_data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-fatal conditions attached to results rather than thrown.
enum class warning_kind {
    ambiguous_rank,     ///< singular value within factor 10 of the rank cutoff
    ambiguous_kernel,   ///< eigenvalue within factor 10 of the kernel cutoff
    incomplete_search,  ///< shooting search may have missed geodesics
    conjugate_tangency, ///< end-map determinant touches zero without sign change
    non_conjugate_fail, ///< endpoint pair appears conjugate (degenerate run)
    truncated_iterate   ///< iterate count reduced (chart exit during build)
};

std::string warning_name(warning_kind k);

/// Three-way outcome for every inequality / identity check: numerical
/// ambiguity must never masquerade as a counterexample.
enum class outcome { pass, fail, inconclusive };

std::string outcome_name(outcome o);

}  // namespace geodex

#pragma once

// Closed-form / quadrature oracles used to pin expected values in tests.
// These are written independently of the library internals: lattice sums,
// great-circle arithmetic, and composite-Simpson arc length only.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracles {

struct entry {
    double length;
    int index;
};

/// Geodesics on a flat torus R^n / lattice from p to q below L_max: one per
/// lattice translate k, straight with displacement q - p + lattice*k. For a
/// Randers metric with constant drift beta the length is |d| + beta . d.
/// All are minimizers in their homotopy class: index 0.
inline std::vector<entry> lattice_census(const Eigen::MatrixXd& lattice,
                                         const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                         const Eigen::VectorXd& beta, double L_max) {
    std::vector<entry> out;
    const int reach = 2 + static_cast<int>(std::ceil(L_max));
    const int kc = static_cast<int>(lattice.cols());
    std::vector<int> kk(kc, -reach);
    while (true) {
        Eigen::VectorXd d = q - p;
        for (int c = 0; c < kc; ++c) d += static_cast<double>(kk[c]) * lattice.col(c);
        const double len = d.norm() + (beta.size() ? beta.dot(d) : 0.0);
        if (d.norm() > 1e-12 && len < L_max) out.push_back({len, 0});
        int c = 0;
        while (c < kc && ++kk[c] > reach) kk[c++] = -reach;
        if (c == kc) break;
    }
    std::sort(out.begin(), out.end(),
              [](const entry& a, const entry& b) { return a.length < b.length; });
    return out;
}

/// Great-circle arcs on the round sphere of radius r between two points at
/// angular separation alpha (0 < alpha < pi): lengths r*(alpha + 2 pi k) and
/// r*((2 pi - alpha) + 2 pi k). The Morse index of an arc of length L is the
/// number of interior conjugate points, floor(L / (pi r)) for non-multiple
/// lengths.
inline std::vector<entry> sphere_arcs(double r, double alpha, double L_max) {
    std::vector<entry> out;
    for (int k = 0;; ++k) {
        const double a = r * (alpha + 2.0 * M_PI * k);
        const double b = r * ((2.0 * M_PI - alpha) + 2.0 * M_PI * k);
        if (a >= L_max && b >= L_max) break;
        if (a < L_max) out.push_back({a, static_cast<int>(std::floor(a / (M_PI * r)))});
        if (b < L_max) out.push_back({b, static_cast<int>(std::floor(b / (M_PI * r)))});
    }
    std::sort(out.begin(), out.end(),
              [](const entry& a, const entry& b) { return a.length < b.length; });
    return out;
}

/// Circumference of the ellipse x = a cos t, y = b sin t by composite
/// Simpson quadrature of the parametric speed (error << 1e-12 at this
/// resolution for moderate eccentricity).
inline double ellipse_circumference(double a, double b, int n = 200000) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        const double d = std::hypot(a * std::sin(t), b * std::cos(t));
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * d;
    }
    return s * (2.0 * M_PI / n) / 3.0;
}

}  // namespace oracles

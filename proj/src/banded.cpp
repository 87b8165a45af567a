#include "geodex/banded.hpp"

#include <algorithm>
#include <cmath>

namespace geodex {

Eigen::MatrixXd banded_symmetric::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int d = 0; d <= halfbw_ && i + d < n_; ++d) {
            m(i, i + d) = bands_(d, i);
            m(i + d, i) = bands_(d, i);
        }
    return m;
}

Eigen::VectorXd banded_symmetric::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        y[i] += bands_(0, i) * x[i];
        for (int d = 1; d <= halfbw_ && i + d < n_; ++d) {
            y[i] += bands_(d, i) * x[i + d];
            y[i + d] += bands_(d, i) * x[i];
        }
    }
    return y;
}

double banded_symmetric::spectral_radius(int max_iter, double rel_tol) const {
    if (n_ == 0) return 0.0;
    Eigen::VectorXd x(n_);
    for (int i = 0; i < n_; ++i) x[i] = (i % 2 == 0) ? 1.0 : 0.5;  // deterministic start
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd y = multiply(x);
        const double norm = y.norm();
        if (norm == 0.0) return 0.0;
        const double next = norm;  // |lambda| estimate (x is unit)
        y /= norm;
        const bool settled = it > 4 && std::abs(next - lambda) <= rel_tol * next;
        lambda = next;
        x = y;
        if (settled) break;
    }
    return lambda;
}

int banded_symmetric::count_below_once(double sigma, bool& breakdown) const {
    // Unpivoted banded LDL^T elimination of (A - sigma I); negative pivot
    // count equals the number of eigenvalues below sigma when no pivot
    // collapses (Sylvester's law of inertia).
    breakdown = false;
    const int p = halfbw_;
    Eigen::MatrixXd work = bands_;
    work.row(0).array() -= sigma;
    int negatives = 0;
    double magnitude_floor = 0.0;
    for (int i = 0; i < n_; ++i)
        magnitude_floor = std::max(magnitude_floor,
                                   std::abs(work(0, i)) + 2.0 * work.col(i).tail(p).cwiseAbs().sum());
    magnitude_floor = std::max(magnitude_floor, 1.0);

    for (int j = 0; j < n_; ++j) {
        const double pivot = work(0, j);
        if (std::abs(pivot) < 1e-14 * magnitude_floor) {
            breakdown = true;
            return 0;
        }
        if (pivot < 0.0) ++negatives;
        const int reach = std::min(p, n_ - 1 - j);
        for (int r = 1; r <= reach; ++r) {
            const double ljr = work(r, j) / pivot;  // L(j+r, j)
            for (int s = r; s <= reach; ++s) {
                // Update A(j+r, j+s) -= L(j+s,j) * pivot * L(j+r,j);
                // stored at diagonal (s - r), column (j + r).
                work(s - r, j + r) -= work(s, j) * ljr;
            }
        }
    }
    return negatives;
}

int banded_symmetric::count_below(double sigma) const {
    bool breakdown = false;
    int count = count_below_once(sigma, breakdown);
    double nudge = std::max(std::abs(sigma), 1e-12) * 1e-9;
    for (int attempt = 0; breakdown && attempt < 40; ++attempt) {
        count = count_below_once(sigma + nudge, breakdown);
        nudge *= 3.0;
    }
    return count;
}

inertia_counts banded_inertia(const banded_symmetric& a, double kernel_tol) {
    inertia_counts out;
    out.scale = a.spectral_radius();
    if (out.scale == 0.0) {  // zero matrix: everything is kernel
        out.zero = a.size();
        return out;
    }
    out.cut = kernel_tol * out.scale;
    const double eps_up = 1.0 + 1e-9;  // include eigenvalues equal to the cut
    const int below_minus = a.count_below(-out.cut);
    const int below_plus = a.count_below(out.cut * eps_up);
    out.negative = below_minus;
    out.zero = below_plus - below_minus;
    out.positive = a.size() - below_plus;
    // Anything with |eigenvalue| within factor 10 of the cut is ambiguous,
    // whichever side of the classification boundary it landed on.
    const int below_outer_minus = a.count_below(-10.0 * out.cut);
    const int below_inner_minus = a.count_below(-0.1 * out.cut);
    const int below_inner_plus = a.count_below(0.1 * out.cut);
    const int below_outer_plus = a.count_below(10.0 * out.cut);
    out.in_guard_band = (below_inner_minus - below_outer_minus) +
                        (below_outer_plus - below_inner_plus);
    if (out.in_guard_band < 0) out.in_guard_band = 0;
    return out;
}

}  // namespace geodex

#pragma once

#include <Eigen/Dense>

namespace geodex {

/// Symmetric banded matrix stored by diagonals: band(d, i) holds A(i, i+d)
/// for 0 <= d <= halfbw. Assembly ignores writes outside the band.
class banded_symmetric {
public:
    banded_symmetric(int n, int halfbw)
        : n_(n), halfbw_(halfbw), bands_(Eigen::MatrixXd::Zero(halfbw + 1, n)) {}

    int size() const { return n_; }
    int half_bandwidth() const { return halfbw_; }

    void add(int i, int j, double value) {
        if (i > j) std::swap(i, j);
        const int d = j - i;
        if (d <= halfbw_) bands_(d, i) += value;
    }

    double at(int i, int j) const {
        if (i > j) std::swap(i, j);
        const int d = j - i;
        return d <= halfbw_ ? bands_(d, i) : 0.0;
    }

    Eigen::MatrixXd dense() const;

    /// y = A x
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

    /// Largest |eigenvalue| by power iteration (deterministic start vector).
    double spectral_radius(int max_iter = 300, double rel_tol = 1e-8) const;

    /// Number of eigenvalues strictly below sigma, via the pivot signs of the
    /// unpivoted banded LDL^T factorization of A - sigma*I (Sylvester's law).
    /// A pivot that collapses numerically triggers a tiny shift retry so the
    /// count is taken at a nearby regular value.
    int count_below(double sigma) const;

private:
    int count_below_once(double sigma, bool& breakdown) const;

    int n_, halfbw_;
    Eigen::MatrixXd bands_;
};

/// Eigenvalue-count summary of a symmetric matrix around zero.
struct inertia_counts {
    int negative = 0;   ///< eigenvalues < -cut
    int zero = 0;       ///< eigenvalues in [-cut, +cut]
    int positive = 0;   ///< eigenvalues > +cut
    int in_guard_band = 0;  ///< |eigenvalue| in (cut/10, 10*cut): ambiguous
    double scale = 0.0;     ///< largest |eigenvalue| used for the cut
    double cut = 0.0;       ///< kernel_tol * scale
};

/// Counts eigenvalues of a banded symmetric matrix against the cutoff
/// kernel_tol * (largest |eigenvalue|), plus the factor-10 guard band.
inertia_counts banded_inertia(const banded_symmetric& a, double kernel_tol);

}  // namespace geodex

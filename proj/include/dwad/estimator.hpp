#pragma once
// Density-weighted average derivative estimation from pairwise kernel
// differences.  For a sample (Y_i, X_i) and bandwidth h, the pair statistic
//
//   U_ij = -h^{-(d+1)} grad K((X_i - X_j)/h) (Y_i - Y_j)      (symmetric in i,j)
//
// is averaged over all pairs to estimate theta = E[f(X) grad g(X)], twice the
// negative of E[Y grad f(X)].  Alongside the point estimate the fit carries
// the two ingredients of both variance estimators:
//
//   sigma = n^{-1} sum_i Lhat_i Lhat_i',  Lhat_i = 2 (row mean of U_i. - theta)
//   delta = h^{d+2} C(n,2)^{-1} sum_{i<j} U_ij U_ij'
//
// variance_al uses sigma alone (the classical asymptotically-linear form);
// variance_sb subtracts the pair-level term h^{-(d+2)} delta / C(n,2), which
// keeps the estimator valid when the bandwidth shrinks fast enough that the
// quadratic Hoeffding component is not negligible.

#include <Eigen/Core>

#include "dwad/kernel.hpp"

namespace dwad {

struct Sample {
    Eigen::VectorXd y;  // n outcomes
    Eigen::MatrixXd x;  // n-by-d covariates, one row per observation

    int n() const { return static_cast<int>(y.size()); }
    int dim() const { return static_cast<int>(x.cols()); }
    void validate() const;  // throws DataError on shape mismatch / non-finite values
};

struct DwadFit {
    int n = 0;
    int dim = 0;
    double h = 0.0;
    Eigen::VectorXd theta;        // d
    Eigen::MatrixXd u_row_means;  // n-by-d, row i = (n-1)^{-1} sum_{j != i} U_ij
    Eigen::MatrixXd sigma;        // d-by-d
    Eigen::MatrixXd delta;        // d-by-d
};

enum class VarianceKind { al, sb };

// Full fit: one parallel sweep over ordered pairs with block-deterministic
// reduction (results are bitwise identical for every thread count).
DwadFit estimate(const Sample& sample, const KernelSpec& kernel, double h);

// Naive textbook implementation: unordered pairs, plain accumulation, kernel
// gradients through KernelSpec::grad.  Kept as the testing oracle for the
// optimized sweep; O(n^2 d) with no parallelism.
DwadFit estimate_serial_reference(const Sample& sample, const KernelSpec& kernel, double h);

Eigen::MatrixXd variance_al(const DwadFit& fit);
Eigen::MatrixXd variance_sb(const DwadFit& fit);

// True if the sb variance matrix has no eigenvalue below -tol * trace scale.
bool sb_is_psd(const DwadFit& fit, double tol = 1e-12);

// T = (v' theta - theta0) / sqrt(v' V v); throws DegenerateVarianceError when
// the quadratic form is not strictly positive.
double t_statistic(const DwadFit& fit, const Eigen::VectorXd& v, double theta0,
                   VarianceKind kind);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

Interval confidence_interval(const DwadFit& fit, const Eigen::VectorXd& v, double alpha,
                             VarianceKind kind);

// Lean single-pass mean of v'U_ij over unordered pairs (no variance pieces);
// used by bias-extrapolation studies where only the point estimate matters.
double pair_mean_projected(const Sample& sample, const KernelSpec& kernel, double h,
                           const Eigen::VectorXd& v);

// Dense n-by-n matrix of v'U_ij with zero diagonal, for resampling
// diagnostics on moderate n.
Eigen::MatrixXd pair_matrix_projected(const Sample& sample, const KernelSpec& kernel, double h,
                                      const Eigen::VectorXd& v);

}  // namespace dwad

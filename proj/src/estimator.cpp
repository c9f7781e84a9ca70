#include "dwad/estimator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dwad/errors.hpp"
#include "dwad/normal.hpp"

namespace dwad {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143268;
constexpr int kBlockRows = 64;  // thread-count-independent work unit

// Compensated (Kahan) accumulation step.
inline void kadd(double& sum, double& carry, double value) {
    const double y = value - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
}

// ---------------------------------------------------------------------------
// d == 1 fast path: whole rows of U in vectorized arithmetic.
// ---------------------------------------------------------------------------
struct RowWorkspaceD1 {
    Eigen::ArrayXd u, u2, p, dp, urow;
    void ensure(int n) {
        if (u.size() != n) {
            u.resize(n);
            u2.resize(n);
            p.resize(n);
            dp.resize(n);
            urow.resize(n);
        }
    }
};

// Fills w.urow[j] = U_ij for all j (the i-th entry is set to zero), where
// U_ij = -h^{-2} k'((x_i-x_j)/h) (y_i-y_j) and k' = (2u p'(u^2) - u p(u^2)) phi(u).
void u_row_d1(const Sample& s, const Eigen::VectorXd& poly, double h, int i,
              RowWorkspaceD1& w) {
    const int n = s.n();
    w.ensure(n);
    const double scale = kInvSqrt2Pi / (h * h);
    const int m = static_cast<int>(poly.size());

    w.u = (s.x(i, 0) - s.x.col(0).array()) / h;
    w.u2 = w.u.square();
    w.p.setConstant(poly[m - 1]);
    w.dp.setConstant(m >= 2 ? (m - 1) * poly[m - 1] : 0.0);
    for (int j = m - 2; j >= 0; --j) {
        if (j >= 1) w.dp = w.dp * w.u2 + j * poly[j];
        w.p = w.p * w.u2 + poly[j];
    }
    w.urow = -(2.0 * w.u * w.dp - w.u * w.p) * (-0.5 * w.u2).exp() * scale *
             (s.y(i) - s.y.array());
    w.urow(i) = 0.0;
}

// Same, restricted to the tail j = i+1..n-1 (for unordered-pair sweeps).
// Returns the tail length; entries live in w.urow.head(len).
int u_tail_d1(const Sample& s, const Eigen::VectorXd& poly, double h, int i,
              RowWorkspaceD1& w) {
    const int n = s.n();
    const int len = n - i - 1;
    if (len <= 0) return 0;
    w.ensure(n);
    const double scale = kInvSqrt2Pi / (h * h);
    const int m = static_cast<int>(poly.size());

    w.u.head(len) = (s.x(i, 0) - s.x.col(0).segment(i + 1, len).array()) / h;
    w.u2.head(len) = w.u.head(len).square();
    w.p.head(len).setConstant(poly[m - 1]);
    w.dp.head(len).setConstant(m >= 2 ? (m - 1) * poly[m - 1] : 0.0);
    for (int j = m - 2; j >= 0; --j) {
        if (j >= 1) w.dp.head(len) = w.dp.head(len) * w.u2.head(len) + j * poly[j];
        w.p.head(len) = w.p.head(len) * w.u2.head(len) + poly[j];
    }
    w.urow.head(len) = -(2.0 * w.u.head(len) * w.dp.head(len) -
                         w.u.head(len) * w.p.head(len)) *
                       (-0.5 * w.u2.head(len)).exp() * scale *
                       (s.y(i) - s.y.segment(i + 1, len).array());
    return len;
}

// ---------------------------------------------------------------------------
// Generic-d path: one pair at a time through KernelSpec::grad_into.
// ---------------------------------------------------------------------------
void u_row_generic(const Sample& s, const KernelSpec& kernel, double h, int i,
                   Eigen::MatrixXd& urow, Eigen::VectorXd& u, Eigen::VectorXd& g) {
    const int n = s.n();
    const int d = s.dim();
    const double scale = -std::pow(h, -(d + 1));
    for (int j = 0; j < n; ++j) {
        if (j == i) {
            urow.row(j).setZero();
            continue;
        }
        u = (s.x.row(i) - s.x.row(j)).transpose() / h;
        kernel.grad_into(u, g);
        urow.row(j) = (scale * (s.y(i) - s.y(j))) * g.transpose();
    }
}

void check_inputs(const Sample& sample, const KernelSpec& kernel, double h) {
    sample.validate();
    if (!(h > 0.0) || !std::isfinite(h))
        throw ConfigError("estimate: bandwidth must be positive and finite");
    if (kernel.dim != sample.dim())
        throw ConfigError("estimate: kernel dimension does not match the sample");
}

double quad_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
    return v.dot(m * v);
}

}  // namespace

void Sample::validate() const {
    if (y.size() != x.rows()) throw DataError("sample: y length does not match x rows");
    if (n() < 2) throw DataError("sample: need at least two observations");
    if (dim() < 1) throw DataError("sample: need at least one covariate column");
    if (!y.allFinite() || !x.allFinite())
        throw DataError("sample: non-finite value in y or x");
}

DwadFit estimate(const Sample& sample, const KernelSpec& kernel, double h) {
    check_inputs(sample, kernel, h);
    const int n = sample.n();
    const int d = sample.dim();
    const int nblocks = (n + kBlockRows - 1) / kBlockRows;

    // Each block owns a fixed range of rows i and sweeps all ordered pairs
    // (i, j != i); by the symmetry U_ij = U_ji each row sum is completed
    // locally, so no accumulator is shared between blocks.  Blocks are then
    // merged in index order, making the result independent of the schedule.
    struct BlockPartial {
        Eigen::MatrixXd row_sums;            // rows-in-block x d
        Eigen::MatrixXd uu, uu_carry;        // d x d, ordered-pair sum of U U'
    };
    std::vector<BlockPartial> partials(static_cast<std::size_t>(nblocks));

#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < nblocks; ++b) {
        const int lo = b * kBlockRows;
        const int hi = std::min(n, lo + kBlockRows);
        BlockPartial& part = partials[static_cast<std::size_t>(b)];
        part.row_sums.setZero(hi - lo, d);
        part.uu.setZero(d, d);
        part.uu_carry.setZero(d, d);

        if (d == 1) {
            RowWorkspaceD1 w;
            for (int i = lo; i < hi; ++i) {
                u_row_d1(sample, kernel.poly, h, i, w);
                double rsum = 0.0, rcarry = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double uij = w.urow[j];
                    kadd(rsum, rcarry, uij);
                    kadd(part.uu(0, 0), part.uu_carry(0, 0), uij * uij);
                }
                part.row_sums(i - lo, 0) = rsum;
            }
        } else {
            Eigen::MatrixXd urow(n, d);
            Eigen::VectorXd u(d), g(d);
            Eigen::VectorXd rsum(d), rcarry(d);
            for (int i = lo; i < hi; ++i) {
                u_row_generic(sample, kernel, h, i, urow, u, g);
                rsum.setZero();
                rcarry.setZero();
                for (int j = 0; j < n; ++j) {
                    for (int c = 0; c < d; ++c) kadd(rsum[c], rcarry[c], urow(j, c));
                    for (int c1 = 0; c1 < d; ++c1)
                        for (int c2 = 0; c2 < d; ++c2)
                            kadd(part.uu(c1, c2), part.uu_carry(c1, c2),
                                 urow(j, c1) * urow(j, c2));
                }
                part.row_sums.row(i - lo) = rsum.transpose();
            }
        }
    }

    DwadFit fit;
    fit.n = n;
    fit.dim = d;
    fit.h = h;
    fit.u_row_means.resize(n, d);

    Eigen::VectorXd tsum = Eigen::VectorXd::Zero(d), tcarry = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd uu = Eigen::MatrixXd::Zero(d, d), uu_carry = Eigen::MatrixXd::Zero(d, d);
    for (int b = 0; b < nblocks; ++b) {
        const int lo = b * kBlockRows;
        const BlockPartial& part = partials[static_cast<std::size_t>(b)];
        const int rows = static_cast<int>(part.row_sums.rows());
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < d; ++c) {
                kadd(tsum[c], tcarry[c], part.row_sums(r, c));
                fit.u_row_means(lo + r, c) = part.row_sums(r, c) / (n - 1);
            }
        }
        for (int c1 = 0; c1 < d; ++c1)
            for (int c2 = 0; c2 < d; ++c2) kadd(uu(c1, c2), uu_carry(c1, c2), part.uu(c1, c2));
    }

    const double ordered_pairs = static_cast<double>(n) * (n - 1);
    fit.theta = tsum / ordered_pairs;
    // uu summed ordered pairs, i.e. each unordered pair twice:
    // h^{d+2} C(n,2)^{-1} sum_{i<j} = h^{d+2} / (n (n-1)) sum_{i != j}.
    fit.delta = std::pow(h, d + 2) / ordered_pairs * uu;

    fit.sigma.setZero(d, d);
    Eigen::MatrixXd scarry = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd li(d);
    for (int i = 0; i < n; ++i) {
        li = 2.0 * (fit.u_row_means.row(i).transpose() - fit.theta);
        for (int c1 = 0; c1 < d; ++c1)
            for (int c2 = 0; c2 < d; ++c2)
                kadd(fit.sigma(c1, c2), scarry(c1, c2), li[c1] * li[c2]);
    }
    fit.sigma /= n;
    return fit;
}

DwadFit estimate_serial_reference(const Sample& sample, const KernelSpec& kernel, double h) {
    check_inputs(sample, kernel, h);
    const int n = sample.n();
    const int d = sample.dim();

    Eigen::MatrixXd row_sums = Eigen::MatrixXd::Zero(n, d);
    Eigen::MatrixXd uu = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd u(d), uij(d);
    const double scale = -std::pow(h, -(d + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            u = (sample.x.row(i) - sample.x.row(j)).transpose() / h;
            uij = scale * (sample.y(i) - sample.y(j)) * kernel.grad(u);
            row_sums.row(i) += uij.transpose();
            row_sums.row(j) += uij.transpose();  // U_ji = U_ij
            uu += uij * uij.transpose();
        }
    }

    DwadFit fit;
    fit.n = n;
    fit.dim = d;
    fit.h = h;
    fit.u_row_means = row_sums / (n - 1);
    fit.theta = row_sums.colwise().sum().transpose() / (static_cast<double>(n) * (n - 1));
    const double pairs = 0.5 * n * (n - 1.0);
    fit.delta = std::pow(h, d + 2) / pairs * uu;
    fit.sigma.setZero(d, d);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd li = 2.0 * (fit.u_row_means.row(i).transpose() - fit.theta);
        fit.sigma += li * li.transpose();
    }
    fit.sigma /= n;
    return fit;
}

Eigen::MatrixXd variance_al(const DwadFit& fit) { return fit.sigma / fit.n; }

Eigen::MatrixXd variance_sb(const DwadFit& fit) {
    const double pairs = 0.5 * fit.n * (fit.n - 1.0);
    return fit.sigma / fit.n - std::pow(fit.h, -(fit.dim + 2)) / pairs * fit.delta;
}

bool sb_is_psd(const DwadFit& fit, double tol) {
    const Eigen::MatrixXd v = variance_sb(fit);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(v, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, std::abs(v.trace()));
    return solver.eigenvalues().minCoeff() >= -tol * scale;
}

double t_statistic(const DwadFit& fit, const Eigen::VectorXd& v, double theta0,
                   VarianceKind kind) {
    if (v.size() != fit.dim) throw ConfigError("t_statistic: direction dimension mismatch");
    const Eigen::MatrixXd var = kind == VarianceKind::al ? variance_al(fit) : variance_sb(fit);
    const double q = quad_form(var, v);
    if (!(q > 0.0)) throw DegenerateVarianceError(q);
    return (v.dot(fit.theta) - theta0) / std::sqrt(q);
}

Interval confidence_interval(const DwadFit& fit, const Eigen::VectorXd& v, double alpha,
                             VarianceKind kind) {
    if (v.size() != fit.dim)
        throw ConfigError("confidence_interval: direction dimension mismatch");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("confidence_interval: alpha must lie in (0, 1)");
    const Eigen::MatrixXd var = kind == VarianceKind::al ? variance_al(fit) : variance_sb(fit);
    const double q = quad_form(var, v);
    if (!(q > 0.0)) throw DegenerateVarianceError(q);
    const double half = normal_quantile(1.0 - 0.5 * alpha) * std::sqrt(q);
    const double center = v.dot(fit.theta);
    return {center - half, center + half};
}

double pair_mean_projected(const Sample& sample, const KernelSpec& kernel, double h,
                           const Eigen::VectorXd& v) {
    check_inputs(sample, kernel, h);
    if (v.size() != sample.dim())
        throw ConfigError("pair_mean_projected: direction dimension mismatch");
    const int n = sample.n();
    const int d = sample.dim();
    const int nblocks = (n + kBlockRows - 1) / kBlockRows;

    std::vector<double> bsum(static_cast<std::size_t>(nblocks), 0.0);

#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < nblocks; ++b) {
        const int lo = b * kBlockRows;
        const int hi = std::min(n, lo + kBlockRows);
        double sum = 0.0, carry = 0.0;
        if (d == 1) {
            RowWorkspaceD1 w;
            for (int i = lo; i < hi; ++i) {
                const int len = u_tail_d1(sample, kernel.poly, h, i, w);
                for (int j = 0; j < len; ++j) kadd(sum, carry, w.urow[j]);
            }
        } else {
            Eigen::VectorXd u(d), g(d);
            const double scale = -std::pow(h, -(d + 1));
            for (int i = lo; i < hi; ++i)
                for (int j = i + 1; j < n; ++j) {
                    u = (sample.x.row(i) - sample.x.row(j)).transpose() / h;
                    kernel.grad_into(u, g);
                    kadd(sum, carry, scale * (sample.y(i) - sample.y(j)) * v.dot(g));
                }
        }
        bsum[static_cast<std::size_t>(b)] = sum;
    }

    double total = 0.0, tcarry = 0.0;
    for (int b = 0; b < nblocks; ++b) kadd(total, tcarry, bsum[static_cast<std::size_t>(b)]);
    const double pairs = 0.5 * n * (n - 1.0);
    return d == 1 ? v[0] * total / pairs : total / pairs;
}

Eigen::MatrixXd pair_matrix_projected(const Sample& sample, const KernelSpec& kernel, double h,
                                      const Eigen::VectorXd& v) {
    check_inputs(sample, kernel, h);
    if (v.size() != sample.dim())
        throw ConfigError("pair_matrix_projected: direction dimension mismatch");
    const int n = sample.n();
    const int d = sample.dim();
    Eigen::MatrixXd m(n, n);
    if (d == 1) {
        RowWorkspaceD1 w;
        for (int i = 0; i < n; ++i) {
            u_row_d1(sample, kernel.poly, h, i, w);
            m.row(i) = v[0] * w.urow.matrix().transpose();
        }
    } else {
        Eigen::MatrixXd urow(n, d);
        Eigen::VectorXd u(d), g(d);
        for (int i = 0; i < n; ++i) {
            u_row_generic(sample, kernel, h, i, urow, u, g);
            m.row(i) = (urow * v).transpose();
        }
    }
    m.diagonal().setZero();
    return m;
}

}  // namespace dwad

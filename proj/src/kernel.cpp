#include "dwad/kernel.hpp"

#include <Eigen/LU>

#include <cmath>

#include "dwad/errors.hpp"
#include "dwad/quadrature.hpp"

namespace dwad {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143268;  // 1/sqrt(2*pi)

double double_factorial_odd(int k) {
    // (2k-1)!! = int u^{2k} phi(u) du
    double f = 1.0;
    for (int m = 3; m <= 2 * k - 1; m += 2) f *= m;
    return f;
}

// One-dimensional moment int u^k k_P(u) du by adaptive quadrature.
double moment_1d(const KernelSpec& kernel, int k) {
    return integrate_gauss(
        [&](const Eigen::VectorXd& x) {
            double m = 1.0;
            for (int i = 0; i < k; ++i) m *= x[0];
            // The Gaussian factor of k_P is carried by the quadrature weight.
            return m * kernel.eval1_polypart(x[0]);
        },
        1, 1e-12);
}

}  // namespace

double KernelSpec::eval1_polypart(double u) const {
    const double u2 = u * u;
    double p = 0.0;
    for (int j = static_cast<int>(poly.size()) - 1; j >= 0; --j) p = p * u2 + poly[j];
    return p * kInvSqrt2Pi;
}

double KernelSpec::deriv1_polypart(double u) const {
    // d/du [ p(u^2) phi(u) ] = ( p'(u^2) * 2u - u * p(u^2) ) phi(u)
    const double u2 = u * u;
    double p = 0.0, dp = 0.0;
    for (int j = static_cast<int>(poly.size()) - 1; j >= 0; --j) {
        if (j >= 1) dp = dp * u2 + j * poly[j];
        p = p * u2 + poly[j];
    }
    return (2.0 * u * dp - u * p) * kInvSqrt2Pi;
}

double KernelSpec::eval1(double u) const {
    return eval1_polypart(u) * std::exp(-0.5 * u * u);
}

double KernelSpec::deriv1(double u) const {
    return deriv1_polypart(u) * std::exp(-0.5 * u * u);
}

double KernelSpec::eval(const Eigen::VectorXd& u) const {
    if (u.size() != dim) throw ConfigError("KernelSpec::eval: dimension mismatch");
    double v = 1.0;
    for (int j = 0; j < dim; ++j) v *= eval1(u[j]);
    return v;
}

Eigen::VectorXd KernelSpec::grad(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(dim);
    grad_into(u, out);
    return out;
}

void KernelSpec::grad_into(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
    if (u.size() != dim) throw ConfigError("KernelSpec::grad: dimension mismatch");
    out.resize(dim);
    // d_j K = k'(u_j) * prod_{l != j} k(u_l); build prefix/suffix products to
    // avoid an O(d^2) inner loop.
    double prefix = 1.0;
    for (int j = 0; j < dim; ++j) {
        out[j] = prefix * deriv1(u[j]);
        prefix *= eval1(u[j]);
    }
    double suffix = 1.0;
    for (int j = dim - 1; j >= 0; --j) {
        out[j] *= suffix;
        suffix *= eval1(u[j]);
    }
}

KernelSpec make_higher_order_kernel(int dim, int order) {
    if (dim < 1) throw ConfigError("kernel: dim must be >= 1");
    if (order != 2 && order != 4 && order != 6 && order != 8)
        throw ConfigError("kernel: order must be one of {2, 4, 6, 8}");

    KernelSpec kernel;
    kernel.dim = dim;
    kernel.order = order;

    // Solve the moment conditions:  sum_m c_m (2(j+m)-1)!! = 1{j==0}.
    const int half = order / 2;
    Eigen::MatrixXd conditions(half, half);
    for (int j = 0; j < half; ++j)
        for (int m = 0; m < half; ++m) conditions(j, m) = double_factorial_odd(j + m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(half);
    rhs[0] = 1.0;
    kernel.poly = conditions.fullPivLu().solve(rhs);

    // One-dimensional building blocks for moments and roughness.
    std::vector<double> m1d(static_cast<std::size_t>(order) + 1, 0.0);
    for (int k = 0; k <= order; k += 2) m1d[static_cast<std::size_t>(k)] = moment_1d(kernel, k);

    kernel.moments_p.clear();
    for (const auto& a : MultiIndex::all_of_order(dim, order)) {
        double mu = 1.0;
        for (int j = 0; j < dim; ++j) mu *= m1d[static_cast<std::size_t>(a.a[static_cast<std::size_t>(j)])];
        kernel.moments_p.emplace_back(a, mu);
    }

    const double r0 = integrate_gauss(
        [&](const Eigen::VectorXd& x) {
            const double k = kernel.eval1(x[0]);
            return k * k * std::exp(0.5 * x[0] * x[0]);
        },
        1, 1e-12);
    const double r1 = integrate_gauss(
        [&](const Eigen::VectorXd& x) {
            return kernel.eval1(x[0]) * kernel.deriv1(x[0]) * std::exp(0.5 * x[0] * x[0]);
        },
        1, 1e-12);
    const double r2 = integrate_gauss(
        [&](const Eigen::VectorXd& x) {
            const double kd = kernel.deriv1(x[0]);
            return kd * kd * std::exp(0.5 * x[0] * x[0]);
        },
        1, 1e-12);

    kernel.roughness.setZero(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int l = 0; l < dim; ++l) {
            if (j == l)
                kernel.roughness(j, l) = r2 * std::pow(r0, dim - 1);
            else
                kernel.roughness(j, l) = r1 * r1 * std::pow(r0, dim - 2);
        }
    return kernel;
}

KernelSpec make_gaussian_kernel(int dim) { return make_higher_order_kernel(dim, 2); }

Eigen::MatrixXd roughness_matrix(const KernelSpec& kernel, double tol) {
    const int d = kernel.dim;
    if (d > 3)
        throw ConfigError("roughness_matrix: tensor-quadrature cross-check supported for dim <= 3");
    Eigen::VectorXd g(d);
    auto f = [&](const Eigen::VectorXd& u) {
        kernel.grad_into(u, g);
        // Undo the quadrature weight on each coordinate; both gradient factors
        // carry their own Gaussian, so the integrand still decays like
        // exp(-|u|^2/2) after the correction.
        double corr = 1.0;
        for (int j = 0; j < d; ++j) corr *= std::exp(0.5 * u[j] * u[j]);
        Eigen::VectorXd flat(d * d);
        for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) flat[j * d + l] = g[j] * g[l] * corr;
        return flat;
    };
    Eigen::VectorXd flat = integrate_gauss_vec(f, d, d * d, tol, 24, 192);
    Eigen::MatrixXd out(d, d);
    for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) out(j, l) = flat[j * d + l];
    // Symmetrize away quadrature round-off.
    return 0.5 * (out + out.transpose());
}

MomentReport verify_moments(const KernelSpec& kernel, double tol) {
    const int d = kernel.dim;
    if (d > 3) throw ConfigError("verify_moments: supported for dim <= 3");
    MomentReport report;
    report.all_pass = true;

    for (const auto& a : MultiIndex::all_up_to_order(d, kernel.order)) {
        MomentCheck check;
        check.index = a;
        check.value = integrate_gauss(
            [&](const Eigen::VectorXd& u) {
                double corr = 1.0;
                for (int j = 0; j < d; ++j) corr *= std::exp(0.5 * u[j] * u[j]);
                return a.monomial(u) * kernel.eval(u) * corr;
            },
            d, std::min(tol * 0.01, 1e-10), 24, d >= 3 ? 128 : 768);
        if (a.order() == 0)
            check.target = 1.0;
        else if (a.order() < kernel.order)
            check.target = 0.0;
        else {
            // Highest-order moments are compared against the stored
            // product-form values rather than required to vanish.
            for (const auto& [idx, mu] : kernel.moments_p)
                if (idx.a == a.a) check.target = mu;
        }
        check.error = std::abs(check.value - check.target);
        check.pass = check.error <= tol * std::max(1.0, std::abs(check.target));
        report.all_pass = report.all_pass && check.pass;
        report.checks.push_back(std::move(check));
    }

    // Tail mass of |K| outside the cube max_j |u_j| <= 8, by quadrature of
    // |K| times an indicator; the Gaussian factor makes this effectively the
    // tail of a chi-type integral and it should be far below tol.
    report.tail_mass_outside_8 = integrate_gauss(
        [&](const Eigen::VectorXd& u) {
            bool outside = false;
            for (int j = 0; j < d; ++j)
                if (std::abs(u[j]) > 8.0) outside = true;
            if (!outside) return 0.0;
            double corr = 1.0;
            for (int j = 0; j < d; ++j) corr *= std::exp(0.5 * u[j] * u[j]);
            return std::abs(kernel.eval(u)) * corr;
        },
        d, 1e-6, 48, d >= 3 ? 128 : 768);
    report.all_pass = report.all_pass && (report.tail_mass_outside_8 < tol);
    return report;
}

}  // namespace dwad

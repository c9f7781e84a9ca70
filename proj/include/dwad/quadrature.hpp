#pragma once
// Gauss-Hermite quadrature against the weight w(x) = exp(-x^2/2), with
// tensor-product rules in several dimensions and a refinement driver that
// doubles the one-dimensional node count until two successive levels agree.
//
// Rules are generated by the Golub-Welsch method: nodes are eigenvalues of
// the symmetric tridiagonal Jacobi matrix of the (probabilists') Hermite
// recurrence, weights come from the first eigenvector components scaled by
// the total mass sqrt(2*pi).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dwad/errors.hpp"

namespace dwad {

struct GaussHermiteRule {
    Eigen::VectorXd node;    // ascending
    Eigen::VectorXd weight;  // sums to sqrt(2*pi)
};

// Cached rule with n nodes (1 <= n <= 2048).  Thread safe.
const GaussHermiteRule& gauss_hermite(int n);

namespace detail {

// One tensor-product pass: sum_i f(x_i) * prod_j w_{i_j} over the full grid.
template <class F, class Acc>
void tensor_pass(const GaussHermiteRule& rule, int dim, F&& f, Acc&& accumulate) {
    const int n = static_cast<int>(rule.node.size());
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Eigen::VectorXd x(dim);
    for (;;) {
        double w = 1.0;
        for (int j = 0; j < dim; ++j) {
            x[j] = rule.node[idx[static_cast<std::size_t>(j)]];
            w *= rule.weight[idx[static_cast<std::size_t>(j)]];
        }
        accumulate(f(x), w);
        int j = 0;
        for (; j < dim; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < n) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        if (j == dim) break;
    }
}

}  // namespace detail

// Integral of f(x) * prod_j exp(-x_j^2/2) over R^dim where f returns an
// Eigen vector.  Node counts double from n0 until two successive levels agree
// componentwise within tol * max(1, |value|); throws NumericalError if the
// ladder is exhausted first.
template <class F>
Eigen::VectorXd integrate_gauss_vec(F&& f, int dim, int value_size, double tol = 1e-8,
                                    int n0 = 24, int nmax = 1536) {
    if (dim < 1) throw ConfigError("integrate_gauss_vec: dim must be >= 1");
    if (dim >= 3 && nmax > 256) nmax = 256;  // keep tensor grids tractable
    Eigen::VectorXd prev;
    for (int n = n0; n <= nmax; n *= 2) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(value_size);
        Eigen::VectorXd comp = Eigen::VectorXd::Zero(value_size);  // Kahan carry
        detail::tensor_pass(gauss_hermite(n), dim, f,
                            [&](const Eigen::VectorXd& v, double w) {
                                for (int k = 0; k < value_size; ++k) {
                                    const double y = v[k] * w - comp[k];
                                    const double t = acc[k] + y;
                                    comp[k] = (t - acc[k]) - y;
                                    acc[k] = t;
                                }
                            });
        if (prev.size() > 0) {
            bool ok = true;
            for (int k = 0; k < value_size; ++k) {
                const double scale = std::max(1.0, std::abs(acc[k]));
                if (std::abs(acc[k] - prev[k]) > tol * scale) { ok = false; break; }
            }
            if (ok) return acc;
        }
        prev = acc;
    }
    throw NumericalError("integrate_gauss_vec: refinement ladder exhausted without convergence");
}

// Scalar convenience wrapper.
template <class F>
double integrate_gauss(F&& f, int dim, double tol = 1e-8, int n0 = 24, int nmax = 1536) {
    auto vec_f = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd v(1);
        v[0] = f(x);
        return v;
    };
    return integrate_gauss_vec(vec_f, dim, 1, tol, n0, nmax)[0];
}

}  // namespace dwad

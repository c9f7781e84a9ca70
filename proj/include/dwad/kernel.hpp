#pragma once
// Product kernels of even order P built from a polynomial-times-Gaussian
// univariate factor:
//
//   k_P(u) = (sum_{m=0}^{P/2-1} c_m u^{2m}) * phi(u),   K(u) = prod_j k_P(u_j),
//
// where phi is the standard normal density.  The coefficients c_m solve the
// moment conditions  int u^{2j} k_P(u) du = 1{j==0}  for j = 0..P/2-1, so the
// kernel has unit mass, vanishing moments below order P, and finite moments
// mu_a = int u^a K(u) du at |a| = P.  P = 2 recovers the Gaussian kernel.

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "dwad/multi_index.hpp"

namespace dwad {

struct KernelSpec {
    int dim = 1;
    int order = 2;           // even, in {2, 4, 6, 8}
    Eigen::VectorXd poly;    // c_0..c_{P/2-1}

    // Kernel moments mu_a at |a| == order (zero entries included), and the
    // gradient roughness matrix R_jl = int (d_j K)(d_l K) du.  Both are filled
    // at construction from one-dimensional quadrature via the product
    // structure; verify_moments() recomputes moments independently.
    std::vector<std::pair<MultiIndex, double>> moments_p;
    Eigen::MatrixXd roughness;

    // Univariate factor and its derivative.
    double eval1(double u) const;
    double deriv1(double u) const;

    // Same with the Gaussian factor divided out: eval1(u) / phi(u) and
    // deriv1(u) / phi(u).  Quadrature against an exp(-u^2/2) weight uses these
    // to keep the exponential inside the rule's weight instead of the
    // integrand (avoids underflow at far-out nodes).
    double eval1_polypart(double u) const;
    double deriv1_polypart(double u) const;

    double eval(const Eigen::VectorXd& u) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& u) const;
    void grad_into(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;
};

KernelSpec make_gaussian_kernel(int dim);
KernelSpec make_higher_order_kernel(int dim, int order);

// Independent recomputation of the roughness matrix by full tensor-product
// quadrature (supported for dim <= 3; used to cross-check the product-form
// assembly stored in KernelSpec::roughness).
Eigen::MatrixXd roughness_matrix(const KernelSpec& kernel, double tol = 1e-8);

struct MomentCheck {
    MultiIndex index;
    double value = 0.0;   // recomputed by tensor quadrature
    double target = 0.0;  // 1 for |a|=0, 0 for 1 <= |a| < P, product form for |a| = P
    double error = 0.0;
    bool pass = false;
};

struct MomentReport {
    std::vector<MomentCheck> checks;
    double tail_mass_outside_8 = 0.0;  // int of |K| over max_j |u_j| > 8
    bool all_pass = false;
};

// Recomputes every moment of order 0..P by tensor-product quadrature and
// compares against the defining conditions (dim <= 3).
MomentReport verify_moments(const KernelSpec& kernel, double tol = 1e-8);

}  // namespace dwad

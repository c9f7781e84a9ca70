#pragma once
// Simulation data-generating processes with computable population truth.
//
// Presets draw X ~ standard Gaussian on R^d and Y = g(X) + noise with
// homoskedastic Gaussian noise, so every population functional of the
// average-derivative problem (the target theta, the influence-function
// variance Sigma, the pair-level variance constant Delta, the bias constant
// beta, and the third-moment constants kappa1/kappa2) is available through
// deterministic quadrature rather than simulation.
//
// Population truth (functionals, finite-bandwidth projections) is implemented
// for one-dimensional presets; sampling and estimation work for any d.

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "dwad/estimator.hpp"
#include "dwad/kernel.hpp"
#include "dwad/rng.hpp"

namespace dwad {

enum class RegressionKind { linear, cubic_damped };

struct DgpSpec {
    int dim = 1;
    RegressionKind regression = RegressionKind::linear;
    double noise_sd = 1.0;

    // Regression function acts on the first coordinate; the remaining
    // coordinates enter only through the covariate density.
    double g1(double x) const;       // univariate regression
    double g1_deriv(double x) const;
    double g(const Eigen::VectorXd& x) const;
    Eigen::VectorXd g_grad(const Eigen::VectorXd& x) const;

    void validate() const;
};

// name in {"linear", "cubic_damped"}.
DgpSpec make_dgp(const std::string& name, int dim = 1, double noise_sd = 1.0);

// n i.i.d. draws from the preset; bitwise deterministic given the stream.
Sample sample_dgp(const DgpSpec& dgp, int n, RandomStream& stream);

struct PopulationFunctionals {
    int dim = 1;
    Eigen::VectorXd v;        // direction the scalar constants refer to
    Eigen::VectorXd theta;    // E[f(X) grad g(X)]
    Eigen::MatrixXd sigma_mat;  // V[psi(Z)]
    Eigen::MatrixXd delta_mat;  // 2 E[V(Y|X) f(X)] * kernel roughness
    double theta_v = 0.0;
    double sigma_v2 = 0.0;    // v' Sigma v
    double delta_v2 = 0.0;    // v' Delta v
    double beta_v = 0.0;      // bias slope: E[theta_hat_v] - theta_v ~ beta_v h^P
    double kappa1_v = 0.0;    // E[psi_v^3]
    double kappa2_v = 0.0;    // pair-interaction third-moment constant
    double kappa2_extrapolation_diag = 0.0;  // rel. gap of last two extrapolants

    // Leading-term variance of the standardized statistic:
    // sigma_v^2/n + C(n,2)^{-1} h^{-(d+2)} delta_v^2.
    double omega_v2(double n, double h) const;
};

// Deterministic quadrature truth; throws ConfigError for dim > 1 presets and
// NumericalError if the kappa2 extrapolation is unstable (> 1% relative gap).
PopulationFunctionals population_functionals(const DgpSpec& dgp, const KernelSpec& kernel,
                                             const Eigen::VectorXd& v);

struct ChecklistItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string note;
};

// Numeric spot checks of the regularity conditions the estimator's theory
// needs: smooth bounded density, bounded e = f*g and derivatives, strictly
// positive noise-weighted density mass, Gaussian tail decay, and a recorded
// justification for the smoothness/continuity condition on the influence
// function's law.  Informational: failed items are returned, not thrown.
std::vector<ChecklistItem> assumption_checklist(const DgpSpec& dgp);

// ---------------------------------------------------------------------------
// Finite-bandwidth population objects (dim == 1).
// ---------------------------------------------------------------------------
// Conditional projection of the pair statistic at bandwidth h:
//   m_h(y, x) = E[v'U_12 | Z_1 = (y, x)] = a0(x) + y * by(x),
// tabulated once on a fine grid from one-dimensional quadrature, with the
// population mean E[v'U_12] and the projection variance
// sigma_ell_h^2 = Var[2 (m_h(Z) - E[v'U])] attached.
class FiniteBandwidthProjection {
  public:
    FiniteBandwidthProjection(const DgpSpec& dgp, const KernelSpec& kernel,
                              const Eigen::VectorXd& v, double h);

    double mean() const { return mean_; }                  // E[v'U_12]
    double conditional_mean(double y, double x) const;     // m_h(y, x)
    double ell(double y, double x) const;                  // 2 (m_h - mean)
    double a0(double x) const;
    double by(double x) const;
    double sigma_ell2() const { return sigma_ell2_; }
    double h() const { return h_; }

  private:
    double interp(const std::vector<double>& table, double x) const;

    double h_ = 0.0;
    double mean_ = 0.0;
    double sigma_ell2_ = 0.0;
    double xmax_ = 10.0;
    double dx_ = 0.0;
    std::vector<double> a0_, by_;
};

// E[(v'U_12)^2] at bandwidth h (two-dimensional quadrature).
double pair_second_moment(const DgpSpec& dgp, const KernelSpec& kernel,
                          const Eigen::VectorXd& v, double h);

// E[ell_h(Z_1) ell_h(Z_2) v'U_12] at bandwidth h: the finite-h pair
// interaction moment whose h -> 0 Richardson extrapolation feeds kappa2.
double pair_interaction_moment(const DgpSpec& dgp, const KernelSpec& kernel,
                               const Eigen::VectorXd& v, double h);

}  // namespace dwad

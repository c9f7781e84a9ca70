#pragma once
// Second-order (Edgeworth-type) distributional approximations.
//
// Three specialized evaluators approximate the CDF of the standardized and
// the two studentized average-derivative statistics; each is the normal CDF
// minus a normal-density-weighted polynomial whose coefficients collect the
// smoothing bias, the variance mismatch of the standardizer, and the
// third-moment (skewness) contributions.
//
// A generic evaluator covers arbitrary second-order U-statistics through
// nine coefficients gamma_1..gamma_9 multiplying Hermite polynomials, with a
// Fourier-inversion oracle of the underlying characteristic function kept
// alongside as an independent cross-check.

#include <array>
#include <vector>

namespace dwad {

struct DwadExpansionInputs {
    int n = 0;        // sample size
    double h = 0.0;   // bandwidth
    int d = 1;        // covariate dimension
    int p = 2;        // kernel order
    double sigma = 0.0;            // sd of the influence function in direction v
    double delta2 = 0.0;           // pair-level variance constant v' Delta v
    double beta = 0.0;             // bias constant in direction v
    double kappa1 = 0.0;           // E[psi_v^3]
    double kappa2 = 0.0;           // pair-interaction third-moment constant
    double vartheta_ratio = 1.0;   // omega_v^2 / vartheta_v^2 of the standardizer
    void validate() const;
};

// CDF approximation for (theta_hat_v - theta_v) / vartheta_v.
double std_expansion(const DwadExpansionInputs& in, double x);

// CDF approximations for the statistic studentized by each variance
// estimator; they differ only in the term linear in x, which the
// small-bandwidth-robust form removes.
double studentized_al(const DwadExpansionInputs& in, double x);
double studentized_sb(const DwadExpansionInputs& in, double x);

// ---------------------------------------------------------------------------
// Generic second-order U-statistic expansion.
// ---------------------------------------------------------------------------
struct GenericUstatInputs {
    double n = 0.0;          // sample size
    double bias = 0.0;       // B, mean shift of the statistic
    double vartheta = 0.0;   // standardizer scale > 0
    double sigma_ell2 = 0.0; // E[ell_1^2]
    double sigma_q2 = 0.0;   // E[q_12^2]
    double kappa_a = 0.0;    // E[ell_1^3]
    double kappa_b = 0.0;    // E[ell_1 ell_2 q_12]

    // Exact variance of the linear-plus-quadratic projection terms; an
    // invariant of the type (always recomputed, never stored).
    double omega2() const;
    void validate() const;
};

struct GammaCoefficients {
    std::array<double, 9> gamma{};  // gamma[6] (i.e. gamma_7) is identically 0
};

GammaCoefficients generic_gammas(const GenericUstatInputs& in);

// Closed form: Phi(x) - phi(x) * sum_j gamma_j He_{j-1}(x).
double generic_cdf(const GammaCoefficients& g, double x);

// The characteristic function may carry gamma_1 either inside the bracket
//   chi(t) = exp(-t^2/2) * [1 + sum_j gamma_j (it)^j]          (bracket)
// or in the exponent
//   chi(t) = exp(-t^2/2 + gamma_1 it) * [1 + sum_{j>=2} ...]   (exponent);
// the two agree to O(gamma_1^2).  The closed form above matches `bracket`.
enum class ChiConvention { bracket, exponent };

// Numerical (Gil-Pelaez) inversion of chi on a fixed trapezoidal grid over
// t in [-40, 40] with 2^14 points, folded to t > 0 by symmetry.
double generic_cdf_fourier(const GammaCoefficients& g, double x,
                           ChiConvention convention = ChiConvention::bracket);

// Same oracle on a uniform x-grid x_k = x0 + k*dx, evaluated with a rotating
// phase recurrence so large grids stay cheap.
std::vector<double> generic_cdf_fourier_grid(const GammaCoefficients& g, double x0, double dx,
                                             int count,
                                             ChiConvention convention = ChiConvention::bracket);

// ---------------------------------------------------------------------------
// Coverage predictions and the expansion remainder scale.
// ---------------------------------------------------------------------------
enum class CoverageScheme { standardized, studentized_al, studentized_sb };

// Predicted coverage of the nominal 1-alpha two-sided interval to second
// order: the standardized interval is off by the standardizer mismatch, the
// classical studentized interval overcovers by the pair-level variance term,
// and the robust studentized interval is correct at this order.
double coverage_prediction(const DwadExpansionInputs& in, double alpha, CoverageScheme scheme);

// Remainder scale r_n = sqrt(n) h^P + 1/(n h^{d+2}) + 1/sqrt(n).
double rn(double n, double h, int p, int d);

}  // namespace dwad

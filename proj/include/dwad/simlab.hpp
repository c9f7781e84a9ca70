#pragma once
// Monte Carlo laboratory for the pair-difference derivative estimator:
// replicated experiments that compare the finite-sample law of standardized
// and studentized statistics against the normal limit and the second-order
// expansion, coverage accounting for both variance estimators, and a
// bootstrap diagnostic for the variance of the degenerate (quadratic)
// component of the statistic.
//
// Determinism contract: every replication draws from its own counter-based
// stream keyed (seed, replication, role), per-replication results are written
// into preallocated slots, and all cross-replication reductions run
// sequentially in replication order.  Output is byte-identical for any
// OpenMP thread count.

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dwad/dgp.hpp"
#include "dwad/expansion.hpp"
#include "dwad/kernel.hpp"

namespace dwad {

enum class Scheme { standardized_sigma, standardized_omega, studentized_al, studentized_sb };

std::string scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

struct ExperimentConfig {
    std::string dgp_name = "linear";
    int dim = 1;
    double noise_sd = 1.0;
    int kernel_order = 2;
    int n = 500;
    // Bandwidth: explicit h wins when positive, otherwise h = h_c * n^{-h_gamma}.
    double h_explicit = 0.0;
    double h_c = 1.0;
    double h_gamma = 0.3;
    int replications = 1000;
    std::uint64_t seed = 0;
    std::vector<double> alphas = {0.05};
    Eigen::VectorXd direction;  // empty -> first coordinate axis

    double bandwidth() const;
    double rate_nh2p() const;  // n h^{2P}: squared-bias vs variance balance
    double rate_nhd2() const;  // n h^{d+2}: degenerate-term sample-size scale
    void validate() const;
    DgpSpec dgp() const;
    KernelSpec kernel() const;
    Eigen::VectorXd resolved_direction() const;
};

struct CoverageRow {
    double alpha = 0.0;
    double critical = 0.0;    // z_{1 - alpha/2}
    double empirical = 0.0;   // fraction of used replications with |T| <= critical
    double predicted = 0.0;   // second-order coverage prediction
    double se_binomial = 0.0; // sqrt((1-alpha) alpha / R_used)
};

struct SchemeResult {
    Scheme scheme = Scheme::standardized_sigma;
    int replications_total = 0;
    int replications_used = 0;
    int degenerate_count = 0;  // studentized-SB replications with v'V_hat v <= 0
    bool unreliable = false;   // degenerate share above 1%
    std::vector<double> statistics;  // used replications, ascending
    double ks_to_phi = 0.0;
    double ks_to_expansion = 0.0;
    std::vector<CoverageRow> coverage;
};

struct CdfGrid {
    std::vector<double> x;                          // [-4, 4] in steps of 0.05
    std::vector<double> normal;                     // Phi(x)
    std::vector<std::vector<double>> empirical;     // per scheme
    std::vector<std::vector<double>> expansion;     // per scheme
};

struct ExperimentResult {
    ExperimentConfig config;
    double h = 0.0;
    PopulationFunctionals truth;
    std::vector<SchemeResult> schemes;
    CdfGrid grid;
};

// Expansion inputs for the experiment's scheme family; vartheta_ratio is the
// only scheme-dependent field and is filled per scheme.
DwadExpansionInputs expansion_inputs(const ExperimentConfig& config,
                                     const PopulationFunctionals& truth);

// Statistics standardized by a deterministic scale: vartheta = sigma_v/sqrt(n)
// (standardized_sigma) or vartheta = omega_tilde_v (standardized_omega).  The
// two statistics differ replication-by-replication by the constant factor
// omega_tilde_v / (sigma_v/sqrt(n)).
SchemeResult run_standardized(const ExperimentConfig& config, const PopulationFunctionals& truth,
                              Scheme scheme);

// Studentized statistics sharing one estimator pass per replication: the
// first element of the pair uses the asymptotically-linear variance estimate,
// the second the small-bandwidth-robust one.  Replications whose robust variance
// estimate is non-positive are excluded from the second result and counted.
std::pair<SchemeResult, SchemeResult> run_studentized(const ExperimentConfig& config,
                                                      const PopulationFunctionals& truth);

// Runs the requested schemes (deduplicated; the two studentized schemes share
// one pass) and assembles the CDF comparison grid.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<Scheme>& schemes);

// Fraction of sorted values <= x.
double empirical_cdf(const std::vector<double>& sorted_values, double x);

// Kolmogorov-Smirnov distance between the empirical law of sorted values and
// a reference CDF, evaluated exactly at the order statistics.
template <class Cdf>
double ks_distance(const std::vector<double>& sorted_values, Cdf&& cdf) {
    const std::size_t r = sorted_values.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        const double f = cdf(sorted_values[i]);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(r);
        const double lo = static_cast<double>(i) / static_cast<double>(r);
        worst = std::max(worst, std::max(f - lo, hi - f));
    }
    return worst;
}

struct ComparisonRow {
    Scheme scheme = Scheme::standardized_sigma;
    int n = 0;
    double h = 0.0;
    double ks_to_phi = 0.0;
    double ks_to_expansion = 0.0;
    double coverage_emp = 0.0;   // at the first configured alpha
    double coverage_pred = 0.0;
    double r_n = 0.0;            // expansion remainder scale
};

// Grid study over sample sizes and bandwidth exponents (h = n^{-gamma});
// the conventional grid is n in {500, 1000, 2000} and
// gamma in {0.25, 0.30, 0.40, 0.50}.
std::vector<ComparisonRow> edgeworth_comparison_table(const ExperimentConfig& base,
                                                      const std::vector<int>& n_list,
                                                      const std::vector<double>& gamma_list,
                                                      const std::vector<Scheme>& schemes);

// ---------------------------------------------------------------------------
// Bootstrap diagnostic for the degenerate component.
// ---------------------------------------------------------------------------
// For each outer replication, the pair statistic's degenerate component mean
//   Qbar = theta_hat - E[U] - n^{-1} sum_i ell(Z_i)
// is recomputed on multinomial bootstrap resamples in three ways that differ
// only in where the projections come from:
//   * population:  true ell and E[U] at the experiment's bandwidth
//       (variance inflates threefold relative to V[Qbar]);
//   * plug-in:     original-sample L_hat and theta_hat (no inflation);
//   * recomputed:  projections re-estimated from each resample
//       (identically zero by double centering).
// Also tracks the naive bootstrap analog of the influence-variance estimate,
// whose excess over sigma_ell^2 doubles.
struct BootstrapDiagnostic {
    int n = 0;
    double h = 0.0;
    int outer_replications = 0;
    int draws = 0;

    double var_qbar_target = 0.0;      // sigma_q^2(h) / C(n,2) by quadrature
    double var_qbar_pop = 0.0;         // mean within-replication bootstrap variance
    double ratio_pop = 0.0;            // var_qbar_pop / var_qbar_target
    double ratio_emp = 0.0;            // plug-in variant
    double max_abs_recomputed = 0.0;   // largest |Qbar*| under recomputed projections
    double sigma_star_factor = 0.0;    // excess of E[Sigma*] over sigma_ell2, vs Sigma_hat's
    double rel_se_ratio = 0.0;         // Monte Carlo relative SE of ratio_pop
    bool high_uncertainty = false;     // rel_se_ratio > 20%
};

BootstrapDiagnostic bootstrap_diagnostic(const ExperimentConfig& config, int draws);

}  // namespace dwad

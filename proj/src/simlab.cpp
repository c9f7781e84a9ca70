#include "dwad/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "dwad/errors.hpp"
#include "dwad/estimator.hpp"
#include "dwad/normal.hpp"
#include "dwad/rng.hpp"

namespace dwad {

namespace {

constexpr double kGridLo = -4.0;
constexpr double kGridStep = 0.05;
constexpr int kGridCount = 161;  // [-4, 4]

double scheme_cdf(const DwadExpansionInputs& in, Scheme scheme, double x) {
    switch (scheme) {
        case Scheme::standardized_sigma:
        case Scheme::standardized_omega: return std_expansion(in, x);
        case Scheme::studentized_al: return studentized_al(in, x);
        case Scheme::studentized_sb: return studentized_sb(in, x);
    }
    throw ConfigError("scheme_cdf: unknown scheme");
}

CoverageScheme coverage_scheme(Scheme scheme) {
    switch (scheme) {
        case Scheme::standardized_sigma:
        case Scheme::standardized_omega: return CoverageScheme::standardized;
        case Scheme::studentized_al: return CoverageScheme::studentized_al;
        case Scheme::studentized_sb: return CoverageScheme::studentized_sb;
    }
    throw ConfigError("coverage_scheme: unknown scheme");
}

// Shared post-processing: sort the used statistics, compute both KS distances
// and the coverage table.  `inputs` must already carry the scheme's
// vartheta_ratio.
SchemeResult finish_scheme(Scheme scheme, const ExperimentConfig& config,
                           const DwadExpansionInputs& inputs, std::vector<double> statistics,
                           int degenerate) {
    SchemeResult out;
    out.scheme = scheme;
    out.replications_total = config.replications;
    out.degenerate_count = degenerate;
    out.unreliable = degenerate > config.replications / 100;
    std::sort(statistics.begin(), statistics.end());
    out.replications_used = static_cast<int>(statistics.size());
    out.ks_to_phi = ks_distance(statistics, [](double x) { return normal_cdf(x); });
    out.ks_to_expansion =
        ks_distance(statistics, [&](double x) { return scheme_cdf(inputs, scheme, x); });
    for (double alpha : config.alphas) {
        CoverageRow row;
        row.alpha = alpha;
        row.critical = normal_quantile(1.0 - alpha / 2.0);
        long covered = 0;
        for (double t : statistics)
            if (std::abs(t) <= row.critical) ++covered;
        const double used = std::max<std::size_t>(statistics.size(), 1);
        row.empirical = static_cast<double>(covered) / used;
        row.predicted = coverage_prediction(inputs, alpha, coverage_scheme(scheme));
        row.se_binomial = std::sqrt(alpha * (1.0 - alpha) / used);
        out.coverage.push_back(row);
    }
    out.statistics = std::move(statistics);
    return out;
}

}  // namespace

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::standardized_sigma: return "standardized_sigma";
        case Scheme::standardized_omega: return "standardized_omega";
        case Scheme::studentized_al: return "studentized_al";
        case Scheme::studentized_sb: return "studentized_sb";
    }
    throw ConfigError("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "standardized_sigma") return Scheme::standardized_sigma;
    if (name == "standardized_omega") return Scheme::standardized_omega;
    if (name == "studentized_al") return Scheme::studentized_al;
    if (name == "studentized_sb") return Scheme::studentized_sb;
    throw ConfigError("unknown scheme '" + name + "'");
}

double ExperimentConfig::bandwidth() const {
    if (h_explicit > 0.0) return h_explicit;
    return h_c * std::pow(static_cast<double>(n), -h_gamma);
}

double ExperimentConfig::rate_nh2p() const {
    return n * std::pow(bandwidth(), 2.0 * kernel_order);
}

double ExperimentConfig::rate_nhd2() const { return n * std::pow(bandwidth(), dim + 2); }

void ExperimentConfig::validate() const {
    if (dim < 1) throw ConfigError("experiment: dim must be >= 1");
    if (n < 3) throw ConfigError("experiment: n must be >= 3");
    if (replications < 1) throw ConfigError("experiment: replications must be >= 1");
    if (!(bandwidth() > 0.0) || !std::isfinite(bandwidth()))
        throw ConfigError("experiment: bandwidth must be positive and finite");
    if (h_explicit <= 0.0 && !(h_c > 0.0))
        throw ConfigError("experiment: bandwidth constant must be positive");
    if (alphas.empty()) throw ConfigError("experiment: at least one alpha level required");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("experiment: alpha levels must be in (0,1)");
    if (direction.size() != 0 && direction.size() != dim)
        throw ConfigError("experiment: direction has wrong dimension");
    if (direction.size() == dim && direction.norm() == 0.0)
        throw ConfigError("experiment: direction must be nonzero");
    dgp().validate();
}

DgpSpec ExperimentConfig::dgp() const { return make_dgp(dgp_name, dim, noise_sd); }

KernelSpec ExperimentConfig::kernel() const { return make_higher_order_kernel(dim, kernel_order); }

Eigen::VectorXd ExperimentConfig::resolved_direction() const {
    if (direction.size() == dim) return direction;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = 1.0;
    return v;
}

DwadExpansionInputs expansion_inputs(const ExperimentConfig& config,
                                     const PopulationFunctionals& truth) {
    DwadExpansionInputs in;
    in.n = config.n;
    in.h = config.bandwidth();
    in.d = config.dim;
    in.p = config.kernel_order;
    in.sigma = std::sqrt(truth.sigma_v2);
    in.delta2 = truth.delta_v2;
    in.beta = truth.beta_v;
    in.kappa1 = truth.kappa1_v;
    in.kappa2 = truth.kappa2_v;
    in.vartheta_ratio = 1.0;
    return in;
}

SchemeResult run_standardized(const ExperimentConfig& config, const PopulationFunctionals& truth,
                              Scheme scheme) {
    config.validate();
    if (scheme != Scheme::standardized_sigma && scheme != Scheme::standardized_omega)
        throw ConfigError("run_standardized: expected a standardized scheme");
    const DgpSpec dgp = config.dgp();
    const KernelSpec kernel = config.kernel();
    const Eigen::VectorXd v = config.resolved_direction();
    const double h = config.bandwidth();
    const double omega2 = truth.omega_v2(config.n, h);
    const double vartheta = scheme == Scheme::standardized_sigma
                                ? std::sqrt(truth.sigma_v2 / config.n)
                                : std::sqrt(omega2);

    std::vector<double> stats(static_cast<std::size_t>(config.replications));
    const int reps = config.replications;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        RandomStream stream(config.seed, static_cast<std::uint64_t>(r), StreamRole::data);
        const Sample sample = sample_dgp(dgp, config.n, stream);
        const double theta_hat = pair_mean_projected(sample, kernel, h, v);
        stats[static_cast<std::size_t>(r)] = (theta_hat - truth.theta_v) / vartheta;
    }

    DwadExpansionInputs in = expansion_inputs(config, truth);
    in.vartheta_ratio =
        scheme == Scheme::standardized_sigma ? omega2 * config.n / truth.sigma_v2 : 1.0;
    return finish_scheme(scheme, config, in, std::move(stats), 0);
}

std::pair<SchemeResult, SchemeResult> run_studentized(const ExperimentConfig& config,
                                                      const PopulationFunctionals& truth) {
    config.validate();
    const DgpSpec dgp = config.dgp();
    const KernelSpec kernel = config.kernel();
    const Eigen::VectorXd v = config.resolved_direction();
    const double h = config.bandwidth();

    const int reps = config.replications;
    std::vector<double> t_al(static_cast<std::size_t>(reps));
    std::vector<double> t_sb(static_cast<std::size_t>(reps));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
        RandomStream stream(config.seed, static_cast<std::uint64_t>(r), StreamRole::data);
        const Sample sample = sample_dgp(dgp, config.n, stream);
        const DwadFit fit = estimate(sample, kernel, h);
        const double dev = v.dot(fit.theta) - truth.theta_v;
        const double q_al = v.dot(variance_al(fit) * v);
        const double q_sb = v.dot(variance_sb(fit) * v);
        t_al[static_cast<std::size_t>(r)] =
            q_al > 0.0 ? dev / std::sqrt(q_al) : std::numeric_limits<double>::quiet_NaN();
        t_sb[static_cast<std::size_t>(r)] =
            q_sb > 0.0 ? dev / std::sqrt(q_sb) : std::numeric_limits<double>::quiet_NaN();
    }

    auto split = [](std::vector<double>& raw, int* degenerate) {
        std::vector<double> used;
        used.reserve(raw.size());
        for (double t : raw) {
            if (std::isnan(t))
                ++*degenerate;
            else
                used.push_back(t);
        }
        return used;
    };
    int degenerate_al = 0, degenerate_sb = 0;
    std::vector<double> used_al = split(t_al, &degenerate_al);
    std::vector<double> used_sb = split(t_sb, &degenerate_sb);

    const DwadExpansionInputs in = expansion_inputs(config, truth);
    return {finish_scheme(Scheme::studentized_al, config, in, std::move(used_al), degenerate_al),
            finish_scheme(Scheme::studentized_sb, config, in, std::move(used_sb), degenerate_sb)};
}

double empirical_cdf(const std::vector<double>& sorted_values, double x) {
    const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), x);
    if (sorted_values.empty()) return 0.0;
    return static_cast<double>(it - sorted_values.begin()) /
           static_cast<double>(sorted_values.size());
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::vector<Scheme>& schemes) {
    config.validate();
    if (schemes.empty()) throw ConfigError("run_experiment: no schemes requested");
    ExperimentResult out;
    out.config = config;
    out.h = config.bandwidth();
    out.truth =
        population_functionals(config.dgp(), config.kernel(), config.resolved_direction());

    std::vector<Scheme> wanted;
    for (Scheme s : schemes)
        if (std::find(wanted.begin(), wanted.end(), s) == wanted.end()) wanted.push_back(s);

    const bool any_studentized =
        std::find(wanted.begin(), wanted.end(), Scheme::studentized_al) != wanted.end() ||
        std::find(wanted.begin(), wanted.end(), Scheme::studentized_sb) != wanted.end();
    SchemeResult stud_al, stud_sb;
    if (any_studentized) std::tie(stud_al, stud_sb) = run_studentized(config, out.truth);

    for (Scheme s : wanted) {
        switch (s) {
            case Scheme::standardized_sigma:
            case Scheme::standardized_omega:
                out.schemes.push_back(run_standardized(config, out.truth, s));
                break;
            case Scheme::studentized_al: out.schemes.push_back(stud_al); break;
            case Scheme::studentized_sb: out.schemes.push_back(stud_sb); break;
        }
    }

    out.grid.x.resize(kGridCount);
    out.grid.normal.resize(kGridCount);
    for (int i = 0; i < kGridCount; ++i) {
        out.grid.x[static_cast<std::size_t>(i)] = kGridLo + kGridStep * i;
        out.grid.normal[static_cast<std::size_t>(i)] =
            normal_cdf(out.grid.x[static_cast<std::size_t>(i)]);
    }
    for (const SchemeResult& sr : out.schemes) {
        DwadExpansionInputs in = expansion_inputs(config, out.truth);
        if (sr.scheme == Scheme::standardized_sigma)
            in.vartheta_ratio =
                out.truth.omega_v2(config.n, out.h) * config.n / out.truth.sigma_v2;
        std::vector<double> emp(kGridCount), exp_(kGridCount);
        for (int i = 0; i < kGridCount; ++i) {
            const double x = out.grid.x[static_cast<std::size_t>(i)];
            emp[static_cast<std::size_t>(i)] = empirical_cdf(sr.statistics, x);
            exp_[static_cast<std::size_t>(i)] = scheme_cdf(in, sr.scheme, x);
        }
        out.grid.empirical.push_back(std::move(emp));
        out.grid.expansion.push_back(std::move(exp_));
    }
    return out;
}

std::vector<ComparisonRow> edgeworth_comparison_table(const ExperimentConfig& base,
                                                      const std::vector<int>& n_list,
                                                      const std::vector<double>& gamma_list,
                                                      const std::vector<Scheme>& schemes) {
    std::vector<ComparisonRow> rows;
    for (int n : n_list)
        for (double gamma : gamma_list) {
            ExperimentConfig config = base;
            config.n = n;
            config.h_explicit = 0.0;
            config.h_c = 1.0;
            config.h_gamma = gamma;
            const ExperimentResult result = run_experiment(config, schemes);
            for (const SchemeResult& sr : result.schemes) {
                ComparisonRow row;
                row.scheme = sr.scheme;
                row.n = n;
                row.h = result.h;
                row.ks_to_phi = sr.ks_to_phi;
                row.ks_to_expansion = sr.ks_to_expansion;
                row.coverage_emp = sr.coverage.front().empirical;
                row.coverage_pred = sr.coverage.front().predicted;
                row.r_n = rn(n, result.h, config.kernel_order, config.dim);
                rows.push_back(row);
            }
        }
    return rows;
}

BootstrapDiagnostic bootstrap_diagnostic(const ExperimentConfig& config, int draws) {
    config.validate();
    if (config.dim != 1)
        throw ConfigError("bootstrap_diagnostic: population projections require dim == 1");
    if (draws < 2) throw ConfigError("bootstrap_diagnostic: need at least 2 draws");
    const DgpSpec dgp = config.dgp();
    const KernelSpec kernel = config.kernel();
    const Eigen::VectorXd v = config.resolved_direction();
    const double h = config.bandwidth();
    const int n = config.n;
    const int outer = config.replications;
    const double pair_count = n * (n - 1.0) / 2.0;

    const FiniteBandwidthProjection proj(dgp, kernel, v, h);
    const double mean_u = proj.mean();
    const double sigma_ell2 = proj.sigma_ell2();
    const double second = pair_second_moment(dgp, kernel, v, h);
    const double sigma_q2 = (second - mean_u * mean_u) - 0.5 * sigma_ell2;

    BootstrapDiagnostic out;
    out.n = n;
    out.h = h;
    out.outer_replications = outer;
    out.draws = draws;
    out.var_qbar_target = sigma_q2 / pair_count;

    std::vector<double> var_pop(static_cast<std::size_t>(outer));
    std::vector<double> var_emp(static_cast<std::size_t>(outer));
    std::vector<double> max_full(static_cast<std::size_t>(outer));
    std::vector<double> mean_sigma_star(static_cast<std::size_t>(outer));
    std::vector<double> sigma_orig(static_cast<std::size_t>(outer));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < outer; ++r) {
        RandomStream data_stream(config.seed, static_cast<std::uint64_t>(r), StreamRole::data);
        const Sample sample = sample_dgp(dgp, n, data_stream);
        const Eigen::MatrixXd u = pair_matrix_projected(sample, kernel, h, v);
        const Eigen::VectorXd t = u.rowwise().sum();
        const double theta_hat = t.sum() / (n * (n - 1.0));
        const Eigen::VectorXd lhat =
            2.0 * (t.array() / (n - 1.0) - theta_hat).matrix();
        Eigen::VectorXd ell_pop(n);
        for (int i = 0; i < n; ++i) ell_pop[i] = proj.ell(sample.y[i], sample.x(i, 0));
        sigma_orig[static_cast<std::size_t>(r)] = lhat.squaredNorm() / n;

        RandomStream boot_stream(config.seed, static_cast<std::uint64_t>(r),
                                 StreamRole::bootstrap);
        Eigen::VectorXd weights(n);
        std::vector<double> q_pop(static_cast<std::size_t>(draws));
        std::vector<double> q_emp(static_cast<std::size_t>(draws));
        double worst_full = 0.0;
        double sigma_star_sum = 0.0;
        for (int b = 0; b < draws; ++b) {
            weights.setZero();
            for (int i = 0; i < n; ++i)
                weights[static_cast<int>(boot_stream.next_index(static_cast<std::uint64_t>(n)))] +=
                    1.0;
            const Eigen::VectorXd row = u * weights;
            const double quad = weights.dot(row);
            const double theta_star = quad / (n * (n - 1.0));
            q_pop[static_cast<std::size_t>(b)] =
                theta_star - mean_u - weights.dot(ell_pop) / n;
            q_emp[static_cast<std::size_t>(b)] = theta_star - theta_hat - weights.dot(lhat) / n;
            // Projections recomputed from the resample itself: the centering
            // cancels the projection sum exactly, so this is pure round-off.
            const Eigen::VectorXd lstar =
                2.0 * (row.array() / (n - 1.0) - theta_star).matrix();
            const double q_full = (theta_star - theta_star) - weights.dot(lstar) / n;
            worst_full = std::max(worst_full, std::abs(q_full));
            sigma_star_sum += weights.dot(lstar.array().square().matrix()) / n;
        }
        auto sample_variance = [](const std::vector<double>& values) {
            const double m = std::accumulate(values.begin(), values.end(), 0.0) /
                             static_cast<double>(values.size());
            double acc = 0.0;
            for (double val : values) acc += (val - m) * (val - m);
            return acc / (static_cast<double>(values.size()) - 1.0);
        };
        var_pop[static_cast<std::size_t>(r)] = sample_variance(q_pop);
        var_emp[static_cast<std::size_t>(r)] = sample_variance(q_emp);
        max_full[static_cast<std::size_t>(r)] = worst_full;
        mean_sigma_star[static_cast<std::size_t>(r)] = sigma_star_sum / draws;
    }

    // Sequential reductions in replication order (determinism contract).
    double pop_sum = 0.0, emp_sum = 0.0, star_sum = 0.0, orig_sum = 0.0, full_max = 0.0;
    for (int r = 0; r < outer; ++r) {
        pop_sum += var_pop[static_cast<std::size_t>(r)];
        emp_sum += var_emp[static_cast<std::size_t>(r)];
        star_sum += mean_sigma_star[static_cast<std::size_t>(r)];
        orig_sum += sigma_orig[static_cast<std::size_t>(r)];
        full_max = std::max(full_max, max_full[static_cast<std::size_t>(r)]);
    }
    out.var_qbar_pop = pop_sum / outer;
    out.ratio_pop = out.var_qbar_pop / out.var_qbar_target;
    out.ratio_emp = (emp_sum / outer) / out.var_qbar_target;
    out.max_abs_recomputed = full_max;
    out.sigma_star_factor =
        (star_sum / outer - sigma_ell2) / (orig_sum / outer - sigma_ell2);

    double sq = 0.0;
    for (int r = 0; r < outer; ++r) {
        const double dev = var_pop[static_cast<std::size_t>(r)] - out.var_qbar_pop;
        sq += dev * dev;
    }
    const double sd = outer > 1 ? std::sqrt(sq / (outer - 1.0)) : 0.0;
    out.rel_se_ratio = sd / std::sqrt(static_cast<double>(outer)) /
                       std::max(out.var_qbar_pop, 1e-300);
    out.high_uncertainty = out.rel_se_ratio > 0.20;
    return out;
}

}  // namespace dwad

// Command-line front end: kernel verification, estimation on CSV data,
// population truth for the preset DGPs, expansion curves, and Monte Carlo
// simulation with optional bootstrap diagnostics.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// error, 5 assumption violation.

#include "CLI11.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dwad/cli_config.hpp"
#include "dwad/csv.hpp"
#include "dwad/dgp.hpp"
#include "dwad/errors.hpp"
#include "dwad/estimator.hpp"
#include "dwad/expansion.hpp"
#include "dwad/kernel.hpp"
#include "dwad/normal.hpp"
#include "dwad/simlab.hpp"

namespace {

using namespace dwad;

Eigen::VectorXd parse_direction(const std::string& text, int dim) {
    if (text.empty()) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v[0] = 1.0;
        return v;
    }
    const std::vector<std::string> parts = split_list(text);
    if (static_cast<int>(parts.size()) != dim)
        throw ConfigError("direction needs " + std::to_string(dim) + " components, got " +
                          std::to_string(parts.size()));
    Eigen::VectorXd v(dim);
    for (int j = 0; j < dim; ++j) {
        try {
            v[j] = std::stod(parts[static_cast<std::size_t>(j)]);
        } catch (const std::exception&) {
            throw ConfigError("direction component '" + parts[static_cast<std::size_t>(j)] +
                              "' is not a number");
        }
    }
    if (v.norm() == 0.0) throw ConfigError("direction must be nonzero");
    return v;
}

void emit(const CsvTable& table, const std::string& out_path) {
    if (out_path.empty())
        std::cout << table.to_string();
    else
        table.write(out_path);
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

// ---------------------------------------------------------------------------
// kernel-check
// ---------------------------------------------------------------------------

int run_kernel_check(int dim, int order, double tol, const std::string& out_path) {
    const KernelSpec kernel = make_higher_order_kernel(dim, order);
    const MomentReport report = verify_moments(kernel, tol);

    CsvTable table;
    table.header = {"check", "index", "value", "target", "error", "pass"};
    for (const MomentCheck& check : report.checks) {
        std::string idx;
        for (std::size_t j = 0; j < check.index.a.size(); ++j) {
            if (j) idx += ' ';
            idx += std::to_string(check.index.a[j]);
        }
        table.add_row({"moment", idx, format_g17(check.value), format_g17(check.target),
                       format_g17(check.error), bool_cell(check.pass)});
    }
    table.add_row({"tail_mass_outside_8", "", format_g17(report.tail_mass_outside_8),
                   "0", format_g17(report.tail_mass_outside_8),
                   bool_cell(report.tail_mass_outside_8 < tol)});

    const Eigen::MatrixXd recomputed = roughness_matrix(kernel);
    bool roughness_ok = true;
    for (int j = 0; j < dim; ++j)
        for (int l = 0; l < dim; ++l) {
            const double err = std::abs(recomputed(j, l) - kernel.roughness(j, l));
            const bool ok = err <= tol * std::max(1.0, std::abs(kernel.roughness(j, l)));
            roughness_ok = roughness_ok && ok;
            table.add_row({"roughness", std::to_string(j) + " " + std::to_string(l),
                           format_g17(recomputed(j, l)), format_g17(kernel.roughness(j, l)),
                           format_g17(err), bool_cell(ok)});
        }

    // Positive definiteness of the gradient roughness matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel.roughness);
    const double min_eig = eig.eigenvalues().minCoeff();
    table.add_row({"roughness_positive_definite", "", format_g17(min_eig), "", "",
                   bool_cell(min_eig > 0.0)});

    const bool all = report.all_pass && roughness_ok && min_eig > 0.0;
    table.add_row({"all_pass", "", "", "", "", bool_cell(all)});
    emit(table, out_path);
    if (!all) throw NumericalError("kernel verification failed");
    return 0;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

int run_estimate(const std::string& data_path, double h_explicit, double h_c, double h_gamma,
                 bool gamma_given, int order, const std::string& direction, double alpha,
                 const std::string& out_path) {
    const Sample sample = read_sample_csv(data_path);
    const int n = sample.n();
    const int dim = sample.dim();
    if (h_explicit > 0.0 && gamma_given)
        throw ConfigError("give either --h or --h-gamma, not both");
    double h = h_explicit;
    if (h <= 0.0) {
        if (!gamma_given) throw ConfigError("bandwidth required: --h or --h-gamma (with --h-c)");
        h = h_c * std::pow(static_cast<double>(n), -h_gamma);
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
    const Eigen::VectorXd v = parse_direction(direction, dim);

    const KernelSpec kernel = make_higher_order_kernel(dim, order);
    const DwadFit fit = estimate(sample, kernel, h);
    const double est = v.dot(fit.theta);
    const double se_al = std::sqrt(v.dot(variance_al(fit) * v));
    const Interval ci_al = confidence_interval(fit, v, alpha, VarianceKind::al);
    const Interval ci_sb = confidence_interval(fit, v, alpha, VarianceKind::sb);
    const double se_sb = std::sqrt(v.dot(variance_sb(fit) * v));

    CsvTable table;
    table.header = {"n",     "dim",      "h",        "alpha",    "estimate", "se_al",
                    "se_sb", "ci_al_lo", "ci_al_hi", "ci_sb_lo", "ci_sb_hi"};
    table.add_row({std::to_string(n), std::to_string(dim), format_g17(h), format_g17(alpha),
                   format_g17(est), format_g17(se_al), format_g17(se_sb), format_g17(ci_al.lo),
                   format_g17(ci_al.hi), format_g17(ci_sb.lo), format_g17(ci_sb.hi)});
    emit(table, out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// truth
// ---------------------------------------------------------------------------

int run_truth(const std::string& dgp_name, int dim, double noise_sd, int order,
              const std::string& direction, const std::string& out_path) {
    const DgpSpec dgp = make_dgp(dgp_name, dim, noise_sd);
    const KernelSpec kernel = make_higher_order_kernel(dim, order);
    const Eigen::VectorXd v = parse_direction(direction, dim);
    const PopulationFunctionals truth = population_functionals(dgp, kernel, v);
    const std::vector<ChecklistItem> checklist = assumption_checklist(dgp);

    CsvTable table;
    table.header = {"name", "value", "pass", "note"};
    auto scalar = [&](const std::string& name, double value) {
        table.add_row({name, format_g17(value), "", ""});
    };
    for (int j = 0; j < dim; ++j) scalar("theta_" + std::to_string(j + 1), truth.theta[j]);
    scalar("theta_v", truth.theta_v);
    for (int j = 0; j < dim; ++j)
        for (int l = 0; l < dim; ++l)
            scalar("sigma_" + std::to_string(j + 1) + std::to_string(l + 1),
                   truth.sigma_mat(j, l));
    for (int j = 0; j < dim; ++j)
        for (int l = 0; l < dim; ++l)
            scalar("delta_" + std::to_string(j + 1) + std::to_string(l + 1),
                   truth.delta_mat(j, l));
    scalar("sigma_v2", truth.sigma_v2);
    scalar("delta_v2", truth.delta_v2);
    scalar("beta_v", truth.beta_v);
    scalar("kappa1_v", truth.kappa1_v);
    scalar("kappa2_v", truth.kappa2_v);
    scalar("kappa2_extrapolation_diag", truth.kappa2_extrapolation_diag);

    bool all_pass = true;
    for (const ChecklistItem& item : checklist) {
        all_pass = all_pass && item.pass;
        table.add_row({item.name, format_g17(item.value), bool_cell(item.pass), item.note});
    }
    emit(table, out_path);
    if (!all_pass) throw AssumptionError("assumption checklist failed for this preset");
    return 0;
}

// ---------------------------------------------------------------------------
// edgeworth
// ---------------------------------------------------------------------------

int run_edgeworth(const std::string& dgp_name, double noise_sd, int order, int n,
                  double h_explicit, double h_c, double h_gamma, bool gamma_given,
                  const std::string& direction, double xmin, double xmax, double step,
                  const std::string& out_path) {
    if (n < 3) throw ConfigError("n must be >= 3");
    if (h_explicit > 0.0 && gamma_given)
        throw ConfigError("give either --h or --h-gamma, not both");
    double h = h_explicit;
    if (h <= 0.0) {
        if (!gamma_given) throw ConfigError("bandwidth required: --h or --h-gamma (with --h-c)");
        h = h_c * std::pow(static_cast<double>(n), -h_gamma);
    }
    if (!(step > 0.0) || !(xmax > xmin)) throw ConfigError("bad x grid");

    const DgpSpec dgp = make_dgp(dgp_name, 1, noise_sd);
    const KernelSpec kernel = make_higher_order_kernel(1, order);
    const Eigen::VectorXd v = parse_direction(direction, 1);
    const PopulationFunctionals truth = population_functionals(dgp, kernel, v);

    DwadExpansionInputs in;
    in.n = n;
    in.h = h;
    in.d = 1;
    in.p = order;
    in.sigma = std::sqrt(truth.sigma_v2);
    in.delta2 = truth.delta_v2;
    in.beta = truth.beta_v;
    in.kappa1 = truth.kappa1_v;
    in.kappa2 = truth.kappa2_v;
    in.vartheta_ratio = truth.omega_v2(n, h) * n / truth.sigma_v2;

    CsvTable table;
    table.header = {"x", "Phi", "G", "G_AL", "G_SB"};
    const int count = static_cast<int>(std::floor((xmax - xmin) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
        const double x = xmin + step * i;
        table.add_row({format_g17(x), format_g17(normal_cdf(x)), format_g17(std_expansion(in, x)),
                       format_g17(studentized_al(in, x)), format_g17(studentized_sb(in, x))});
    }
    emit(table, out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    ExperimentConfig config;
    std::vector<Scheme> schemes = {Scheme::standardized_sigma, Scheme::standardized_omega,
                                   Scheme::studentized_al, Scheme::studentized_sb};
    int bootstrap_draws = 0;
    std::string out_dir;
};

int run_simulate(const SimulateOptions& opt) {
    namespace fs = std::filesystem;
    opt.config.validate();
    fs::create_directories(opt.out_dir);

    const ExperimentResult result = run_experiment(opt.config, opt.schemes);
    const double h = result.h;

    CsvTable results;
    results.header = {"scheme",           "n",
                      "h",                "replications_total",
                      "replications_used", "degenerate_count",
                      "unreliable",       "ks_to_phi",
                      "ks_to_expansion",  "alpha",
                      "critical",         "coverage_empirical",
                      "coverage_predicted", "coverage_se_binomial",
                      "rate_nh2p",        "rate_nhd2",
                      "r_n"};
    for (const SchemeResult& sr : result.schemes)
        for (const CoverageRow& row : sr.coverage)
            results.add_row({scheme_name(sr.scheme), std::to_string(opt.config.n), format_g17(h),
                             std::to_string(sr.replications_total),
                             std::to_string(sr.replications_used),
                             std::to_string(sr.degenerate_count), bool_cell(sr.unreliable),
                             format_g17(sr.ks_to_phi), format_g17(sr.ks_to_expansion),
                             format_g17(row.alpha), format_g17(row.critical),
                             format_g17(row.empirical), format_g17(row.predicted),
                             format_g17(row.se_binomial), format_g17(opt.config.rate_nh2p()),
                             format_g17(opt.config.rate_nhd2()),
                             format_g17(rn(opt.config.n, h, opt.config.kernel_order,
                                           opt.config.dim))});
    results.write((fs::path(opt.out_dir) / "results.csv").string());

    CsvTable grid;
    grid.header = {"x", "normal"};
    for (const SchemeResult& sr : result.schemes) {
        grid.header.push_back("empirical_" + scheme_name(sr.scheme));
        grid.header.push_back("expansion_" + scheme_name(sr.scheme));
    }
    for (std::size_t i = 0; i < result.grid.x.size(); ++i) {
        std::vector<std::string> row = {format_g17(result.grid.x[i]),
                                        format_g17(result.grid.normal[i])};
        for (std::size_t s = 0; s < result.schemes.size(); ++s) {
            row.push_back(format_g17(result.grid.empirical[s][i]));
            row.push_back(format_g17(result.grid.expansion[s][i]));
        }
        grid.add_row(std::move(row));
    }
    grid.write((fs::path(opt.out_dir) / "cdf_grid.csv").string());

    CsvTable diag;
    diag.header = {"name", "value"};
    auto put = [&](const std::string& name, const std::string& value) {
        diag.add_row({name, value});
    };
    put("seed", std::to_string(opt.config.seed));
    put("dgp", opt.config.dgp_name);
    put("dim", std::to_string(opt.config.dim));
    put("noise_sd", format_g17(opt.config.noise_sd));
    put("kernel_order", std::to_string(opt.config.kernel_order));
    put("n", std::to_string(opt.config.n));
    put("h", format_g17(h));
    put("replications", std::to_string(opt.config.replications));
    put("rate_nh2p", format_g17(opt.config.rate_nh2p()));
    put("rate_nhd2", format_g17(opt.config.rate_nhd2()));
    put("r_n", format_g17(rn(opt.config.n, h, opt.config.kernel_order, opt.config.dim)));
    put("theta_v", format_g17(result.truth.theta_v));
    put("sigma_v2", format_g17(result.truth.sigma_v2));
    put("delta_v2", format_g17(result.truth.delta_v2));
    put("beta_v", format_g17(result.truth.beta_v));
    put("kappa1_v", format_g17(result.truth.kappa1_v));
    put("kappa2_v", format_g17(result.truth.kappa2_v));
    put("kappa2_extrapolation_diag", format_g17(result.truth.kappa2_extrapolation_diag));
    put("omega_v2", format_g17(result.truth.omega_v2(opt.config.n, h)));
    for (const SchemeResult& sr : result.schemes) {
        put("degenerate_" + scheme_name(sr.scheme), std::to_string(sr.degenerate_count));
        put("unreliable_" + scheme_name(sr.scheme), bool_cell(sr.unreliable));
    }
    if (opt.bootstrap_draws > 0) {
        const BootstrapDiagnostic boot = bootstrap_diagnostic(opt.config, opt.bootstrap_draws);
        put("bootstrap_draws", std::to_string(boot.draws));
        put("bootstrap_outer_replications", std::to_string(boot.outer_replications));
        put("bootstrap_var_qbar_target", format_g17(boot.var_qbar_target));
        put("bootstrap_var_qbar_pop", format_g17(boot.var_qbar_pop));
        put("bootstrap_ratio_pop", format_g17(boot.ratio_pop));
        put("bootstrap_ratio_emp", format_g17(boot.ratio_emp));
        put("bootstrap_max_abs_recomputed", format_g17(boot.max_abs_recomputed));
        put("bootstrap_sigma_star_factor", format_g17(boot.sigma_star_factor));
        put("bootstrap_rel_se_ratio", format_g17(boot.rel_se_ratio));
        put("bootstrap_high_uncertainty", bool_cell(boot.high_uncertainty));
    }
    diag.write((fs::path(opt.out_dir) / "diagnostics.csv").string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-weighted average derivative estimation and simulation"};
    app.require_subcommand(1);
    // Help is long-form only: the short -h would collide with the --h bandwidth option.
    app.set_help_flag("--help", "print help and exit");

    // ---- kernel-check ----
    auto* kc = app.add_subcommand("kernel-check", "verify kernel moments and roughness");
    kc->set_help_flag("--help", "print help and exit");
    int kc_dim = 1, kc_order = 2;
    double kc_tol = 1e-8;
    std::string kc_out;
    kc->add_option("--dim", kc_dim, "kernel dimension");
    kc->add_option("--order", kc_order, "kernel order (2, 4, 6, 8)");
    kc->add_option("--tol", kc_tol, "verification tolerance");
    kc->add_option("--out", kc_out, "output CSV path (default: stdout)");

    // ---- estimate ----
    auto* es = app.add_subcommand("estimate", "fit the estimator on a CSV data file");
    es->set_help_flag("--help", "print help and exit");
    std::string es_data, es_direction, es_out;
    double es_h = 0.0, es_hc = 1.0, es_hgamma = 0.0, es_alpha = 0.05;
    int es_order = 2;
    es->add_option("--data", es_data, "input CSV with header y,x1,...,xd")->required();
    es->add_option("--h", es_h, "bandwidth");
    es->add_option("--h-c", es_hc, "bandwidth rule constant c in h = c n^-gamma");
    auto* es_gamma_opt = es->add_option("--h-gamma", es_hgamma, "bandwidth rule exponent gamma");
    es->add_option("--order", es_order, "kernel order");
    es->add_option("--direction", es_direction, "projection direction, comma separated");
    es->add_option("--alpha", es_alpha, "two-sided confidence level alpha");
    es->add_option("--out", es_out, "output CSV path (default: stdout)");

    // ---- truth ----
    auto* tr = app.add_subcommand("truth", "population functionals of a preset DGP");
    tr->set_help_flag("--help", "print help and exit");
    std::string tr_dgp = "linear", tr_direction, tr_out;
    int tr_dim = 1, tr_order = 2;
    double tr_noise = 1.0;
    tr->add_option("--dgp", tr_dgp, "preset: linear or cubic_damped");
    tr->add_option("--dim", tr_dim, "covariate dimension");
    tr->add_option("--noise-sd", tr_noise, "noise standard deviation");
    tr->add_option("--order", tr_order, "kernel order");
    tr->add_option("--direction", tr_direction, "projection direction");
    tr->add_option("--out", tr_out, "output CSV path (default: stdout)");

    // ---- edgeworth ----
    auto* ed = app.add_subcommand("edgeworth", "second-order CDF approximations on a grid");
    ed->set_help_flag("--help", "print help and exit");
    std::string ed_dgp = "linear", ed_direction, ed_out;
    int ed_n = 1000, ed_order = 2;
    double ed_noise = 1.0, ed_h = 0.0, ed_hc = 1.0, ed_hgamma = 0.0;
    double ed_xmin = -4.0, ed_xmax = 4.0, ed_step = 0.05;
    ed->add_option("--dgp", ed_dgp, "preset: linear or cubic_damped");
    ed->add_option("--noise-sd", ed_noise, "noise standard deviation");
    ed->add_option("--order", ed_order, "kernel order");
    ed->add_option("--n", ed_n, "sample size");
    ed->add_option("--h", ed_h, "bandwidth");
    ed->add_option("--h-c", ed_hc, "bandwidth rule constant");
    auto* ed_gamma_opt = ed->add_option("--h-gamma", ed_hgamma, "bandwidth rule exponent");
    ed->add_option("--direction", ed_direction, "projection direction");
    ed->add_option("--xmin", ed_xmin, "grid start");
    ed->add_option("--xmax", ed_xmax, "grid end");
    ed->add_option("--step", ed_step, "grid step");
    ed->add_option("--out", ed_out, "output CSV path (default: stdout)");

    // ---- simulate ----
    auto* si = app.add_subcommand("simulate", "Monte Carlo experiment with CSV outputs");
    si->set_help_flag("--help", "print help and exit");
    std::string si_config, si_dgp, si_schemes, si_alphas, si_direction, si_out;
    int si_dim = 0, si_order = 0, si_n = 0, si_reps = 0, si_boot = -1, si_threads = 0;
    double si_noise = -1.0, si_h = 0.0, si_hc = 0.0, si_hgamma = -1.0;
    std::uint64_t si_seed = 0;
    si->add_option("--config", si_config, "key=value configuration file");
    si->add_option("--dgp", si_dgp, "preset: linear or cubic_damped");
    si->add_option("--dim", si_dim, "covariate dimension");
    si->add_option("--noise-sd", si_noise, "noise standard deviation");
    si->add_option("--order", si_order, "kernel order");
    si->add_option("--n", si_n, "sample size");
    si->add_option("--h", si_h, "bandwidth (overrides the power rule)");
    si->add_option("--h-c", si_hc, "bandwidth rule constant");
    si->add_option("--h-gamma", si_hgamma, "bandwidth rule exponent");
    si->add_option("--reps", si_reps, "Monte Carlo replications");
    si->add_option("--schemes", si_schemes, "comma list of schemes");
    si->add_option("--alphas", si_alphas, "comma list of alpha levels");
    si->add_option("--direction", si_direction, "projection direction");
    si->add_option("--bootstrap-draws", si_boot, "bootstrap draws per replication (0 = off)");
    si->add_option("--threads", si_threads, "advisory OpenMP thread count");
    si->add_option("--seed", si_seed, "base RNG seed (required)")->required();
    si->add_option("--out", si_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (kc->parsed()) return run_kernel_check(kc_dim, kc_order, kc_tol, kc_out);
        if (es->parsed())
            return run_estimate(es_data, es_h, es_hc, es_hgamma, es_gamma_opt->count() > 0,
                                es_order, es_direction, es_alpha, es_out);
        if (tr->parsed())
            return run_truth(tr_dgp, tr_dim, tr_noise, tr_order, tr_direction, tr_out);
        if (ed->parsed())
            return run_edgeworth(ed_dgp, ed_noise, ed_order, ed_n, ed_h, ed_hc, ed_hgamma,
                                 ed_gamma_opt->count() > 0, ed_direction, ed_xmin, ed_xmax,
                                 ed_step, ed_out);
        if (si->parsed()) {
            SimulateOptions opt;
            opt.out_dir = si_out;
            ExperimentConfig& cfg = opt.config;
            cfg.seed = si_seed;

            // Precedence: command-line flag, then config file, then default.
            std::map<std::string, std::string> file;
            if (!si_config.empty()) file = load_key_value_config(si_config);
            if (file.count("seed"))
                throw ConfigError("seed must be given via --seed, not the config file");
            std::set<std::string> known;
            auto cfg_value = [&](const std::string& key, bool flag_given) -> const std::string* {
                known.insert(key);
                if (flag_given) return nullptr;
                const auto it = file.find(key);
                return it == file.end() ? nullptr : &it->second;
            };
            auto as_int = [](const std::string& key, const std::string& value) {
                try {
                    return std::stoi(value);
                } catch (const std::exception&) {
                    throw ConfigError("config key '" + key + "': '" + value +
                                      "' is not an integer");
                }
            };
            auto as_double = [](const std::string& key, const std::string& value) {
                try {
                    return std::stod(value);
                } catch (const std::exception&) {
                    throw ConfigError("config key '" + key + "': '" + value +
                                      "' is not a number");
                }
            };

            if (si_dgp.empty()) si_dgp = "linear";
            if (const auto* v = cfg_value("dgp", si->count("--dgp") > 0)) si_dgp = *v;
            cfg.dgp_name = si_dgp;
            if (const auto* v = cfg_value("dim", si->count("--dim") > 0))
                cfg.dim = as_int("dim", *v);
            else if (si->count("--dim") > 0)
                cfg.dim = si_dim;
            if (const auto* v = cfg_value("noise_sd", si->count("--noise-sd") > 0))
                cfg.noise_sd = as_double("noise_sd", *v);
            else if (si->count("--noise-sd") > 0)
                cfg.noise_sd = si_noise;
            if (const auto* v = cfg_value("kernel_order", si->count("--order") > 0))
                cfg.kernel_order = as_int("kernel_order", *v);
            else if (si->count("--order") > 0)
                cfg.kernel_order = si_order;
            if (const auto* v = cfg_value("n", si->count("--n") > 0))
                cfg.n = as_int("n", *v);
            else if (si->count("--n") > 0)
                cfg.n = si_n;
            if (const auto* v = cfg_value("h", si->count("--h") > 0))
                cfg.h_explicit = as_double("h", *v);
            else if (si->count("--h") > 0)
                cfg.h_explicit = si_h;
            if (const auto* v = cfg_value("h_c", si->count("--h-c") > 0))
                cfg.h_c = as_double("h_c", *v);
            else if (si->count("--h-c") > 0)
                cfg.h_c = si_hc;
            if (const auto* v = cfg_value("h_gamma", si->count("--h-gamma") > 0))
                cfg.h_gamma = as_double("h_gamma", *v);
            else if (si->count("--h-gamma") > 0)
                cfg.h_gamma = si_hgamma;
            if (const auto* v = cfg_value("replications", si->count("--reps") > 0))
                cfg.replications = as_int("replications", *v);
            else if (si->count("--reps") > 0)
                cfg.replications = si_reps;

            std::string schemes_text = si_schemes;
            if (const auto* v = cfg_value("schemes", si->count("--schemes") > 0))
                schemes_text = *v;
            if (!schemes_text.empty()) {
                opt.schemes.clear();
                for (const std::string& name : split_list(schemes_text))
                    opt.schemes.push_back(scheme_from_name(name));
                if (opt.schemes.empty()) throw ConfigError("schemes list is empty");
            }
            std::string alphas_text = si_alphas;
            if (const auto* v = cfg_value("alphas", si->count("--alphas") > 0))
                alphas_text = *v;
            if (!alphas_text.empty()) {
                cfg.alphas.clear();
                for (const std::string& a : split_list(alphas_text))
                    cfg.alphas.push_back(as_double("alphas", a));
            }
            std::string direction_text = si_direction;
            if (const auto* v = cfg_value("direction", si->count("--direction") > 0))
                direction_text = *v;
            if (!direction_text.empty())
                cfg.direction = parse_direction(direction_text, cfg.dim);
            if (const auto* v = cfg_value("bootstrap_draws", si_boot >= 0))
                opt.bootstrap_draws = as_int("bootstrap_draws", *v);
            else if (si_boot >= 0)
                opt.bootstrap_draws = si_boot;

            int threads = si_threads;
            if (const auto* v = cfg_value("threads", si->count("--threads") > 0))
                threads = as_int("threads", *v);

            known.insert("seed");
            for (const auto& [key, value] : file)
                if (!known.count(key))
                    throw ConfigError("unknown config key '" + key + "'");
#ifdef _OPENMP
            if (threads > 0) omp_set_num_threads(threads);
#else
            (void)threads;
#endif
            return run_simulate(opt);
        }
        throw ConfigError("no subcommand given");
    } catch (const AssumptionError& e) {
        std::cerr << "assumption violation: " << e.what() << "\n";
        return 5;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

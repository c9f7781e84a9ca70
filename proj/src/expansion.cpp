#include "dwad/expansion.hpp"

#include <cmath>

#include "dwad/errors.hpp"
#include "dwad/hermite.hpp"
#include "dwad/normal.hpp"

namespace dwad {

namespace {

double choose2(double n) { return 0.5 * n * (n - 1.0); }
double choose4(double n) {
    if (n < 4.0) return 0.0;
    return n * (n - 1.0) * (n - 2.0) * (n - 3.0) / 24.0;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string("expansion inputs: ") + what +
                                             " must be finite");
}

}  // namespace

void DwadExpansionInputs::validate() const {
    if (n < 2) throw ConfigError("expansion inputs: n must be >= 2");
    if (!(h > 0.0) || !std::isfinite(h))
        throw ConfigError("expansion inputs: h must be positive and finite");
    if (d < 1) throw ConfigError("expansion inputs: d must be >= 1");
    if (p != 2 && p != 4 && p != 6 && p != 8)
        throw ConfigError("expansion inputs: kernel order must be one of {2, 4, 6, 8}");
    if (!(sigma > 0.0)) throw ConfigError("expansion inputs: sigma must be > 0");
    if (delta2 < 0.0) throw ConfigError("expansion inputs: delta2 must be >= 0");
    if (!(vartheta_ratio > 0.0))
        throw ConfigError("expansion inputs: vartheta_ratio must be > 0");
    require_finite(sigma, "sigma");
    require_finite(delta2, "delta2");
    require_finite(beta, "beta");
    require_finite(kappa1, "kappa1");
    require_finite(kappa2, "kappa2");
    require_finite(rn(n, h, p, d), "r_n");
}

double std_expansion(const DwadExpansionInputs& in, double x) {
    in.validate();
    const double sqrt_n = std::sqrt(static_cast<double>(in.n));
    const double bias = sqrt_n * std::pow(in.h, in.p) * in.beta / in.sigma;
    const double var = 0.5 * (in.vartheta_ratio - 1.0);
    const double skew = (in.kappa1 + in.kappa2) /
                        (6.0 * sqrt_n * in.sigma * in.sigma * in.sigma);
    return normal_cdf(x) - normal_pdf(x) * (bias + var * x + skew * (x * x - 1.0));
}

namespace {

// Shared pieces of the two studentized expansions: the constant collects the
// bias and the studentization-induced recentering, the quadratic collects the
// skewness correction.
struct StudentizedTerms {
    double constant;
    double quadratic;
};

StudentizedTerms studentized_terms(const DwadExpansionInputs& in) {
    const double sqrt_n = std::sqrt(static_cast<double>(in.n));
    const double sigma3 = in.sigma * in.sigma * in.sigma;
    return {sqrt_n * std::pow(in.h, in.p) * in.beta / in.sigma -
                (3.0 * in.kappa1 + 2.0 * in.kappa2) / (6.0 * sqrt_n * sigma3),
            (2.0 * in.kappa1 + in.kappa2) / (6.0 * sqrt_n * sigma3)};
}

}  // namespace

double studentized_al(const DwadExpansionInputs& in, double x) {
    in.validate();
    const StudentizedTerms t = studentized_terms(in);
    const double var = in.delta2 / (in.n * std::pow(in.h, in.d + 2) * in.sigma * in.sigma);
    return normal_cdf(x) -
           normal_pdf(x) * (t.constant - var * x - t.quadratic * (x * x - 1.0));
}

double studentized_sb(const DwadExpansionInputs& in, double x) {
    in.validate();
    const StudentizedTerms t = studentized_terms(in);
    return normal_cdf(x) - normal_pdf(x) * (t.constant - t.quadratic * (x * x - 1.0));
}

double GenericUstatInputs::omega2() const {
    return sigma_ell2 / n + sigma_q2 / choose2(n);
}

void GenericUstatInputs::validate() const {
    if (n < 2.0) throw ConfigError("generic expansion inputs: n must be >= 2");
    if (!(vartheta > 0.0))
        throw ConfigError("generic expansion inputs: vartheta must be > 0");
    if (sigma_ell2 < 0.0 || sigma_q2 < 0.0)
        throw ConfigError("generic expansion inputs: second moments must be >= 0");
    require_finite(bias, "bias");
    require_finite(kappa_a, "kappa_a");
    require_finite(kappa_b, "kappa_b");
    require_finite(omega2(), "omega2");
}

GammaCoefficients generic_gammas(const GenericUstatInputs& in) {
    in.validate();
    const double n = in.n;
    const double n2 = n * n;
    const double n4 = n2 * n2;
    const double n6 = n4 * n2;
    const double v = in.vartheta;
    const double v2 = v * v;
    const double v3 = v2 * v;
    const double v4 = v2 * v2;
    const double v5 = v4 * v;
    const double v6 = v4 * v2;
    const double v8 = v4 * v4;
    const double v9 = v8 * v;
    const double c2inv = 1.0 / choose2(n);
    const double c4 = choose4(n);
    const double om2 = in.omega2();
    const double k1 = in.kappa_a;
    const double k2 = in.kappa_b;

    GammaCoefficients g;
    g.gamma[0] = in.bias / v;
    g.gamma[1] = (om2 - v2) / (2.0 * v2);
    g.gamma[2] = (k1 + 6.0 * k2) / (6.0 * n2 * v3);
    g.gamma[3] = (om2 - v2) / (4.0 * v4) * c2inv * in.sigma_q2;
    g.gamma[4] = (c2inv * k1 * in.sigma_q2 + 6.0 * (in.sigma_ell2 / n - v2) * k2) /
                 (12.0 * n2 * v5);
    g.gamma[5] = (k1 * k2 + 12.0 * c2inv * c2inv * c4 * k2 * k2) / (6.0 * n4 * v6);
    g.gamma[6] = 0.0;
    g.gamma[7] = (in.sigma_ell2 / n - v2) / (4.0 * n4 * v8) * c2inv * c2inv * c4 * k2 * k2;
    g.gamma[8] = c2inv * c2inv * c4 * k1 * k2 * k2 / (12.0 * n6 * v9);
    return g;
}

double generic_cdf(const GammaCoefficients& g, double x) {
    double corr = 0.0;
    for (int j = 1; j <= 9; ++j) corr += g.gamma[static_cast<std::size_t>(j - 1)] * hermite(j - 1, x);
    return normal_cdf(x) - normal_pdf(x) * corr;
}

namespace {

constexpr double kFourierTmax = 40.0;
constexpr int kFourierPoints = 1 << 14;  // over t in [-40, 40]
// Folded to t > 0 by chi(-t) = conj(chi(t)): half as many panels.
constexpr int kFourierPanels = kFourierPoints / 2;

// Real and imaginary parts of chi(t) / exp(-t^2/2) for t > 0.
struct ChiParts {
    double re;
    double im;
};

ChiParts chi_parts(const GammaCoefficients& g, double t, ChiConvention convention) {
    // (it)^j cycles through {1, i, -1, -i} in j mod 4.
    double tp = 1.0;
    double re = 1.0, im = 0.0;
    for (int j = 1; j <= 9; ++j) {
        tp *= t;
        if (convention == ChiConvention::exponent && j == 1) continue;
        const double c = g.gamma[static_cast<std::size_t>(j - 1)] * tp;
        switch (j % 4) {
            case 0: re += c; break;
            case 1: im += c; break;
            case 2: re -= c; break;
            default: im -= c; break;
        }
    }
    if (convention == ChiConvention::exponent) {
        const double a = g.gamma[0] * t;  // exp(i gamma_1 t) rotation
        const double ca = std::cos(a), sa = std::sin(a);
        return {re * ca - im * sa, re * sa + im * ca};
    }
    return {re, im};
}

}  // namespace

double generic_cdf_fourier(const GammaCoefficients& g, double x, ChiConvention convention) {
    // Gil-Pelaez: F(x) = 1/2 - (1/pi) int_0^inf Im[chi(t) e^{-itx}] / t dt.
    const double dt = kFourierTmax / kFourierPanels;
    double acc = 0.5 * (g.gamma[0] - x);  // t -> 0 limit of the integrand, half weight
    for (int k = 1; k <= kFourierPanels; ++k) {
        const double t = k * dt;
        const ChiParts chi = chi_parts(g, t, convention);
        const double damp = std::exp(-0.5 * t * t);
        const double integrand =
            damp * (chi.im * std::cos(t * x) - chi.re * std::sin(t * x)) / t;
        acc += (k == kFourierPanels ? 0.5 : 1.0) * integrand;
    }
    return 0.5 - acc * dt / M_PI;
}

std::vector<double> generic_cdf_fourier_grid(const GammaCoefficients& g, double x0, double dx,
                                             int count, ChiConvention convention) {
    if (count < 1) throw ConfigError("generic_cdf_fourier_grid: count must be >= 1");
    const double dt = kFourierTmax / kFourierPanels;
    const int m = kFourierPanels;

    // Per-node constants: trapezoid weight * exp(-t^2/2)/t * chi parts.
    std::vector<double> wim(static_cast<std::size_t>(m) + 1), wre(static_cast<std::size_t>(m) + 1);
    std::vector<double> cosx(static_cast<std::size_t>(m) + 1), sinx(static_cast<std::size_t>(m) + 1);
    std::vector<double> cstep(static_cast<std::size_t>(m) + 1), sstep(static_cast<std::size_t>(m) + 1);
    for (int k = 1; k <= m; ++k) {
        const double t = k * dt;
        const ChiParts chi = chi_parts(g, t, convention);
        const double w = (k == m ? 0.5 : 1.0) * std::exp(-0.5 * t * t) / t;
        wim[static_cast<std::size_t>(k)] = w * chi.im;
        wre[static_cast<std::size_t>(k)] = w * chi.re;
        cosx[static_cast<std::size_t>(k)] = std::cos(t * x0);
        sinx[static_cast<std::size_t>(k)] = std::sin(t * x0);
        cstep[static_cast<std::size_t>(k)] = std::cos(t * dx);
        sstep[static_cast<std::size_t>(k)] = std::sin(t * dx);
    }

    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x = x0 + i * dx;
        if (i > 0 && i % 256 == 0) {
            // Re-anchor the rotating phases to cap accumulated round-off.
            for (int k = 1; k <= m; ++k) {
                const double t = k * dt;
                cosx[static_cast<std::size_t>(k)] = std::cos(t * x);
                sinx[static_cast<std::size_t>(k)] = std::sin(t * x);
            }
        }
        double acc = 0.5 * (g.gamma[0] - x);
        for (int k = 1; k <= m; ++k) {
            const std::size_t ks = static_cast<std::size_t>(k);
            acc += wim[ks] * cosx[ks] - wre[ks] * sinx[ks];
        }
        out[static_cast<std::size_t>(i)] = 0.5 - acc * dt / M_PI;
        for (int k = 1; k <= m; ++k) {
            const std::size_t ks = static_cast<std::size_t>(k);
            const double c = cosx[ks] * cstep[ks] - sinx[ks] * sstep[ks];
            const double s = sinx[ks] * cstep[ks] + cosx[ks] * sstep[ks];
            cosx[ks] = c;
            sinx[ks] = s;
        }
    }
    return out;
}

double coverage_prediction(const DwadExpansionInputs& in, double alpha, CoverageScheme scheme) {
    in.validate();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("coverage_prediction: alpha must lie in (0, 1)");
    const double c = normal_quantile(1.0 - 0.5 * alpha);
    switch (scheme) {
        case CoverageScheme::standardized:
            return 1.0 - alpha - (in.vartheta_ratio - 1.0) * normal_pdf(c) * c;
        case CoverageScheme::studentized_al:
            return 1.0 - alpha +
                   2.0 * in.delta2 / (in.n * std::pow(in.h, in.d + 2) * in.sigma * in.sigma) *
                       normal_pdf(c) * c;
        case CoverageScheme::studentized_sb:
            return 1.0 - alpha;
    }
    throw ConfigError("coverage_prediction: unknown scheme");
}

double rn(double n, double h, int p, int d) {
    if (n < 2.0) throw ConfigError("rn: n must be >= 2");
    if (!(h > 0.0)) throw ConfigError("rn: h must be > 0");
    return std::sqrt(n) * std::pow(h, p) + 1.0 / (n * std::pow(h, d + 2)) +
           1.0 / std::sqrt(n);
}

}  // namespace dwad

// Timing comparison of the blocked (OpenMP) pair sweep against the naive
// serial reference, plus an agreement check so the numbers being compared
// are known to describe the same computation.
//
// Usage: bench_pairs [n1 n2 ...]   (default sweep: 1000 2000 4000)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dwad/dgp.hpp"
#include "dwad/estimator.hpp"
#include "dwad/kernel.hpp"
#include "dwad/rng.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double time_best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> sizes;
    for (int i = 1; i < argc; ++i) sizes.push_back(std::atoi(argv[i]));
    if (sizes.empty()) sizes = {1000, 2000, 4000};

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled\n");
#endif

    const auto dgp = dwad::make_dgp("linear");
    const auto kernel = dwad::make_gaussian_kernel(1);
    std::printf("%8s  %12s  %12s  %8s  %10s\n", "n", "blocked (s)", "reference (s)", "speedup",
                "agreement");
    for (int n : sizes) {
        if (n < 3) continue;
        dwad::RandomStream stream(4242, static_cast<std::uint64_t>(n), dwad::StreamRole::data);
        const auto sample = dwad::sample_dgp(dgp, n, stream);
        const double h = 0.5 * std::pow(static_cast<double>(n), -0.3);

        dwad::DwadFit fast, ref;
        const int repeats = n <= 2000 ? 3 : 1;
        const double t_fast =
            time_best_of(repeats, [&] { fast = dwad::estimate(sample, kernel, h); });
        const double t_ref = time_best_of(
            repeats, [&] { ref = dwad::estimate_serial_reference(sample, kernel, h); });

        double gap = (fast.theta - ref.theta).lpNorm<Eigen::Infinity>();
        gap = std::max(gap, (fast.sigma - ref.sigma).lpNorm<Eigen::Infinity>());
        gap = std::max(gap, (fast.delta - ref.delta).lpNorm<Eigen::Infinity>());
        std::printf("%8d  %12.4f  %12.4f  %7.2fx  %10.2e\n", n, t_fast, t_ref, t_ref / t_fast,
                    gap);
    }
    return 0;
}

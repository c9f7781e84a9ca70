#include "dwad/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <mutex>

namespace dwad {

namespace {

GaussHermiteRule build_rule(int n) {
    // Jacobi matrix of the probabilists' Hermite recurrence:
    // diagonal 0, off-diagonal sqrt(k).  Weight mass sqrt(2*pi).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw NumericalError("gauss_hermite: eigen decomposition failed");

    GaussHermiteRule rule;
    rule.node = solver.eigenvalues();
    rule.weight.resize(n);
    const double mass = std::sqrt(2.0 * M_PI);
    for (int i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.weight[i] = mass * v0 * v0;
    }
    // The solver already sorts eigenvalues ascending; enforce exact +/- node
    // symmetry so symmetric integrands integrate to exactly zero.
    for (int i = 0, j = n - 1; i < j; ++i, --j) {
        const double mag = 0.5 * (rule.node[j] - rule.node[i]);
        rule.node[i] = -mag;
        rule.node[j] = mag;
        const double w = 0.5 * (rule.weight[i] + rule.weight[j]);
        rule.weight[i] = w;
        rule.weight[j] = w;
    }
    if (n % 2 == 1) rule.node[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
    if (n < 1 || n > 2048) throw ConfigError("gauss_hermite: node count must be in [1, 2048]");
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

}  // namespace dwad

#pragma once
// Multi-index bookkeeping for kernel moments and higher-order bias terms.
// A multi-index a = (a_1,...,a_d) of non-negative integers has order
// |a| = sum a_j, factorial a! = prod a_j!, and monomial u^a = prod u_j^{a_j}.

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dwad {

struct MultiIndex {
    std::vector<int> a;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents) : a(std::move(exponents)) {
        for (int e : a)
            if (e < 0) throw std::invalid_argument("multi-index exponents must be >= 0");
    }

    int dim() const { return static_cast<int>(a.size()); }

    int order() const {
        int s = 0;
        for (int e : a) s += e;
        return s;
    }

    double factorial() const {
        double f = 1.0;
        for (int e : a)
            for (int k = 2; k <= e; ++k) f *= k;
        return f;
    }

    double monomial(const Eigen::VectorXd& u) const {
        if (u.size() != dim()) throw std::invalid_argument("monomial: dimension mismatch");
        double m = 1.0;
        for (int j = 0; j < dim(); ++j)
            for (int k = 0; k < a[j]; ++k) m *= u[j];
        return m;
    }

    bool any_odd() const {
        for (int e : a)
            if (e % 2 != 0) return true;
        return false;
    }

    // All multi-indices in d coordinates with |a| == p, lexicographic order.
    static std::vector<MultiIndex> all_of_order(int d, int p) {
        if (d < 1 || p < 0) throw std::invalid_argument("all_of_order: need d >= 1, p >= 0");
        std::vector<MultiIndex> out;
        std::vector<int> cur(static_cast<std::size_t>(d), 0);
        enumerate(cur, 0, p, out);
        return out;
    }

    // All multi-indices with 0 <= |a| <= p.
    static std::vector<MultiIndex> all_up_to_order(int d, int p) {
        std::vector<MultiIndex> out;
        for (int q = 0; q <= p; ++q) {
            auto level = all_of_order(d, q);
            out.insert(out.end(), level.begin(), level.end());
        }
        return out;
    }

  private:
    static void enumerate(std::vector<int>& cur, std::size_t pos, int remaining,
                          std::vector<MultiIndex>& out) {
        if (pos + 1 == cur.size()) {
            cur[pos] = remaining;
            out.emplace_back(MultiIndex{cur});
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[pos] = e;
            enumerate(cur, pos + 1, remaining - e, out);
        }
        cur[pos] = 0;
    }
};

}  // namespace dwad

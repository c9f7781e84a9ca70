#pragma once
// Counter-based random streams.  Each stream is a stateless permutation of a
// 64-bit counter under a key derived from (seed, replication, role); drawing
// the k-th variate never depends on how many threads are running or which
// thread owns the replication, so every simulation is bitwise reproducible
// under any parallel schedule.
//
// The permutation is the SplitMix64 output function (Steele, Lea & Flood,
// "Fast splittable pseudorandom number generators") applied to
// key + (counter+1) * golden-ratio increment.  Gaussian variates use the
// inverse-CDF method so each one consumes exactly one uniform.

#include <cstdint>

#include "dwad/normal.hpp"

namespace dwad {

// Stream roles keep draws for different purposes statistically independent
// within one replication.
enum class StreamRole : std::uint64_t { data = 1, bootstrap = 2, auxiliary = 3 };

class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t replication, StreamRole role)
        : base_(mix(mix(seed ^ 0x6A09E667F3BCC909ULL) ^
                    mix(replication ^ 0xBB67AE8584CAA73BULL) ^
                    mix(static_cast<std::uint64_t>(role) ^ 0x3C6EF372FE94F82BULL))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix(base_ + counter_);
    }

    // Uniform on (0, 1): 53 random bits plus a half-ulp offset, so 0 and 1
    // are unreachable and the inverse CDF below is always defined.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double next_gaussian() { return normal_quantile(next_uniform()); }

    // Uniform integer on [0, n): scaling of the 53-bit uniform.  The modulo
    // bias is below n * 2^-53 and irrelevant at the sample sizes used here.
    std::uint64_t next_index(std::uint64_t n) {
        auto idx = static_cast<std::uint64_t>(next_uniform() * static_cast<double>(n));
        return idx >= n ? n - 1 : idx;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace dwad

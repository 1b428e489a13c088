#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rmdp {

/**
 * Seeded random source with hand-rolled value mappings.
 *
 * The standard distributions (uniform_real_distribution etc.) are
 * implementation-defined, so identical seeds could produce different
 * instances under a different standard library. Mapping raw mt19937_64
 * draws ourselves keeps generated instances bit-identical for a given seed.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw in [0, 1) with 53 random mantissa bits.
    double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

    /// Exponential(1) variate via inverse CDF.
    double exp1() {
        double u = uniform01();
        return -std::log1p(-u);
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling over the largest multiple of n to avoid modulo bias.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    /// First k entries of a partial Fisher-Yates shuffle of {0, .., n-1}.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i)
            pool[i] = i;
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace rmdp

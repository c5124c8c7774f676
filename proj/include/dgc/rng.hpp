#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dgc {

// Seeded generator with explicit output mappings. std::mt19937_64's raw
// stream is pinned by the standard, but the std distributions are not, so
// uniform/normal/integer draws are implemented here to keep every seeded
// artifact reproducible across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n) by masked rejection.
    uint64_t uniform_int(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t mask = ~uint64_t{0};
        mask >>= __builtin_clzll(n - 1 | 1);
        uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= n);
        return v;
    }

    // Standard normal via Box-Muller; one spare is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // First k of a seeded Fisher-Yates shuffle of [0, n); unique indices.
    std::vector<int32_t> sample_without_replacement(int32_t n, int32_t k) {
        std::vector<int32_t> pool(static_cast<std::size_t>(n));
        for (int32_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        if (k > n) k = n;
        for (int32_t i = 0; i < k; ++i) {
            const auto j = static_cast<int32_t>(
                i + static_cast<int32_t>(uniform_int(static_cast<uint64_t>(n - i))));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        return pool;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dgc

#ifndef CCL_RNG_HPP_
#define CCL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <ccl/errors.hpp>

namespace ccl {

/// splitmix64 step; used to derive independent seed streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic sub-seed for stream `stream` of a base seed. Used so that
/// per-stage / per-purpose random streams never overlap.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x517cc1b727220a95ULL * (stream + 1));
    return splitmix64(s);
}

/// mt19937_64 with explicitly-coded distributions. std:: distributions are
/// implementation-defined, which would make generated datasets differ across
/// standard libraries; every draw here is pinned to a fixed algorithm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection; unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw InvalidParameterError("uniform_index: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via the Marsaglia polar method (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Sample `k` distinct indices from [0, n) uniformly, by partial
    /// Fisher-Yates. Result order is the shuffle order.
    std::vector<std::uint64_t> sample_indices(std::uint64_t n, std::uint64_t k) {
        if (k > n) throw InvalidParameterError("sample_indices: k exceeds n");
        std::vector<std::uint64_t> pool(n);
        for (std::uint64_t i = 0; i < n; ++i) pool[i] = i;
        for (std::uint64_t i = 0; i < k; ++i) {
            const std::uint64_t j = i + uniform_index(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ccl

#endif // CCL_RNG_HPP_

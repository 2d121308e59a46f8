#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace smx {

// splitmix64 finalizer; used to decorrelate chunk seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the k-th chunk of a sampling run. Every Monte Carlo routine in this
// library draws its samples in fixed-size chunks, with chunk k seeded by
// chunk_seed(seed, k); merged results are therefore identical no matter how
// the chunks are scheduled.
inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t k) {
    return mix64(mix64(seed) ^ (k + 1));
}

// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
// standard, and all conversions below avoid std::*_distribution (whose
// algorithms are implementation-defined), so streams are portable.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n); n must be positive. Unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    void fill_uniform(std::span<double> out, double lo, double hi) {
        for (double& v : out) v = uniform(lo, hi);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace smx

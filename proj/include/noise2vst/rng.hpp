#pragma once

#include <cstdint>
#include <random>

namespace n2v {

// Deterministic random source. Every random choice in the toolkit flows
// through one of these, seeded with a 64-bit integer, so a seed fully
// determines outputs bit-for-bit. The engine is std::mt19937_64, whose
// sequence is fixed by the standard; the distributions are implemented
// below because the std::* distribution objects are not portable across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, bound), unbiased via rejection.
    std::uint64_t uniform_int(std::uint64_t bound);

    bool bernoulli(double p = 0.5) { return uniform() < p; }

    // Standard normal via Box-Muller (sine branch discarded).
    double normal();

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    // Exact Poisson sample: sequential inversion for small rates,
    // transformed rejection (PTRS) for large ones.
    std::uint64_t poisson(double rate);

private:
    std::mt19937_64 engine_;
};

}  // namespace n2v

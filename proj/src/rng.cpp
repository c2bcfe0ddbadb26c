#include "noise2vst/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace n2v {

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("uniform_int: bound must be positive");
    // Reject draws below 2^64 mod bound so the remainder is unbiased.
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold)
            return r % bound;
    }
}

double Rng::normal() {
    // u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

std::uint64_t poisson_inversion(Rng& rng, double rate) {
    // Knuth's product-of-uniforms method, O(rate) draws.
    const double limit = std::exp(-rate);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform();
    } while (p > limit);
    return k - 1;
}

// Hoermann's PTRS transformed-rejection sampler, exact for rate >= 10.
std::uint64_t poisson_ptrs(Rng& rng, double rate) {
    const double log_rate = std::log(rate);
    const double b = 0.931 + 2.53 * std::sqrt(rate);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r)
            return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_rate - rate - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(kf);
    }
}

}  // namespace

std::uint64_t Rng::poisson(double rate) {
    if (!(rate >= 0.0))
        throw std::invalid_argument("poisson: rate must be >= 0");
    if (rate == 0.0)
        return 0;
    if (rate < 30.0)
        return poisson_inversion(*this, rate);
    return poisson_ptrs(*this, rate);
}

}  // namespace n2v

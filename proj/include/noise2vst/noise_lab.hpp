#pragma once

#include <functional>
#include <string>
#include <vector>

#include "noise2vst/denoiser.hpp"
#include "noise2vst/image.hpp"
#include "noise2vst/rng.hpp"

namespace n2v {

// Poisson-Gaussian observation model z = a * P(s/a) + N(0, sqrt(b)), with
// per-pixel variance a*s + b, or plain homoscedastic Gaussian noise.
struct NoiseModel {
    enum class Kind { PoissonGauss, Gaussian };
    Kind kind = Kind::Gaussian;
    double a = 0.0;
    double b = 0.0;
    double sigma = 0.0;

    static NoiseModel poisson_gauss(double a, double b);
    static NoiseModel gaussian(double sigma);
    // Conventional lambda parameterization: z = P(lambda * s) / lambda,
    // i.e. a = 1/lambda, b = 0.
    static NoiseModel poisson_lambda(double lambda);
};

ImageBuffer synthesize(const ImageBuffer& clean, const NoiseModel& m, Rng& rng);

// Generalized Anscombe transform; output noise is approximately unit-std
// Gaussian for Poisson-Gaussian inputs.
double gat_forward(double z, double a, double b);

enum class GatInverseMode { Algebraic, Unbiased };

// Algebraic inverse, or the closed-form approximation of the exact
// unbiased inverse.
double gat_inverse(double w, double a, double b, GatInverseMode mode);

// Stabilize, rescale so the denoiser sees noise std sigma_d, denoise, undo
// the rescale, and invert (unbiased by default).
ImageBuffer gat_pipeline(const ImageBuffer& z, double a, double b, const Denoiser& d,
                         double sigma_d, GatInverseMode mode = GatInverseMode::Unbiased);

struct StabilizationBin {
    double center = 0.0;
    double stddev = 0.0;
    long count = 0;
};

struct StabilizationProfile {
    std::vector<StabilizationBin> bins;
    double ratio = 0.0;       // max bin std / min bin std
    bool dropped_bins = false;
};

// Bins pixels by clean intensity and measures the empirical std of
// transform(z) per bin over `draws` independent noise draws. Empty bins
// are dropped and flagged.
StabilizationProfile stabilization_profile(const std::function<double(double)>& transform,
                                           const ImageBuffer& clean, const NoiseModel& m,
                                           int bins, int draws, Rng& rng);

std::string profile_to_csv(const StabilizationProfile& profile);

}  // namespace n2v

#include "noise2vst/noise_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace n2v {

NoiseModel NoiseModel::poisson_gauss(double a, double b) {
    if (!(a > 0.0) || !(b >= 0.0))
        throw std::invalid_argument("NoiseModel: need a > 0 and b >= 0");
    NoiseModel m;
    m.kind = Kind::PoissonGauss;
    m.a = a;
    m.b = b;
    return m;
}

NoiseModel NoiseModel::gaussian(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("NoiseModel: need sigma > 0");
    NoiseModel m;
    m.kind = Kind::Gaussian;
    m.sigma = sigma;
    return m;
}

NoiseModel NoiseModel::poisson_lambda(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("NoiseModel: need lambda > 0");
    return poisson_gauss(1.0 / lambda, 0.0);
}

ImageBuffer synthesize(const ImageBuffer& clean, const NoiseModel& m, Rng& rng) {
    ImageBuffer out = clean;
    if (m.kind == NoiseModel::Kind::Gaussian) {
        for (double& v : out.data)
            v += rng.normal(0.0, m.sigma);
    } else {
        const double noise_std = std::sqrt(m.b);
        for (double& v : out.data) {
            if (v < 0.0)
                throw std::invalid_argument("synthesize: negative clean pixel under a Poisson model");
            double z = m.a * static_cast<double>(rng.poisson(v / m.a));
            if (m.b > 0.0)
                z += rng.normal(0.0, noise_std);
            v = z;
        }
    }
    check_finite(out, "synthesize");
    return out;
}

double gat_forward(double z, double a, double b) {
    const double radicand = a * z + 0.375 * a * a + b;
    if (radicand <= 0.0)
        return 0.0;
    return 2.0 / a * std::sqrt(radicand);
}

double gat_inverse(double w, double a, double b, GatInverseMode mode) {
    if (mode == GatInverseMode::Algebraic) {
        const double half = a * w / 2.0;
        return (half * half - 0.375 * a * a - b) / a;
    }
    if (!(w > 0.0))
        throw std::invalid_argument("gat_inverse: unbiased mode needs w > 0");
    const double s32 = std::sqrt(1.5);
    return a * (0.25 * w * w - 0.125 + 0.25 * s32 / w - 1.375 / (w * w) +
                0.625 * s32 / (w * w * w) - b / (a * a));
}

ImageBuffer gat_pipeline(const ImageBuffer& z, double a, double b, const Denoiser& d,
                         double sigma_d, GatInverseMode mode) {
    if (!(a > 0.0) || !(b >= 0.0))
        throw std::invalid_argument("gat_pipeline: need a > 0 and b >= 0");
    if (!(sigma_d > 0.0))
        throw std::invalid_argument("gat_pipeline: need sigma_d > 0");
    // GAT output noise has std ~1; bring it to the denoiser's expected level.
    ImageBuffer stabilized = z;
    for (double& v : stabilized.data)
        v = gat_forward(v, a, b) * sigma_d;
    ImageBuffer denoised = d.apply(stabilized, sigma_d);
    // The unbiased series blows up as w -> 0+; denoiser outputs below the
    // zero-intensity level (where the series vanishes) are floored there.
    const double w_floor = 2.0 * std::sqrt(0.375 + b / (a * a));
    for (double& v : denoised.data) {
        double w = v / sigma_d;
        if (mode == GatInverseMode::Unbiased)
            w = std::max(w, w_floor);
        v = gat_inverse(w, a, b, mode);
    }
    check_finite(denoised, "gat_pipeline");
    return denoised;
}

StabilizationProfile stabilization_profile(const std::function<double(double)>& transform,
                                           const ImageBuffer& clean, const NoiseModel& m,
                                           int bins, int draws, Rng& rng) {
    if (bins < 2)
        throw std::invalid_argument("stabilization_profile: need at least 2 bins");
    if (draws < 2)
        throw std::invalid_argument("stabilization_profile: need at least 2 draws");
    const double lo = min_value(clean);
    const double hi = max_value(clean);
    if (!(hi > lo))
        throw std::invalid_argument("stabilization_profile: clean image must span at least 2 bins");
    const double bin_width = (hi - lo) / bins;

    // pixel -> bin assignment from the clean image
    std::vector<int> bin_of(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) {
        int b = static_cast<int>((clean.data[i] - lo) / bin_width);
        bin_of[i] = std::clamp(b, 0, bins - 1);
    }

    // streaming moments per bin
    std::vector<double> sum(bins, 0.0), sumsq(bins, 0.0);
    std::vector<long> count(bins, 0);
    for (int t = 0; t < draws; ++t) {
        const ImageBuffer noisy = synthesize(clean, m, rng);
        for (std::size_t i = 0; i < noisy.size(); ++i) {
            const double v = transform(noisy.data[i]);
            sum[bin_of[i]] += v;
            sumsq[bin_of[i]] += v * v;
            ++count[bin_of[i]];
        }
    }

    StabilizationProfile profile;
    double min_std = std::numeric_limits<double>::infinity();
    double max_std = 0.0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] < 2) {
            profile.dropped_bins = true;
            continue;
        }
        const double mean = sum[b] / count[b];
        const double var = std::max(sumsq[b] / count[b] - mean * mean, 0.0);
        StabilizationBin entry;
        entry.center = lo + (b + 0.5) * bin_width;
        entry.stddev = std::sqrt(var * count[b] / (count[b] - 1));
        entry.count = count[b];
        profile.bins.push_back(entry);
        min_std = std::min(min_std, entry.stddev);
        max_std = std::max(max_std, entry.stddev);
    }
    if (profile.bins.size() < 2)
        throw std::invalid_argument("stabilization_profile: clean image must span at least 2 bins");
    profile.ratio = max_std / min_std;
    return profile;
}

std::string profile_to_csv(const StabilizationProfile& profile) {
    std::string out = "bin_center,std,count\n";
    char line[128];
    for (const StabilizationBin& b : profile.bins) {
        std::snprintf(line, sizeof(line), "%.9g,%.9g,%ld\n", b.center, b.stddev, b.count);
        out += line;
    }
    return out;
}

}  // namespace n2v

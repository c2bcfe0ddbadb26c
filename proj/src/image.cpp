#include "noise2vst/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace n2v {

void check_finite(const ImageBuffer& img, const char* what) {
    for (double v : img.data) {
        if (!std::isfinite(v))
            throw std::runtime_error(std::string(what) + ": non-finite sample");
    }
}

double min_value(const ImageBuffer& img) {
    return *std::min_element(img.data.begin(), img.data.end());
}

double max_value(const ImageBuffer& img) {
    return *std::max_element(img.data.begin(), img.data.end());
}

namespace {

ImageBuffer flip_horizontal(const ImageBuffer& in) {
    ImageBuffer out(in.height, in.width, in.channels);
    for (int r = 0; r < in.height; ++r)
        for (int c = 0; c < in.width; ++c)
            for (int ch = 0; ch < in.channels; ++ch)
                out.at(r, c, ch) = in.at(r, in.width - 1 - c, ch);
    return out;
}

ImageBuffer flip_vertical(const ImageBuffer& in) {
    ImageBuffer out(in.height, in.width, in.channels);
    for (int r = 0; r < in.height; ++r)
        for (int c = 0; c < in.width; ++c)
            for (int ch = 0; ch < in.channels; ++ch)
                out.at(r, c, ch) = in.at(in.height - 1 - r, c, ch);
    return out;
}

// One counterclockwise quarter turn of a square image.
ImageBuffer rot90_ccw(const ImageBuffer& in) {
    ImageBuffer out(in.width, in.height, in.channels);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c)
            for (int ch = 0; ch < in.channels; ++ch)
                out.at(r, c, ch) = in.at(c, in.width - 1 - r, ch);
    return out;
}

}  // namespace

ImageBuffer extract_patch(const ImageBuffer& img, int row, int col, int side,
                          const Augmentation& aug) {
    if (row < 0 || col < 0 || row + side > img.height || col + side > img.width)
        throw std::invalid_argument("extract_patch: crop outside image");
    ImageBuffer patch(side, side, img.channels);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                patch.at(r, c, ch) = img.at(row + r, col + c, ch);
    if (aug.flip_h) patch = flip_horizontal(patch);
    if (aug.flip_v) patch = flip_vertical(patch);
    for (int k = 0; k < (aug.rot90 & 3); ++k) patch = rot90_ccw(patch);
    return patch;
}

PatchBatch sample_training_batch(const ImageBuffer& img, Rng& rng, int patch, int batch) {
    if (img.height < 1 || img.width < 1)
        throw std::invalid_argument("sample_training_batch: empty image");
    const int side = std::min({patch, img.height, img.width});
    PatchBatch out;
    out.patches.reserve(batch);
    out.source_offsets.reserve(batch);
    out.augmentations.reserve(batch);
    for (int i = 0; i < batch; ++i) {
        const int row = static_cast<int>(rng.uniform_int(img.height - side + 1));
        const int col = static_cast<int>(rng.uniform_int(img.width - side + 1));
        Augmentation aug;
        aug.flip_h = rng.bernoulli();
        aug.flip_v = rng.bernoulli();
        aug.rot90 = static_cast<int>(rng.uniform_int(4));
        out.patches.push_back(extract_patch(img, row, col, side, aug));
        out.source_offsets.emplace_back(row, col);
        out.augmentations.push_back(aug);
    }
    return out;
}

double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak) {
    if (!a.same_shape(b))
        throw std::invalid_argument("psnr: shape mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(a.data.size());
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("ssim: shape mismatch");
    constexpr int kWindow = 11;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01;  // (K1 * peak)^2, peak = 1
    constexpr double kC2 = 0.03 * 0.03;
    if (a.height < kWindow || a.width < kWindow)
        throw std::invalid_argument("ssim: image smaller than 11x11 window");

    double kernel[kWindow][kWindow];
    double ksum = 0.0;
    for (int i = 0; i < kWindow; ++i)
        for (int j = 0; j < kWindow; ++j) {
            const double di = i - (kWindow - 1) / 2.0;
            const double dj = j - (kWindow - 1) / 2.0;
            kernel[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
            ksum += kernel[i][j];
        }
    for (int i = 0; i < kWindow; ++i)
        for (int j = 0; j < kWindow; ++j) kernel[i][j] /= ksum;

    // Windows fully inside the image; no padding.
    double total = 0.0;
    long windows = 0;
    for (int ch = 0; ch < a.channels; ++ch) {
        for (int r = 0; r + kWindow <= a.height; ++r) {
            for (int c = 0; c + kWindow <= a.width; ++c) {
                double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
                for (int i = 0; i < kWindow; ++i)
                    for (int j = 0; j < kWindow; ++j) {
                        const double w = kernel[i][j];
                        const double x = a.at(r + i, c + j, ch);
                        const double y = b.at(r + i, c + j, ch);
                        mx += w * x;
                        my += w * y;
                        mxx += w * x * x;
                        myy += w * y * y;
                        mxy += w * x * y;
                    }
                const double vx = mxx - mx * mx;
                const double vy = myy - my * my;
                const double cov = mxy - mx * my;
                const double val = ((2 * mx * my + kC1) * (2 * cov + kC2)) /
                                   ((mx * mx + my * my + kC1) * (vx + vy + kC2));
                total += val;
                ++windows;
            }
        }
    }
    return total / static_cast<double>(windows);
}

}  // namespace n2v

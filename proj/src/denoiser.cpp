#include "noise2vst/denoiser.hpp"

#include <algorithm>
#include <cmath>

namespace n2v {

namespace {

class IdentityDenoiser final : public Denoiser {
public:
    ImageBuffer apply(const ImageBuffer& img, double sigma) const override {
        if (!(sigma > 0.0))
            throw std::invalid_argument("denoiser: sigma must be positive");
        return img;
    }
    ImageBuffer vjp(const ImageBuffer& img, double, const ImageBuffer& cotangent) const override {
        if (!img.same_shape(cotangent))
            throw std::invalid_argument("vjp: cotangent shape mismatch");
        return cotangent;
    }
    std::string name() const override { return "identity"; }
};

class GaussianBlurDenoiser final : public Denoiser {
public:
    explicit GaussianBlurDenoiser(double sigma_blur) : sigma_blur_(sigma_blur) {
        if (!(sigma_blur > 0.0))
            throw std::invalid_argument("gaussian_blur: sigma_blur must be positive");
        const int radius = static_cast<int>(std::ceil(3.0 * sigma_blur));
        kernel_.resize(2 * radius + 1);
        double sum = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            kernel_[i + radius] = std::exp(-0.5 * i * i / (sigma_blur * sigma_blur));
            sum += kernel_[i + radius];
        }
        for (double& k : kernel_) k /= sum;
    }

    ImageBuffer apply(const ImageBuffer& img, double sigma) const override {
        if (!(sigma > 0.0))
            throw std::invalid_argument("denoiser: sigma must be positive");
        return convolve_cols(convolve_rows(img));
    }

    // apply = Hrows then Hcols, each a clamped gather; the adjoint runs the
    // scatter versions in reverse order. Replicate borders fold weight back
    // onto edge pixels, so the operator is not exactly symmetric there.
    ImageBuffer vjp(const ImageBuffer& img, double, const ImageBuffer& cotangent) const override {
        if (!img.same_shape(cotangent))
            throw std::invalid_argument("vjp: cotangent shape mismatch");
        return adjoint_rows(adjoint_cols(cotangent));
    }

    std::string name() const override { return "gaussian_blur"; }

private:
    int radius() const { return (static_cast<int>(kernel_.size()) - 1) / 2; }

    ImageBuffer convolve_rows(const ImageBuffer& in) const {
        const int rad = radius();
        ImageBuffer out(in.height, in.width, in.channels);
        for (int r = 0; r < in.height; ++r)
            for (int c = 0; c < in.width; ++c)
                for (int ch = 0; ch < in.channels; ++ch) {
                    double acc = 0.0;
                    for (int o = -rad; o <= rad; ++o) {
                        const int cc = std::clamp(c + o, 0, in.width - 1);
                        acc += kernel_[o + rad] * in.at(r, cc, ch);
                    }
                    out.at(r, c, ch) = acc;
                }
        return out;
    }

    ImageBuffer convolve_cols(const ImageBuffer& in) const {
        const int rad = radius();
        ImageBuffer out(in.height, in.width, in.channels);
        for (int r = 0; r < in.height; ++r)
            for (int c = 0; c < in.width; ++c)
                for (int ch = 0; ch < in.channels; ++ch) {
                    double acc = 0.0;
                    for (int o = -rad; o <= rad; ++o) {
                        const int rr = std::clamp(r + o, 0, in.height - 1);
                        acc += kernel_[o + rad] * in.at(rr, c, ch);
                    }
                    out.at(r, c, ch) = acc;
                }
        return out;
    }

    ImageBuffer adjoint_rows(const ImageBuffer& in) const {
        const int rad = radius();
        ImageBuffer out(in.height, in.width, in.channels, 0.0);
        for (int r = 0; r < in.height; ++r)
            for (int c = 0; c < in.width; ++c)
                for (int ch = 0; ch < in.channels; ++ch) {
                    const double v = in.at(r, c, ch);
                    for (int o = -rad; o <= rad; ++o) {
                        const int cc = std::clamp(c + o, 0, in.width - 1);
                        out.at(r, cc, ch) += kernel_[o + rad] * v;
                    }
                }
        return out;
    }

    ImageBuffer adjoint_cols(const ImageBuffer& in) const {
        const int rad = radius();
        ImageBuffer out(in.height, in.width, in.channels, 0.0);
        for (int r = 0; r < in.height; ++r)
            for (int c = 0; c < in.width; ++c)
                for (int ch = 0; ch < in.channels; ++ch) {
                    const double v = in.at(r, c, ch);
                    for (int o = -rad; o <= rad; ++o) {
                        const int rr = std::clamp(r + o, 0, in.height - 1);
                        out.at(rr, c, ch) += kernel_[o + rad] * v;
                    }
                }
        return out;
    }

    double sigma_blur_;
    std::vector<double> kernel_;
};

}  // namespace

std::unique_ptr<Denoiser> make_identity_denoiser() {
    return std::make_unique<IdentityDenoiser>();
}

std::unique_ptr<Denoiser> make_gaussian_blur_denoiser(double sigma_blur) {
    return std::make_unique<GaussianBlurDenoiser>(sigma_blur);
}

}  // namespace n2v

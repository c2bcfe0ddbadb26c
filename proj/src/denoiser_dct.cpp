#include <algorithm>
#include <cmath>
#include <vector>

#include "noise2vst/denoiser.hpp"

namespace n2v {

namespace {

// Orthonormal DCT-II basis: row k holds c_k * cos(pi * (2i+1) * k / (2p)).
std::vector<double> dct_matrix(int p) {
    std::vector<double> m(static_cast<std::size_t>(p) * p);
    for (int k = 0; k < p; ++k) {
        const double ck = k == 0 ? std::sqrt(1.0 / p) : std::sqrt(2.0 / p);
        for (int i = 0; i < p; ++i)
            m[k * p + i] = ck * std::cos(M_PI * (2 * i + 1) * k / (2.0 * p));
    }
    return m;
}

// Patch origins along one axis: the stride grid plus a tail origin so the
// last pixels are covered.
std::vector<int> coverage_origins(int dim, int patch, int stride) {
    std::vector<int> origins;
    for (int o = 0;; o += stride) {
        if (o + patch >= dim) {
            origins.push_back(dim - patch);
            break;
        }
        origins.push_back(o);
    }
    return origins;
}

class DctDenoiser final : public Denoiser {
public:
    DctDenoiser(int patch, int stride, double threshold_factor)
        : patch_(patch), stride_(stride), factor_(threshold_factor),
          basis_(dct_matrix(patch)) {
        if (patch < 2)
            throw std::invalid_argument("dct_threshold: patch must be >= 2");
        if (stride < 1)
            throw std::invalid_argument("dct_threshold: stride must be >= 1");
        if (threshold_factor < 0.0)
            throw std::invalid_argument("dct_threshold: threshold factor must be >= 0");
    }

    ImageBuffer apply(const ImageBuffer& img, double sigma) const override {
        if (!(sigma > 0.0))
            throw std::invalid_argument("denoiser: sigma must be positive");
        check_size(img);
        const double tau = factor_ * sigma;
        const auto rows = coverage_origins(img.height, patch_, stride_);
        const auto cols = coverage_origins(img.width, patch_, stride_);

        ImageBuffer sum(img.height, img.width, img.channels, 0.0);
        std::vector<double> count(img.pixel_count(), 0.0);
        std::vector<double> block(patch_ * patch_), coef(patch_ * patch_);
        for (int r0 : rows) {
            for (int c0 : cols) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    extract(img, r0, c0, ch, block);
                    dct2(block, coef);
                    soft_threshold(coef, tau);
                    idct2(coef, block);
                    scatter_add(sum, r0, c0, ch, block);
                }
                for (int r = 0; r < patch_; ++r)
                    for (int c = 0; c < patch_; ++c)
                        count[(r0 + r) * static_cast<std::size_t>(img.width) + c0 + c] += 1.0;
            }
        }
        ImageBuffer out = sum;
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c) {
                const double n = count[r * static_cast<std::size_t>(img.width) + c];
                for (int ch = 0; ch < img.channels; ++ch)
                    out.at(r, c, ch) /= n;
            }
        return out;
    }

    ImageBuffer vjp(const ImageBuffer& img, double sigma,
                    const ImageBuffer& cotangent) const override {
        if (!img.same_shape(cotangent))
            throw std::invalid_argument("vjp: cotangent shape mismatch");
        if (!(sigma > 0.0))
            throw std::invalid_argument("denoiser: sigma must be positive");
        check_size(img);
        const double tau = factor_ * sigma;
        const auto rows = coverage_origins(img.height, patch_, stride_);
        const auto cols = coverage_origins(img.width, patch_, stride_);

        // adjoint of the final averaging: divide the cotangent by coverage
        std::vector<double> count(img.pixel_count(), 0.0);
        for (int r0 : rows)
            for (int c0 : cols)
                for (int r = 0; r < patch_; ++r)
                    for (int c = 0; c < patch_; ++c)
                        count[(r0 + r) * static_cast<std::size_t>(img.width) + c0 + c] += 1.0;
        ImageBuffer weighted = cotangent;
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                for (int ch = 0; ch < img.channels; ++ch)
                    weighted.at(r, c, ch) /= count[r * static_cast<std::size_t>(img.width) + c];

        // per patch: adjoint(idct) = dct, pass-through mask, adjoint(dct) = idct
        ImageBuffer grad(img.height, img.width, img.channels, 0.0);
        std::vector<double> block(patch_ * patch_), coef(patch_ * patch_);
        std::vector<double> cblock(patch_ * patch_), ccoef(patch_ * patch_);
        for (int r0 : rows) {
            for (int c0 : cols) {
                for (int ch = 0; ch < img.channels; ++ch) {
                    extract(img, r0, c0, ch, block);
                    dct2(block, coef);  // recompute the forward mask
                    extract(weighted, r0, c0, ch, cblock);
                    dct2(cblock, ccoef);
                    for (int i = 0; i < patch_ * patch_; ++i) {
                        const bool pass = i == 0 || std::fabs(coef[i]) > tau;
                        if (!pass) ccoef[i] = 0.0;
                    }
                    idct2(ccoef, cblock);
                    scatter_add(grad, r0, c0, ch, cblock);
                }
            }
        }
        return grad;
    }

    std::string name() const override { return "dct_threshold"; }

private:
    void check_size(const ImageBuffer& img) const {
        if (img.height < patch_ || img.width < patch_)
            throw std::invalid_argument("dct_threshold: image smaller than the patch");
    }

    void extract(const ImageBuffer& img, int r0, int c0, int ch,
                 std::vector<double>& block) const {
        for (int r = 0; r < patch_; ++r)
            for (int c = 0; c < patch_; ++c)
                block[r * patch_ + c] = img.at(r0 + r, c0 + c, ch);
    }

    void scatter_add(ImageBuffer& img, int r0, int c0, int ch,
                     const std::vector<double>& block) const {
        for (int r = 0; r < patch_; ++r)
            for (int c = 0; c < patch_; ++c)
                img.at(r0 + r, c0 + c, ch) += block[r * patch_ + c];
    }

    // out = C * in * C^T
    void dct2(const std::vector<double>& in, std::vector<double>& out) const {
        transform(in, out, /*transpose_basis=*/false);
    }

    // out = C^T * in * C
    void idct2(const std::vector<double>& in, std::vector<double>& out) const {
        transform(in, out, /*transpose_basis=*/true);
    }

    void transform(const std::vector<double>& in, std::vector<double>& out,
                   bool transpose_basis) const {
        const int p = patch_;
        std::vector<double> tmp(p * p, 0.0);
        // tmp = B * in   (B = C or C^T)
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c) {
                double acc = 0.0;
                for (int k = 0; k < p; ++k) {
                    const double b = transpose_basis ? basis_[k * p + r] : basis_[r * p + k];
                    acc += b * in[k * p + c];
                }
                tmp[r * p + c] = acc;
            }
        // out = tmp * B^T
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c) {
                double acc = 0.0;
                for (int k = 0; k < p; ++k) {
                    const double b = transpose_basis ? basis_[k * p + c] : basis_[c * p + k];
                    acc += tmp[r * p + k] * b;
                }
                out[r * p + c] = acc;
            }
    }

    void soft_threshold(std::vector<double>& coef, double tau) const {
        // index 0 is the DC coefficient, left untouched
        for (std::size_t i = 1; i < coef.size(); ++i) {
            const double d = coef[i];
            const double m = std::fabs(d) - tau;
            coef[i] = m > 0.0 ? (d > 0.0 ? m : -m) : 0.0;
        }
    }

    int patch_;
    int stride_;
    double factor_;
    std::vector<double> basis_;
};

}  // namespace

std::unique_ptr<Denoiser> make_dct_denoiser(int patch, int stride, double threshold_factor) {
    return std::make_unique<DctDenoiser>(patch, stride, threshold_factor);
}

}  // namespace n2v

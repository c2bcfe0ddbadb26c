#pragma once

#include <memory>
#include <string>
#include <vector>

#include "noise2vst/image.hpp"

namespace n2v {

// A frozen Gaussian denoiser: a deterministic forward map plus the exact
// vector-Jacobian product of its input linearization. `sigma` is the noise
// standard deviation the denoiser should assume, in [0,1] units.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual ImageBuffer apply(const ImageBuffer& img, double sigma) const = 0;

    // J^T * cotangent with J = d apply / d img evaluated at img.
    virtual ImageBuffer vjp(const ImageBuffer& img, double sigma,
                            const ImageBuffer& cotangent) const = 0;

    virtual std::string name() const = 0;
};

std::unique_ptr<Denoiser> make_identity_denoiser();

// Separable Gaussian convolution, kernel radius ceil(3 * sigma_blur),
// replicate borders. Ignores the per-call sigma.
std::unique_ptr<Denoiser> make_gaussian_blur_denoiser(double sigma_blur);

// Sliding-window DCT denoiser: orthonormal 8x8 DCT-II per patch and
// channel, soft-threshold of the AC coefficients at threshold_factor*sigma
// (DC untouched), overlapping patches on the stride grid averaged with
// per-pixel coverage counts.
std::unique_ptr<Denoiser> make_dct_denoiser(int patch = 8, int stride = 4,
                                            double threshold_factor = 3.0);

struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;  // odd side length
    std::vector<float> weights;  // out * in * k * k, row-major
    std::vector<float> bias;     // out
};

struct ConvNetWeights {
    std::vector<ConvLayer> layers;
    // When set, sigma is appended to the input as a constant extra channel.
    bool noise_map_input = false;
};

// Validates layer chaining and finiteness; throws FormatError on failure.
void validate_convnet(const ConvNetWeights& w);

// Plain sequential convolutions (replicate padding) with ReLU between
// layers and none after the last; the output is the denoised image.
std::unique_ptr<Denoiser> make_convnet_denoiser(ConvNetWeights w);

// N2VCNN1 weight container.
ConvNetWeights read_convnet_weights(const std::string& path);
void write_convnet_weights(const ConvNetWeights& w, const std::string& path);
std::unique_ptr<Denoiser> load_convnet(const std::string& path);

}  // namespace n2v

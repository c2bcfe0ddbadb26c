#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noise2vst/rng.hpp"

namespace n2v {

// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File was read but its contents are not a supported image.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense H x W x C grid of real-valued samples, row-major and
// channel-interleaved. Canonical range is [0,1] but values are never
// clamped inside the pipeline; clamping happens only when quantizing to
// an integer file format.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<double> data;

    ImageBuffer() = default;
    ImageBuffer(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {
        if (h <= 0 || w <= 0 || (c != 1 && c != 3 && c != 4))
            throw std::invalid_argument("ImageBuffer: bad shape");
    }

    double& at(int r, int c, int ch = 0) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch = 0) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    std::size_t size() const { return data.size(); }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * width;
    }
    bool same_shape(const ImageBuffer& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// Throws if any sample is NaN or infinite. `what` names the operation for
// the diagnostic.
void check_finite(const ImageBuffer& img, const char* what);

double min_value(const ImageBuffer& img);
double max_value(const ImageBuffer& img);

struct Augmentation {
    bool flip_h = false;   // mirror left-right
    bool flip_v = false;   // mirror top-bottom
    int rot90 = 0;         // counterclockwise quarter turns, 0..3
};

struct PatchBatch {
    std::vector<ImageBuffer> patches;
    std::vector<std::pair<int, int>> source_offsets;  // (row, col) crop origins
    std::vector<Augmentation> augmentations;
};

// --- file I/O -------------------------------------------------------------
//
// Supported formats: PNG (8/16-bit gray and RGB/RGBA), binary PGM/PPM, and
// the flat float container NPF1 (magic "N2VF", u32 height/width/channels,
// little-endian f32 samples). Integer formats are normalized by the file's
// peak value on load; NPF1 stores samples verbatim.

// `expected_range` overrides the divisor used to normalize integer samples;
// 0 means use the format's own peak (255, 65535, or the PNM maxval).
ImageBuffer load_image(const std::string& path, double expected_range = 0.0);

// Clamps to [0,1], scales to the requested peak, rounds half-to-even and
// writes PNG or PGM/PPM depending on the file extension. This is the only
// place in the toolkit where values are clamped. A path ending in .npf
// writes the NPF1 float container instead (no clamping, bit_depth ignored).
void save_image(const ImageBuffer& img, const std::string& path, int bit_depth = 8);

// Raw float NPF1 write, no clamping or quantization.
void save_npf(const ImageBuffer& img, const std::string& path);

// --- patch sampling -------------------------------------------------------

// Draws `batch` square patches of side min(patch, height, width) with
// uniformly random origins, then flips each horizontally/vertically with
// probability 1/2 and rotates by a uniform number of quarter turns, in that
// order. Pure function of (img, rng state, patch, batch).
PatchBatch sample_training_batch(const ImageBuffer& img, Rng& rng, int patch, int batch);

// Applies crop -> flips -> rotation; exposed for tests.
ImageBuffer extract_patch(const ImageBuffer& img, int row, int col, int side,
                          const Augmentation& aug);

// --- quality metrics --------------------------------------------------------

// 10*log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak = 1.0);

// Mean single-scale SSIM over an 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, peak 1; channels averaged. Throws if the image is
// smaller than the window.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace n2v

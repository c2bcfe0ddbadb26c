#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "noise2vst/denoiser.hpp"
#include "noise2vst/image.hpp"

namespace n2v {

// k x k grid of pixel classes; class (r0, c0) owns every pixel whose row
// and column are congruent to (r0, c0) mod k. With k >= 2 any two pixels
// of one class are at Chebyshev distance >= k, so no class pixel sits in
// another's 3x3 neighborhood.
struct Partition {
    int stride;

    explicit Partition(int k) : stride(k) {
        if (k < 2)
            throw std::invalid_argument("Partition: stride must be >= 2");
    }

    int class_count() const { return stride * stride; }
    std::pair<int, int> class_offset(int index) const {
        return {index / stride, index % stride};
    }
};

// Selects the full k^2-class assembly instead of a single class.
inline constexpr int kAllClasses = -1;

// Replaces each pixel with the average of its 8-neighborhood, zero center
// weight, replicate borders. Border taps that clamp back onto the center
// pixel are dropped and the weight renormalized, so the output at i never
// depends on the input at i.
ImageBuffer eta(const ImageBuffer& img);

// Adjoint of eta (it is linear).
ImageBuffer eta_adjoint(const ImageBuffer& cotangent);

struct BlindspotResult {
    ImageBuffer output;
    // One flag per spatial position, shared across channels; 1 where the
    // output is defined by the selected class(es).
    std::vector<std::uint8_t> mask;
};

// Blind-spot wrap of a denoiser: for each selected class J the input is
// replaced by eta(img) on J and left untouched elsewhere, the denoiser
// runs on that hybrid, and only the outputs at J are kept. With
// kAllClasses the k^2 single-class results tile the full image.
BlindspotResult apply_blindspot(const Denoiser& d, const ImageBuffer& img, double sigma,
                                const Partition& part, int class_index);

// Exact adjoint of apply_blindspot's linearization in img. The cotangent
// must be zero outside the class mask; the returned gradient at a pixel of
// the selected class is structurally zero.
ImageBuffer vjp_blindspot(const Denoiser& d, const ImageBuffer& img, double sigma,
                          const Partition& part, int class_index,
                          const ImageBuffer& cotangent);

}  // namespace n2v

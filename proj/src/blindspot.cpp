#include "noise2vst/blindspot.hpp"

#include <algorithm>

namespace n2v {

namespace {

constexpr int kOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                {0, 1},   {1, -1}, {1, 0},  {1, 1}};

// Builds the hybrid input of one class: eta values on J, original values
// elsewhere.
ImageBuffer hybrid_input(const ImageBuffer& img, const ImageBuffer& eta_img,
                         const Partition& part, int class_index) {
    const auto [r0, c0] = part.class_offset(class_index);
    ImageBuffer hybrid = img;
    for (int r = r0; r < img.height; r += part.stride)
        for (int c = c0; c < img.width; c += part.stride)
            for (int ch = 0; ch < img.channels; ++ch)
                hybrid.at(r, c, ch) = eta_img.at(r, c, ch);
    return hybrid;
}

}  // namespace

ImageBuffer eta(const ImageBuffer& img) {
    ImageBuffer out(img.height, img.width, img.channels);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            int taps = 0;
            for (const auto& o : kOffsets) {
                const int rr = std::clamp(r + o[0], 0, img.height - 1);
                const int cc = std::clamp(c + o[1], 0, img.width - 1);
                if (rr == r && cc == c) continue;  // clamped onto the center
                ++taps;
            }
            for (int ch = 0; ch < img.channels; ++ch) {
                double acc = 0.0;
                for (const auto& o : kOffsets) {
                    const int rr = std::clamp(r + o[0], 0, img.height - 1);
                    const int cc = std::clamp(c + o[1], 0, img.width - 1);
                    if (rr == r && cc == c) continue;
                    acc += img.at(rr, cc, ch);
                }
                out.at(r, c, ch) = acc / taps;
            }
        }
    }
    return out;
}

ImageBuffer eta_adjoint(const ImageBuffer& cotangent) {
    const ImageBuffer& c = cotangent;
    ImageBuffer out(c.height, c.width, c.channels, 0.0);
    for (int r = 0; r < c.height; ++r) {
        for (int col = 0; col < c.width; ++col) {
            int taps = 0;
            for (const auto& o : kOffsets) {
                const int rr = std::clamp(r + o[0], 0, c.height - 1);
                const int cc = std::clamp(col + o[1], 0, c.width - 1);
                if (rr == r && cc == col) continue;
                ++taps;
            }
            for (int ch = 0; ch < c.channels; ++ch) {
                const double v = c.at(r, col, ch) / taps;
                if (v == 0.0) continue;
                for (const auto& o : kOffsets) {
                    const int rr = std::clamp(r + o[0], 0, c.height - 1);
                    const int cc = std::clamp(col + o[1], 0, c.width - 1);
                    if (rr == r && cc == col) continue;
                    out.at(rr, cc, ch) += v;
                }
            }
        }
    }
    return out;
}

BlindspotResult apply_blindspot(const Denoiser& d, const ImageBuffer& img, double sigma,
                                const Partition& part, int class_index) {
    const ImageBuffer eta_img = eta(img);
    BlindspotResult result;
    result.output = ImageBuffer(img.height, img.width, img.channels, 0.0);
    result.mask.assign(img.pixel_count(), 0);

    const auto run_class = [&](int index) {
        const auto [r0, c0] = part.class_offset(index);
        const ImageBuffer hybrid = hybrid_input(img, eta_img, part, index);
        const ImageBuffer denoised = d.apply(hybrid, sigma);
        for (int r = r0; r < img.height; r += part.stride)
            for (int c = c0; c < img.width; c += part.stride) {
                for (int ch = 0; ch < img.channels; ++ch)
                    result.output.at(r, c, ch) = denoised.at(r, c, ch);
                result.mask[r * static_cast<std::size_t>(img.width) + c] = 1;
            }
    };

    if (class_index == kAllClasses) {
        for (int index = 0; index < part.class_count(); ++index)
            run_class(index);
    } else {
        run_class(class_index);
    }
    return result;
}

ImageBuffer vjp_blindspot(const Denoiser& d, const ImageBuffer& img, double sigma,
                          const Partition& part, int class_index,
                          const ImageBuffer& cotangent) {
    if (!img.same_shape(cotangent))
        throw std::invalid_argument("vjp_blindspot: cotangent shape mismatch");
    const ImageBuffer eta_img = eta(img);
    ImageBuffer grad(img.height, img.width, img.channels, 0.0);

    const auto run_class = [&](int index) {
        const auto [r0, c0] = part.class_offset(index);
        const ImageBuffer hybrid = hybrid_input(img, eta_img, part, index);

        // keep only this class's cotangent
        ImageBuffer masked(img.height, img.width, img.channels, 0.0);
        for (int r = r0; r < img.height; r += part.stride)
            for (int c = c0; c < img.width; c += part.stride)
                for (int ch = 0; ch < img.channels; ++ch)
                    masked.at(r, c, ch) = cotangent.at(r, c, ch);

        const ImageBuffer g_hybrid = d.vjp(hybrid, sigma, masked);

        // split between the eta path (on J) and the pass-through path
        ImageBuffer g_eta(img.height, img.width, img.channels, 0.0);
        ImageBuffer g_pass = g_hybrid;
        for (int r = r0; r < img.height; r += part.stride)
            for (int c = c0; c < img.width; c += part.stride)
                for (int ch = 0; ch < img.channels; ++ch) {
                    g_eta.at(r, c, ch) = g_hybrid.at(r, c, ch);
                    g_pass.at(r, c, ch) = 0.0;
                }
        const ImageBuffer g_from_eta = eta_adjoint(g_eta);
        for (std::size_t i = 0; i < grad.data.size(); ++i)
            grad.data[i] += g_pass.data[i] + g_from_eta.data[i];
    };

    if (class_index == kAllClasses) {
        for (int index = 0; index < part.class_count(); ++index)
            run_class(index);
    } else {
        run_class(class_index);
    }
    return grad;
}

}  // namespace n2v

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "noise2vst/denoiser.hpp"

namespace n2v {

namespace {

// Planar intermediate activations; channel counts here are unconstrained,
// unlike ImageBuffer.
struct Tensor {
    int height = 0, width = 0, channels = 0;
    std::vector<double> data;  // [c][r][w] planar

    Tensor(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {}

    double& at(int ch, int r, int c) {
        return data[(static_cast<std::size_t>(ch) * height + r) * width + c];
    }
    double at(int ch, int r, int c) const {
        return data[(static_cast<std::size_t>(ch) * height + r) * width + c];
    }
};

Tensor conv_forward(const Tensor& in, const ConvLayer& layer) {
    const int rad = layer.kernel / 2;
    Tensor out(in.height, in.width, layer.out_channels);
    for (int o = 0; o < layer.out_channels; ++o) {
        for (int r = 0; r < in.height; ++r) {
            for (int c = 0; c < in.width; ++c) {
                double acc = layer.bias[o];
                for (int i = 0; i < layer.in_channels; ++i) {
                    const float* w =
                        &layer.weights[((o * layer.in_channels + i) * layer.kernel) * layer.kernel];
                    for (int dr = 0; dr < layer.kernel; ++dr) {
                        const int rr = std::clamp(r + dr - rad, 0, in.height - 1);
                        for (int dc = 0; dc < layer.kernel; ++dc) {
                            const int cc = std::clamp(c + dc - rad, 0, in.width - 1);
                            acc += static_cast<double>(w[dr * layer.kernel + dc]) * in.at(i, rr, cc);
                        }
                    }
                }
                out.at(o, r, c) = acc;
            }
        }
    }
    return out;
}

// Scatters cotangent back through the clamped taps; the adjoint of
// replicate padding folds border weight onto edge pixels.
Tensor conv_adjoint(const Tensor& grad_out, const ConvLayer& layer, int in_h, int in_w) {
    const int rad = layer.kernel / 2;
    Tensor grad_in(in_h, in_w, layer.in_channels, 0.0);
    for (int o = 0; o < layer.out_channels; ++o) {
        for (int r = 0; r < in_h; ++r) {
            for (int c = 0; c < in_w; ++c) {
                const double g = grad_out.at(o, r, c);
                if (g == 0.0) continue;
                for (int i = 0; i < layer.in_channels; ++i) {
                    const float* w =
                        &layer.weights[((o * layer.in_channels + i) * layer.kernel) * layer.kernel];
                    for (int dr = 0; dr < layer.kernel; ++dr) {
                        const int rr = std::clamp(r + dr - rad, 0, in_h - 1);
                        for (int dc = 0; dc < layer.kernel; ++dc) {
                            const int cc = std::clamp(c + dc - rad, 0, in_w - 1);
                            grad_in.at(i, rr, cc) += static_cast<double>(w[dr * layer.kernel + dc]) * g;
                        }
                    }
                }
            }
        }
    }
    return grad_in;
}

class ConvNetDenoiser final : public Denoiser {
public:
    explicit ConvNetDenoiser(ConvNetWeights w) : net_(std::move(w)) {
        validate_convnet(net_);
    }

    ImageBuffer apply(const ImageBuffer& img, double sigma) const override {
        if (!(sigma > 0.0))
            throw std::invalid_argument("denoiser: sigma must be positive");
        std::vector<Tensor> activations;
        run_forward(img, sigma, activations);
        const Tensor& last = activations.back();
        if (last.channels != img.channels)
            throw std::invalid_argument("convnet: output channels do not match the image");
        ImageBuffer out(img.height, img.width, img.channels);
        for (int ch = 0; ch < img.channels; ++ch)
            for (int r = 0; r < img.height; ++r)
                for (int c = 0; c < img.width; ++c)
                    out.at(r, c, ch) = last.at(ch, r, c);
        return out;
    }

    ImageBuffer vjp(const ImageBuffer& img, double sigma,
                    const ImageBuffer& cotangent) const override {
        if (!img.same_shape(cotangent))
            throw std::invalid_argument("vjp: cotangent shape mismatch");
        if (!(sigma > 0.0))
            throw std::invalid_argument("denoiser: sigma must be positive");
        std::vector<Tensor> activations;  // activations[l] = input of layer l
        run_forward(img, sigma, activations);
        if (activations.back().channels != img.channels)
            throw std::invalid_argument("convnet: output channels do not match the image");

        Tensor grad(img.height, img.width, img.channels, 0.0);
        for (int ch = 0; ch < img.channels; ++ch)
            for (int r = 0; r < img.height; ++r)
                for (int c = 0; c < img.width; ++c)
                    grad.at(ch, r, c) = cotangent.at(r, c, ch);

        const int layers = static_cast<int>(net_.layers.size());
        for (int l = layers - 1; l >= 0; --l) {
            grad = conv_adjoint(grad, net_.layers[l], img.height, img.width);
            if (l > 0) {
                // ReLU between layers: zero where the layer input was <= 0
                // (activations[l] stores the rectified input of layer l, so a
                // stored 0 means the pre-activation was <= 0).
                const Tensor& rectified = activations[l];
                for (std::size_t i = 0; i < grad.data.size(); ++i)
                    if (rectified.data[i] <= 0.0) grad.data[i] = 0.0;
            }
        }

        // strip the constant noise-map channel if present
        ImageBuffer out(img.height, img.width, img.channels);
        for (int ch = 0; ch < img.channels; ++ch)
            for (int r = 0; r < img.height; ++r)
                for (int c = 0; c < img.width; ++c)
                    out.at(r, c, ch) = grad.at(ch, r, c);
        return out;
    }

    std::string name() const override { return "convnet"; }

private:
    void run_forward(const ImageBuffer& img, double sigma,
                     std::vector<Tensor>& activations) const {
        const int extra = net_.noise_map_input ? 1 : 0;
        if (net_.layers.front().in_channels != img.channels + extra)
            throw std::invalid_argument("convnet: input channels do not match the image");

        Tensor input(img.height, img.width, img.channels + extra,
                     net_.noise_map_input ? sigma : 0.0);
        for (int ch = 0; ch < img.channels; ++ch)
            for (int r = 0; r < img.height; ++r)
                for (int c = 0; c < img.width; ++c)
                    input.at(ch, r, c) = img.at(r, c, ch);

        activations.clear();
        activations.push_back(std::move(input));
        const int layers = static_cast<int>(net_.layers.size());
        for (int l = 0; l < layers; ++l) {
            Tensor out = conv_forward(activations.back(), net_.layers[l]);
            if (l + 1 < layers)
                for (double& v : out.data) v = std::max(v, 0.0);
            activations.push_back(std::move(out));
        }
    }

    ConvNetWeights net_;
};

// --- N2VCNN1 container -------------------------------------------------------

constexpr char kMagic[8] = {'N', '2', 'V', 'C', 'N', 'N', '1', '\0'};

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {
        static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<float> read_f32(std::istream& in, std::size_t count) {
    std::vector<float> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t u = read_u32(in);
        std::memcpy(&out[i], &u, 4);
    }
    return out;
}

void write_f32(std::ostream& out, const std::vector<float>& values) {
    for (float f : values) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        write_u32(out, u);
    }
}

}  // namespace

void validate_convnet(const ConvNetWeights& w) {
    if (w.layers.empty())
        throw FormatError("convnet: no layers");
    int prev_out = -1;
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const ConvLayer& layer = w.layers[l];
        if (layer.in_channels <= 0 || layer.out_channels <= 0)
            throw FormatError("convnet: bad channel count");
        if (layer.kernel <= 0 || layer.kernel % 2 == 0)
            throw FormatError("convnet: kernel size must be odd");
        const std::size_t expect = static_cast<std::size_t>(layer.out_channels) *
                                   layer.in_channels * layer.kernel * layer.kernel;
        if (layer.weights.size() != expect || layer.bias.size() != static_cast<std::size_t>(layer.out_channels))
            throw FormatError("convnet: weight array size mismatch");
        for (float v : layer.weights)
            if (!std::isfinite(v)) throw FormatError("convnet: non-finite weight");
        for (float v : layer.bias)
            if (!std::isfinite(v)) throw FormatError("convnet: non-finite bias");
        if (prev_out >= 0 && layer.in_channels != prev_out)
            throw FormatError("convnet: layer channel mismatch");
        prev_out = layer.out_channels;
    }
}

ConvNetWeights read_convnet_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open weights file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw FormatError("bad N2VCNN1 magic: " + path);
    const std::uint32_t layer_count = read_u32(in);
    if (!in || layer_count == 0 || layer_count > 1024)
        throw FormatError("bad N2VCNN1 layer count");
    ConvNetWeights w;
    for (std::uint32_t l = 0; l < layer_count; ++l) {
        ConvLayer layer;
        layer.in_channels = static_cast<int>(read_u32(in));
        layer.out_channels = static_cast<int>(read_u32(in));
        layer.kernel = static_cast<int>(read_u32(in));
        if (!in || layer.in_channels <= 0 || layer.out_channels <= 0 || layer.kernel <= 0 ||
            layer.kernel > 63)
            throw FormatError("bad N2VCNN1 layer header");
        const std::size_t count = static_cast<std::size_t>(layer.out_channels) *
                                  layer.in_channels * layer.kernel * layer.kernel;
        layer.weights = read_f32(in, count);
        layer.bias = read_f32(in, layer.out_channels);
        if (!in)
            throw FormatError("truncated N2VCNN1 data");
        w.layers.push_back(std::move(layer));
    }
    char flag = 0;
    in.read(&flag, 1);
    if (!in)
        throw FormatError("missing N2VCNN1 noise-map flag");
    w.noise_map_input = flag != 0;
    validate_convnet(w);
    return w;
}

void write_convnet_weights(const ConvNetWeights& w, const std::string& path) {
    validate_convnet(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open weights file for writing: " + path);
    out.write(kMagic, 8);
    write_u32(out, static_cast<std::uint32_t>(w.layers.size()));
    for (const ConvLayer& layer : w.layers) {
        write_u32(out, static_cast<std::uint32_t>(layer.in_channels));
        write_u32(out, static_cast<std::uint32_t>(layer.out_channels));
        write_u32(out, static_cast<std::uint32_t>(layer.kernel));
        write_f32(out, layer.weights);
        write_f32(out, layer.bias);
    }
    const char flag = w.noise_map_input ? 1 : 0;
    out.write(&flag, 1);
    if (!out)
        throw IoError("write failure: " + path);
}

std::unique_ptr<Denoiser> make_convnet_denoiser(ConvNetWeights w) {
    return std::make_unique<ConvNetDenoiser>(std::move(w));
}

std::unique_ptr<Denoiser> load_convnet(const std::string& path) {
    return make_convnet_denoiser(read_convnet_weights(path));
}

}  // namespace n2v

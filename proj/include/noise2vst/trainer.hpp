#pragma once

#include <cstdint>
#include <vector>

#include "noise2vst/blindspot.hpp"
#include "noise2vst/denoiser.hpp"
#include "noise2vst/image.hpp"
#include "noise2vst/vst.hpp"

namespace n2v {

struct TrainConfig {
    int iterations = 2000;
    int batch = 4;
    int patch = 64;
    double lr0 = 0.01;
    double sigma_d = 25.0 / 255.0;  // noise level passed to the non-blind denoiser
    int stride_k = 4;               // partition stride
    std::uint64_t seed = 0;
    bool shared_vst_across_channels = true;
};

struct AdamState {
    std::vector<double> m;  // first moments, one per learnable scalar
    std::vector<double> v;  // second moments
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t param_count)
        : m(param_count, 0.0), v(param_count, 0.0) {}
};

struct LossGrad {
    double loss = 0.0;
    VstGradient grad;
};

// Self-supervised squared loss of one batch restricted to partition class
// `class_index`: mean over batch, channels and class pixels of
// (inv(Dbar(f(z))) - z)^2, with Dbar the class-restricted blind-spot wrap
// of `d`. The gradient is assembled analytically from (i) the inverse's
// explicit parameter dependence at the output, and (ii) the path through
// the denoiser input via its VJP and the forward transform's parameter
// derivatives. Segment indices are held constant, as in Vst::grad.
LossGrad loss_and_grad(const Vst& vst, const Denoiser& d, const PatchBatch& batch,
                       const Partition& part, int class_index, double sigma_d);

// Learning-rate schedule: lr0, dropped by 10x at floor(T/3) and floor(2T/3).
double lr_at(int iter, const TrainConfig& cfg);

// Standard bias-corrected Adam update of (theta, alpha, beta); theta is
// clamped to [-20, 20] afterwards to keep exp() sane.
void adam_step(AdamState& state, Vst& vst, const VstGradient& grad, double lr);

struct TraceEntry {
    int iteration = 0;
    double lr = 0.0;
    double loss = 0.0;
};

struct TrainResult {
    Vst vst;
    std::vector<TraceEntry> trace;
};

// Fits a VST to a single noisy image: identity initialization on
// [min(z), max(z)] with 128 knots, then `iterations` steps of Adam on the
// class-restricted self-supervised loss, one uniformly random partition
// class per iteration. Deterministic given cfg.seed.
TrainResult train(const ImageBuffer& img, const Denoiser& d, const TrainConfig& cfg);

// Independent VST per channel (cfg.shared_vst_across_channels = false).
std::vector<TrainResult> train_per_channel(const ImageBuffer& img, const Denoiser& d,
                                           const TrainConfig& cfg);

// Inference with the classic (non-blind-spot) denoiser:
// inv(D(f(z), sigma_d)). No clamping.
ImageBuffer infer(const ImageBuffer& img, const Vst& vst, const Denoiser& d, double sigma_d);

// Per-channel variant matching train_per_channel.
ImageBuffer infer_per_channel(const ImageBuffer& img, const std::vector<Vst>& vsts,
                              const Denoiser& d, double sigma_d);

}  // namespace n2v

#include "noise2vst/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace n2v {

LossGrad loss_and_grad(const Vst& vst, const Denoiser& d, const PatchBatch& batch,
                       const Partition& part, int class_index, double sigma_d) {
    if (batch.patches.empty())
        throw std::invalid_argument("loss_and_grad: empty batch");
    if (class_index < 0 || class_index >= part.class_count())
        throw std::invalid_argument("loss_and_grad: bad class index");

    const int n = vst.knot_count();
    const double dx = vst.grid_step();
    const std::vector<double>& y = vst.knot_values();
    const auto [r0, c0] = part.class_offset(class_index);

    LossGrad out;
    out.grad.d_theta.assign(n, 0.0);

    // residual count: all patches share one shape
    const ImageBuffer& first = batch.patches.front();
    long class_rows = 0, class_cols = 0;
    for (int r = r0; r < first.height; r += part.stride) ++class_rows;
    for (int c = c0; c < first.width; c += part.stride) ++class_cols;
    const double m_count = static_cast<double>(class_rows) * class_cols * first.channels *
                           static_cast<double>(batch.patches.size());
    if (m_count == 0)
        throw std::invalid_argument("loss_and_grad: class has no pixels in the patch");

    // per-segment cotangent sums; one suffix pass at the end turns them
    // into the prefix-structured theta gradients
    std::vector<double> acc_fwd(n, 0.0);  // forward path, indexed by x-segment
    std::vector<double> acc_inv(n, 0.0);  // inverse path, indexed by y-segment

    double loss_sum = 0.0;
    for (const ImageBuffer& z : batch.patches) {
        if (!z.same_shape(first))
            throw std::invalid_argument("loss_and_grad: mixed patch shapes");
        const ImageBuffer w = vst.forward(z);
        const BlindspotResult bs = apply_blindspot(d, w, sigma_d, part, class_index);

        // output-side pass over class pixels
        ImageBuffer cot_y(z.height, z.width, z.channels, 0.0);
        for (int r = r0; r < z.height; r += part.stride) {
            for (int c = c0; c < z.width; c += part.stride) {
                for (int ch = 0; ch < z.channels; ++ch) {
                    const double yv = bs.output.at(r, c, ch);
                    const int k = vst.inverse_segment(yv);
                    const double gk = y[k + 1] - y[k];
                    const double u = (yv - y[k]) / gk;
                    const double xk = vst.z_min() + k * dx;
                    const double inv = xk + dx * u + vst.alpha() * yv + vst.beta();
                    const double resid = inv - z.at(r, c, ch);
                    loss_sum += resid * resid;

                    const double cot = 2.0 * resid / m_count;
                    out.grad.d_alpha += cot * yv;
                    out.grad.d_beta += cot;
                    acc_inv[k] += cot * (-dx / gk);
                    out.grad.d_theta[k + 1] += cot * (-dx * u);
                    // input path: chain through d inv / d w
                    cot_y.at(r, c, ch) = cot * (dx / gk + vst.alpha());
                }
            }
        }

        // transport through the blind-spot denoiser back to w = f(z)
        const ImageBuffer cot_w = vjp_blindspot(d, w, sigma_d, part, class_index, cot_y);

        // forward transform parameter derivatives at every pixel
        for (int r = 0; r < z.height; ++r) {
            for (int c = 0; c < z.width; ++c) {
                for (int ch = 0; ch < z.channels; ++ch) {
                    const double cw = cot_w.at(r, c, ch);
                    if (cw == 0.0) continue;
                    const double zv = z.at(r, c, ch);
                    const int s = vst.forward_segment(zv);
                    const double t = (zv - (vst.z_min() + s * dx)) / dx;
                    acc_fwd[s] += cw;
                    out.grad.d_theta[s + 1] += cw * vst.exp_theta(s + 1) * t;
                }
            }
        }
    }

    // suffix sums: theta_j (j >= 1) collects every pixel whose segment
    // index is >= j, scaled by exp(theta_j); theta_0 collects everything
    double suffix = 0.0;
    for (int j = n - 1; j >= 1; --j) {
        suffix += acc_fwd[j];  // acc_fwd[n-1] is always 0 (segments end at n-2)
        out.grad.d_theta[j] += vst.exp_theta(j) * suffix;
    }
    out.grad.d_theta[0] += suffix + acc_fwd[0];
    suffix = 0.0;
    for (int j = n - 1; j >= 1; --j) {
        suffix += acc_inv[j];
        out.grad.d_theta[j] += vst.exp_theta(j) * suffix;
    }
    out.grad.d_theta[0] += suffix + acc_inv[0];

    out.loss = loss_sum / m_count;
    return out;
}

double lr_at(int iter, const TrainConfig& cfg) {
    if (iter < 0 || iter >= cfg.iterations)
        throw std::invalid_argument("lr_at: iteration out of range");
    const int first_drop = cfg.iterations / 3;
    const int second_drop = 2 * cfg.iterations / 3;
    if (iter < first_drop) return cfg.lr0;
    if (iter < second_drop) return cfg.lr0 / 10.0;
    return cfg.lr0 / 100.0;
}

void adam_step(AdamState& state, Vst& vst, const VstGradient& grad, double lr) {
    const int n = vst.knot_count();
    if (static_cast<int>(grad.d_theta.size()) != n)
        throw std::invalid_argument("adam_step: gradient size mismatch");
    if (state.m.size() != static_cast<std::size_t>(n) + 2)
        throw std::invalid_argument("adam_step: state size mismatch");
    for (double g : grad.d_theta)
        if (!std::isfinite(g))
            throw std::runtime_error("adam_step: non-finite theta gradient");
    if (!std::isfinite(grad.d_alpha) || !std::isfinite(grad.d_beta))
        throw std::runtime_error("adam_step: non-finite alpha/beta gradient");

    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    const auto update = [&](std::size_t slot, double param, double g) {
        state.m[slot] = state.beta1 * state.m[slot] + (1.0 - state.beta1) * g;
        state.v[slot] = state.beta2 * state.v[slot] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[slot] / bc1;
        const double vhat = state.v[slot] / bc2;
        return param - lr * mhat / (std::sqrt(vhat) + state.eps);
    };

    std::vector<double> theta = vst.theta();
    for (int j = 0; j < n; ++j)
        theta[j] = std::clamp(update(j, theta[j], grad.d_theta[j]), -20.0, 20.0);
    const double alpha = update(n, vst.alpha(), grad.d_alpha);
    const double beta = update(n + 1, vst.beta(), grad.d_beta);
    vst.set_parameters(std::move(theta), alpha, beta);
}

TrainResult train(const ImageBuffer& img, const Denoiser& d, const TrainConfig& cfg) {
    if (img.height < 8 || img.width < 8)
        throw std::invalid_argument("train: image must be at least 8x8");
    if (cfg.iterations < 1)
        throw std::invalid_argument("train: need at least one iteration");
    if (!(cfg.lr0 > 0.0))
        throw std::invalid_argument("train: lr0 must be positive");
    if (cfg.patch < 8)
        throw std::invalid_argument("train: patch must be at least 8");
    if (cfg.batch < 1)
        throw std::invalid_argument("train: batch must be at least 1");

    const double z_min = min_value(img);
    const double z_max = max_value(img);
    if (!(z_min < z_max))
        throw std::invalid_argument("train: constant image, no transform to learn");

    Rng rng(cfg.seed);
    const Partition part(cfg.stride_k);
    TrainResult result{Vst::identity(z_min, z_max, 128), {}};
    AdamState adam(result.vst.parameter_count());
    result.trace.reserve(cfg.iterations);

    for (int it = 0; it < cfg.iterations; ++it) {
        const PatchBatch batch = sample_training_batch(img, rng, cfg.patch, cfg.batch);
        const int class_index = static_cast<int>(rng.uniform_int(part.class_count()));
        const LossGrad lg = loss_and_grad(result.vst, d, batch, part, class_index, cfg.sigma_d);
        if (!std::isfinite(lg.loss))
            throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(it));
        const double lr = lr_at(it, cfg);
        adam_step(adam, result.vst, lg.grad, lr);
        result.trace.push_back({it, lr, lg.loss});
    }
    return result;
}

namespace {

ImageBuffer take_channel(const ImageBuffer& img, int ch) {
    ImageBuffer out(img.height, img.width, 1);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            out.at(r, c, 0) = img.at(r, c, ch);
    return out;
}

}  // namespace

std::vector<TrainResult> train_per_channel(const ImageBuffer& img, const Denoiser& d,
                                           const TrainConfig& cfg) {
    std::vector<TrainResult> results;
    results.reserve(img.channels);
    for (int ch = 0; ch < img.channels; ++ch)
        results.push_back(train(take_channel(img, ch), d, cfg));
    return results;
}

ImageBuffer infer(const ImageBuffer& img, const Vst& vst, const Denoiser& d, double sigma_d) {
    const ImageBuffer denoised = d.apply(vst.forward(img), sigma_d);
    ImageBuffer out = vst.inverse(denoised);
    check_finite(out, "infer");
    return out;
}

ImageBuffer infer_per_channel(const ImageBuffer& img, const std::vector<Vst>& vsts,
                              const Denoiser& d, double sigma_d) {
    if (static_cast<int>(vsts.size()) != img.channels)
        throw std::invalid_argument("infer_per_channel: need one VST per channel");
    ImageBuffer out(img.height, img.width, img.channels);
    for (int ch = 0; ch < img.channels; ++ch) {
        const ImageBuffer result = infer(take_channel(img, ch), vsts[ch], d, sigma_d);
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                out.at(r, c, ch) = result.at(r, c, 0);
    }
    return out;
}

}  // namespace n2v

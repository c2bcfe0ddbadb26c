#pragma once

#include <span>
#include <string>
#include <vector>

#include "noise2vst/image.hpp"

namespace n2v {

// Gradient carrier for the n + 2 learnable scalars.
struct VstGradient {
    std::vector<double> d_theta;
    double d_alpha = 0.0;
    double d_beta = 0.0;
};

// Per-point derivatives of the transform and its corrected inverse.
struct VstPointGrad {
    double df_dz = 0.0;
    std::vector<double> df_dtheta;
    double dinv_dw = 0.0;
    std::vector<double> dinv_dtheta;
    double dinv_dalpha = 0.0;
    double dinv_dbeta = 0.0;
};

// Index of the segment containing z among strictly increasing breaks:
// the largest i <= len-2 with breaks[i] <= z, clamped to 0 below the grid.
// The clamping makes both boundary segments extrapolate linearly.
int segment_index(double z, std::span<const double> breaks);

// Monotone continuous piecewise-linear transform on a uniform knot grid
// over [z_min, z_max], with a corrected inverse.
//
// theta[0] is the value at the left knot; theta[1..n-1] are log-increments
// between consecutive knot values, which keeps the knots strictly
// increasing for any parameter values. The corrected inverse adds
// alpha * w + beta on top of the algebraic inverse, giving n + 2 learnable
// scalars in total. Knot values are cached; mutation goes through
// set_parameters so the cache stays valid.
class Vst {
public:
    Vst(double z_min, double z_max, int n, std::vector<double> theta,
        double alpha, double beta);

    // Transform with forward(z) = z everywhere and zero inverse correction.
    static Vst identity(double z_min, double z_max, int n = 128);

    int knot_count() const { return n_; }
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    const std::vector<double>& theta() const { return theta_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    std::size_t parameter_count() const { return theta_.size() + 2; }

    // Uniformly spaced abscissae x_i.
    std::vector<double> knot_positions() const;
    // Ordinates y_i = theta[0] + sum_{j<=i} exp(theta[j]); strictly increasing.
    const std::vector<double>& knot_values() const { return y_; }

    double forward(double z) const;
    double algebraic_inverse(double w) const;
    double inverse(double w) const { return algebraic_inverse(w) + alpha_ * w + beta_; }

    ImageBuffer forward(const ImageBuffer& img) const;
    ImageBuffer inverse(const ImageBuffer& img) const;

    // Analytic derivatives at (z, w), with segment indices held constant;
    // at a knot or break the left-closed segment's derivative is used.
    VstPointGrad grad(double z, double w) const;

    void set_parameters(std::vector<double> theta, double alpha, double beta);

    // Checkpoint document (format "n2vst/1"), lossless for all fields.
    std::string serialize() const;
    static Vst deserialize(const std::string& text);

    // Fast-path helpers used by the gradient accumulation in the trainer.
    double grid_step() const { return dx_; }
    double exp_theta(int j) const { return e_[j]; }
    int forward_segment(double z) const;
    int inverse_segment(double w) const;

private:
    void rebuild_cache();

    double z_min_, z_max_;
    int n_;
    std::vector<double> theta_;
    double alpha_, beta_;

    // derived
    double dx_;
    std::vector<double> y_;
    std::vector<double> e_;  // e_[j] = exp(theta_[j]) for j >= 1; e_[0] unused
};

}  // namespace n2v

#include "noise2vst/vst.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace n2v {

int segment_index(double z, std::span<const double> breaks) {
    const int n = static_cast<int>(breaks.size());
    if (n < 2)
        throw std::invalid_argument("segment_index: need at least two breaks");
    // first break strictly greater than z, so ties land on the left-closed segment
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), z);
    int idx = static_cast<int>(it - breaks.begin()) - 1;
    return std::clamp(idx, 0, n - 2);
}

Vst::Vst(double z_min, double z_max, int n, std::vector<double> theta,
         double alpha, double beta)
    : z_min_(z_min), z_max_(z_max), n_(n),
      theta_(std::move(theta)), alpha_(alpha), beta_(beta) {
    if (!(z_min_ < z_max_))
        throw std::invalid_argument("Vst: z_min must be strictly below z_max");
    if (n_ < 2)
        throw std::invalid_argument("Vst: need at least two knots");
    if (static_cast<int>(theta_.size()) != n_)
        throw std::invalid_argument("Vst: theta size must equal knot count");
    rebuild_cache();
}

Vst Vst::identity(double z_min, double z_max, int n) {
    if (!(z_min < z_max) || n < 2)
        throw std::invalid_argument("Vst::identity: invalid grid");
    std::vector<double> theta(n);
    theta[0] = z_min;
    const double log_step = std::log((z_max - z_min) / (n - 1));
    for (int j = 1; j < n; ++j) theta[j] = log_step;
    return Vst(z_min, z_max, n, std::move(theta), 0.0, 0.0);
}

void Vst::rebuild_cache() {
    dx_ = (z_max_ - z_min_) / (n_ - 1);
    y_.resize(n_);
    e_.resize(n_);
    e_[0] = 0.0;
    y_[0] = theta_[0];
    for (int j = 1; j < n_; ++j) {
        if (!std::isfinite(theta_[j]))
            throw std::invalid_argument("Vst: non-finite theta");
        e_[j] = std::exp(theta_[j]);
        y_[j] = y_[j - 1] + e_[j];
    }
    if (!std::isfinite(theta_[0]) || !std::isfinite(alpha_) || !std::isfinite(beta_))
        throw std::invalid_argument("Vst: non-finite parameter");
}

std::vector<double> Vst::knot_positions() const {
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i)
        x[i] = z_min_ + (z_max_ - z_min_) * static_cast<double>(i) / (n_ - 1);
    return x;
}

int Vst::forward_segment(double z) const {
    // uniform abscissae: O(1) lookup
    const int idx = static_cast<int>(std::floor((z - z_min_) / dx_));
    return std::clamp(idx, 0, n_ - 2);
}

int Vst::inverse_segment(double w) const {
    return segment_index(w, y_);
}

double Vst::forward(double z) const {
    const int s = forward_segment(z);
    const double xs = z_min_ + s * dx_;
    return y_[s] + (y_[s + 1] - y_[s]) / dx_ * (z - xs);
}

double Vst::algebraic_inverse(double w) const {
    const int k = inverse_segment(w);
    const double xk = z_min_ + k * dx_;
    return xk + dx_ / (y_[k + 1] - y_[k]) * (w - y_[k]);
}

ImageBuffer Vst::forward(const ImageBuffer& img) const {
    ImageBuffer out = img;
    for (double& v : out.data) v = forward(v);
    return out;
}

ImageBuffer Vst::inverse(const ImageBuffer& img) const {
    ImageBuffer out = img;
    for (double& v : out.data) v = inverse(v);
    return out;
}

VstPointGrad Vst::grad(double z, double w) const {
    VstPointGrad g;
    g.df_dtheta.assign(n_, 0.0);
    g.dinv_dtheta.assign(n_, 0.0);

    // forward side: f(z) = (1-t) y_s + t y_{s+1} within segment s
    const int s = forward_segment(z);
    const double t = (z - (z_min_ + s * dx_)) / dx_;
    g.df_dz = e_[s + 1] / dx_;
    g.df_dtheta[0] = 1.0;
    for (int j = 1; j <= s; ++j) g.df_dtheta[j] = e_[j];
    g.df_dtheta[s + 1] += e_[s + 1] * t;

    // inverse side: inv(w) = x_k + dx * (w - y_k) / g_k within break segment k,
    // where g_k = y_{k+1} - y_k = exp(theta_{k+1})
    const int k = inverse_segment(w);
    const double gk = y_[k + 1] - y_[k];
    const double u = (w - y_[k]) / gk;
    g.dinv_dw = dx_ / gk + alpha_;
    g.dinv_dtheta[0] = -dx_ / gk;
    for (int j = 1; j <= k; ++j) g.dinv_dtheta[j] = -e_[j] * dx_ / gk;
    g.dinv_dtheta[k + 1] += -dx_ * u;  // d inv / d y_{k+1} chained with e_{k+1} = g_k
    g.dinv_dalpha = w;
    g.dinv_dbeta = 1.0;
    return g;
}

void Vst::set_parameters(std::vector<double> theta, double alpha, double beta) {
    if (static_cast<int>(theta.size()) != n_)
        throw std::invalid_argument("set_parameters: theta size mismatch");
    theta_ = std::move(theta);
    alpha_ = alpha;
    beta_ = beta;
    rebuild_cache();
}

std::string Vst::serialize() const {
    nlohmann::json doc;
    doc["format"] = "n2vst/1";
    doc["n"] = n_;
    doc["z_min"] = z_min_;
    doc["z_max"] = z_max_;
    doc["theta"] = theta_;
    doc["alpha"] = alpha_;
    doc["beta"] = beta_;
    return doc.dump(2) + "\n";
}

Vst Vst::deserialize(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed VST checkpoint: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "n2vst/1")
            throw FormatError("unknown VST checkpoint format");
        const int n = doc.at("n").get<int>();
        const double z_min = doc.at("z_min").get<double>();
        const double z_max = doc.at("z_max").get<double>();
        auto theta = doc.at("theta").get<std::vector<double>>();
        const double alpha = doc.at("alpha").get<double>();
        const double beta = doc.at("beta").get<double>();
        return Vst(z_min, z_max, n, std::move(theta), alpha, beta);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed VST checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid VST checkpoint: ") + e.what());
    }
}

}  // namespace n2v

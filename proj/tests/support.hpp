#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// in here is test-only and must stay independent of the implementation
// paths it checks.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "noise2vst/image.hpp"
#include "noise2vst/rng.hpp"
#include "noise2vst/vst.hpp"

namespace testsupport {

// Central finite difference of a scalar function, the oracle for every
// analytic derivative in the toolkit.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Relative agreement with an absolute floor for near-zero components.
inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-8) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b)) + abs_floor;
}

inline n2v::ImageBuffer random_image(n2v::Rng& rng, int h, int w, int c = 1,
                                     double lo = 0.0, double hi = 1.0) {
    n2v::ImageBuffer img(h, w, c);
    for (double& v : img.data) v = rng.uniform(lo, hi);
    return img;
}

inline double dot(const n2v::ImageBuffer& a, const n2v::ImageBuffer& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
    return acc;
}

// A valid random transform: monotone by construction for any draw.
inline n2v::Vst random_vst(n2v::Rng& rng, int n = 16, double z_min = 0.0, double z_max = 1.0) {
    std::vector<double> theta(n);
    theta[0] = rng.uniform(-0.3, 0.3);
    for (int j = 1; j < n; ++j)
        theta[j] = std::log((z_max - z_min) / (n - 1)) + rng.uniform(-1.0, 1.0);
    return n2v::Vst(z_min, z_max, n, std::move(theta), rng.uniform(-0.2, 0.2),
                    rng.uniform(-0.2, 0.2));
}

// Gradient of forward(z) w.r.t. every parameter by rebuilding the
// transform with perturbed entries.
inline std::vector<double> fd_forward_dtheta(const n2v::Vst& vst, double z, double h = 1e-5) {
    std::vector<double> grad(vst.knot_count());
    for (int j = 0; j < vst.knot_count(); ++j) {
        auto tp = vst.theta();
        auto tm = vst.theta();
        tp[j] += h;
        tm[j] -= h;
        const n2v::Vst vp(vst.z_min(), vst.z_max(), vst.knot_count(), tp, vst.alpha(), vst.beta());
        const n2v::Vst vm(vst.z_min(), vst.z_max(), vst.knot_count(), tm, vst.alpha(), vst.beta());
        grad[j] = (vp.forward(z) - vm.forward(z)) / (2.0 * h);
    }
    return grad;
}

inline std::vector<double> fd_inverse_dtheta(const n2v::Vst& vst, double w, double h = 1e-5) {
    std::vector<double> grad(vst.knot_count());
    for (int j = 0; j < vst.knot_count(); ++j) {
        auto tp = vst.theta();
        auto tm = vst.theta();
        tp[j] += h;
        tm[j] -= h;
        const n2v::Vst vp(vst.z_min(), vst.z_max(), vst.knot_count(), tp, vst.alpha(), vst.beta());
        const n2v::Vst vm(vst.z_min(), vst.z_max(), vst.knot_count(), tm, vst.alpha(), vst.beta());
        grad[j] = (vp.inverse(w) - vm.inverse(w)) / (2.0 * h);
    }
    return grad;
}

// --- deterministic clean test scenes ---------------------------------------

// Smooth bumps on a gentle gradient background.
inline n2v::ImageBuffer scene_blobs(int size) {
    n2v::ImageBuffer img(size, size, 1);
    struct Bump { double r, c, s, a; };
    const Bump bumps[] = {{0.3, 0.25, 0.09, 0.55}, {0.68, 0.6, 0.16, 0.45},
                          {0.2, 0.78, 0.06, 0.65}, {0.82, 0.2, 0.11, 0.35},
                          {0.5, 0.45, 0.28, 0.25}};
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double y = static_cast<double>(r) / (size - 1);
            const double x = static_cast<double>(c) / (size - 1);
            double v = 0.10 + 0.25 * x + 0.1 * y;
            for (const Bump& b : bumps) {
                const double d2 = (y - b.r) * (y - b.r) + (x - b.c) * (x - b.c);
                v += b.a * std::exp(-d2 / (2.0 * b.s * b.s));
            }
            img.at(r, c) = std::min(v, 0.97);
        }
    return img;
}

// Flat regions with sharp edges at several intensities.
inline n2v::ImageBuffer scene_shapes(int size) {
    n2v::ImageBuffer img(size, size, 1, 0.30);
    const auto rect = [&](double r0, double c0, double r1, double c1, double value) {
        for (int r = static_cast<int>(r0 * size); r < static_cast<int>(r1 * size); ++r)
            for (int c = static_cast<int>(c0 * size); c < static_cast<int>(c1 * size); ++c)
                img.at(r, c) = value;
    };
    rect(0.08, 0.08, 0.45, 0.40, 0.72);
    rect(0.55, 0.15, 0.92, 0.35, 0.12);
    rect(0.15, 0.55, 0.38, 0.90, 0.50);
    rect(0.60, 0.55, 0.80, 0.95, 0.88);
    rect(0.44, 0.44, 0.56, 0.56, 0.06);
    for (int r = 0; r < size; ++r)   // one smooth ramp strip
        for (int c = static_cast<int>(0.42 * size); c < static_cast<int>(0.50 * size); ++c)
            img.at(r, c) = 0.1 + 0.8 * r / (size - 1.0);
    return img;
}

// Sinusoidal texture with spatially varying frequency and brightness.
inline n2v::ImageBuffer scene_waves(int size) {
    n2v::ImageBuffer img(size, size, 1);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double y = static_cast<double>(r) / (size - 1);
            const double x = static_cast<double>(c) / (size - 1);
            const double carrier = std::sin(2.0 * M_PI * (3.0 * x + 1.5 * y) +
                                            2.0 * std::sin(2.0 * M_PI * 0.7 * y));
            const double envelope = 0.35 + 0.45 * x;
            img.at(r, c) = 0.12 + envelope * (0.5 + 0.42 * carrier);
        }
    return img;
}

// Clean intensity ramp, rows constant, columns sweeping [lo, hi].
inline n2v::ImageBuffer scene_ramp(int size, double lo, double hi) {
    n2v::ImageBuffer img(size, size, 1);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c)
            img.at(r, c) = lo + (hi - lo) * c / (size - 1.0);
    return img;
}

}  // namespace testsupport

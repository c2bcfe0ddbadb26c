#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "noise2vst/noise_lab.hpp"
#include "support.hpp"

using namespace n2v;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    long n = 0;
};

Moments sample_moments(const std::vector<double>& xs) {
    Moments m;
    m.n = static_cast<long>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= m.n;
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= (m.n - 1);
    return m;
}

double erf_cdf(double x, double mean, double sigma) {
    return 0.5 * (1.0 + std::erf((x - mean) / (sigma * std::sqrt(2.0))));
}

}  // namespace

TEST_SUITE("noise_lab") {

TEST_CASE("poisson-gauss degenerate and moment checks") {
    Rng rng(1);
    ImageBuffer zero(8, 8, 1, 0.0);
    const ImageBuffer z = synthesize(zero, NoiseModel::poisson_gauss(1.0, 0.0), rng);
    for (double v : z.data) CHECK(v == 0.0);

    // a = 1/30, s = 0.6: mean 0.6, variance a*s = 0.02
    const int n = 100000;
    std::vector<double> xs;
    xs.reserve(n);
    ImageBuffer pixel(1, 1, 1, 0.6);
    const NoiseModel m = NoiseModel::poisson_gauss(1.0 / 30.0, 0.0);
    for (int i = 0; i < n; ++i)
        xs.push_back(synthesize(pixel, m, rng).at(0, 0));
    const Moments mom = sample_moments(xs);
    const double stderr_mean = std::sqrt(0.02 / n);
    CHECK(std::fabs(mom.mean - 0.6) < 3.0 * stderr_mean);
    const double stderr_var = 0.02 * std::sqrt(2.0 / (n - 1.0));
    CHECK(std::fabs(mom.var - 0.02) < 4.0 * stderr_var);
}

TEST_CASE("gaussian limit of the poisson branch") {
    // a so small that the gaussian read noise dominates: KS test at 1%
    Rng rng(2);
    const int n = 100000;
    const double s = 0.6, b = 0.01;
    ImageBuffer pixel(1, 1, 1, s);
    const NoiseModel m = NoiseModel::poisson_gauss(1e-9, b);
    std::vector<double> xs;
    xs.reserve(n);
    for (int i = 0; i < n; ++i)
        xs.push_back(synthesize(pixel, m, rng).at(0, 0));
    std::sort(xs.begin(), xs.end());
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = erf_cdf(xs[i], s, std::sqrt(b));
        d_stat = std::max(d_stat, std::fabs(f - (i + 1.0) / n));
        d_stat = std::max(d_stat, std::fabs(f - static_cast<double>(i) / n));
    }
    CHECK(d_stat < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("negative clean pixels are rejected under a poisson model") {
    Rng rng(3);
    ImageBuffer bad(2, 2, 1, 0.5);
    bad.at(0, 0) = -0.01;
    CHECK_THROWS_AS(synthesize(bad, NoiseModel::poisson_gauss(0.1, 0.0), rng),
                    std::invalid_argument);
    const ImageBuffer ok = synthesize(bad, NoiseModel::gaussian(0.1), rng);  // gaussian is fine
    CHECK(ok.size() == 4);
}

TEST_CASE("poisson sampler moments across both regimes") {
    Rng rng(4);
    for (double rate : {3.0, 29.5, 100.0}) {
        const int n = 50000;
        std::vector<double> xs;
        xs.reserve(n);
        for (int i = 0; i < n; ++i)
            xs.push_back(static_cast<double>(rng.poisson(rate)));
        const Moments m = sample_moments(xs);
        CHECK(std::fabs(m.mean - rate) < 4.0 * std::sqrt(rate / n));
        CHECK(std::fabs(m.var - rate) < 5.0 * rate * std::sqrt(2.0 / (n - 1.0)));
    }
    CHECK(Rng(1).poisson(0.0) == 0);
}

TEST_CASE("gat forward closed-form values") {
    CHECK(gat_forward(0.0, 1.0, 0.0) == doctest::Approx(2.0 * std::sqrt(0.375)).epsilon(1e-9));
    CHECK(gat_forward(0.5, 0.04, 0.0) == doctest::Approx(50.0 * std::sqrt(0.0206)).epsilon(1e-9));
    CHECK(gat_forward(-10.0, 1.0, 0.0) == 0.0);  // clamped radicand
    CHECK(gat_forward(0.2, 0.1, 0.0) <= gat_forward(0.3, 0.1, 0.0));
}

TEST_CASE("algebraic inverse undoes the forward transform") {
    for (double z : {0.0, 0.2, 0.5, 1.0, 3.0}) {
        const double w = gat_forward(z, 0.05, 0.001);
        CHECK(gat_inverse(w, 0.05, 0.001, GatInverseMode::Algebraic) ==
              doctest::Approx(z).epsilon(1e-10));
    }
}

TEST_CASE("unbiased minus algebraic inverse has the documented gap") {
    const double s32 = std::sqrt(1.5);
    for (double w : {1.5, 2.0, 4.0, 9.0}) {
        const double gap = gat_inverse(w, 1.0, 0.0, GatInverseMode::Unbiased) -
                           gat_inverse(w, 1.0, 0.0, GatInverseMode::Algebraic);
        const double expect = 0.25 + 0.25 * s32 / w - 1.375 / (w * w) + 0.625 * s32 / (w * w * w);
        CHECK(gap == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK_THROWS_AS(gat_inverse(0.0, 1.0, 0.0, GatInverseMode::Unbiased), std::invalid_argument);
}

TEST_CASE("unbiased inverse beats the algebraic one on bias") {
    Rng rng(5);
    const double a = 1.0 / 20.0, s = 0.5;
    const int n = 1000000;
    double sum_unb = 0.0, sum_alg = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = a * static_cast<double>(rng.poisson(s / a));
        const double w = gat_forward(z, a, 0.0);
        sum_unb += gat_inverse(std::max(w, 1e-12), a, 0.0, GatInverseMode::Unbiased);
        sum_alg += gat_inverse(w, a, 0.0, GatInverseMode::Algebraic);
    }
    const double bias_unb = std::fabs(sum_unb / n - s);
    const double bias_alg = std::fabs(sum_alg / n - s);
    CHECK(bias_unb < bias_alg);
}

TEST_CASE("gat pipeline with identity denoiser is the identity in algebraic mode") {
    Rng rng(6);
    const ImageBuffer clean = testsupport::scene_blobs(32);
    const ImageBuffer noisy = synthesize(clean, NoiseModel::poisson_lambda(30.0), rng);
    const auto d = make_identity_denoiser();
    const ImageBuffer out =
        gat_pipeline(noisy, 1.0 / 30.0, 0.0, *d, 25.0 / 255.0, GatInverseMode::Algebraic);
    for (std::size_t i = 0; i < noisy.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(noisy.data[i]).epsilon(1e-9));
}

TEST_CASE("gat pipeline covariance under rescaling") {
    Rng rng(7);
    const ImageBuffer clean = testsupport::scene_blobs(24);
    const double a = 1.0 / 25.0;
    const ImageBuffer noisy = synthesize(clean, NoiseModel::poisson_gauss(a, 0.0), rng);
    ImageBuffer halved = noisy;
    for (double& v : halved.data) v *= 0.5;

    const auto d = make_dct_denoiser(8, 4, 3.0);
    const ImageBuffer full = gat_pipeline(noisy, a, 0.0, *d, 25.0 / 255.0);
    const ImageBuffer half = gat_pipeline(halved, a / 2.0, 0.0, *d, 25.0 / 255.0);
    for (std::size_t i = 0; i < full.data.size(); ++i)
        CHECK(half.data[i] == doctest::Approx(0.5 * full.data[i]).epsilon(1e-10));
}

TEST_CASE("gat denoising improves a noisy image") {
    Rng rng(8);
    const ImageBuffer clean = testsupport::scene_blobs(64);
    const ImageBuffer noisy = synthesize(clean, NoiseModel::poisson_lambda(50.0), rng);
    const auto d = make_dct_denoiser(8, 4, 3.0);
    const ImageBuffer out = gat_pipeline(noisy, 1.0 / 50.0, 0.0, *d, 25.0 / 255.0);
    CHECK(psnr(out, clean) > psnr(noisy, clean) + 3.0);
}

TEST_CASE("stabilization profile ratios") {
    Rng rng(9);
    const ImageBuffer ramp = testsupport::scene_ramp(64, 0.2, 1.0);
    const NoiseModel poisson = NoiseModel::poisson_gauss(1.0 / 30.0, 0.0);

    // identity transform: std ~ sqrt(a s), ratio ~ sqrt(s_hi/s_lo)
    const auto prof_id = stabilization_profile([](double z) { return z; }, ramp, poisson,
                                               40, 30, rng);
    CHECK(prof_id.ratio == doctest::Approx(std::sqrt(5.0)).epsilon(0.10));

    const auto prof_gat = stabilization_profile(
        [](double z) { return gat_forward(z, 1.0 / 30.0, 0.0); }, ramp, poisson, 40, 30, rng);
    CHECK(prof_gat.ratio < 1.15);

    const auto prof_gauss = stabilization_profile([](double z) { return z; }, ramp,
                                                  NoiseModel::gaussian(0.1), 10, 30, rng);
    CHECK(prof_gauss.ratio < 1.10);

    const std::string csv = profile_to_csv(prof_gat);
    CHECK(csv.rfind("bin_center,std,count\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
}

TEST_CASE("unit variance of the stabilized output across rates") {
    Rng rng(10);
    for (int rate = 4; rate <= 50; rate += 6) {
        const int n = 10000;
        std::vector<double> xs;
        xs.reserve(n);
        for (int i = 0; i < n; ++i)
            xs.push_back(gat_forward(static_cast<double>(rng.poisson(rate)), 1.0, 0.0));
        const Moments m = sample_moments(xs);
        CHECK(std::sqrt(m.var) > 0.9);
        CHECK(std::sqrt(m.var) < 1.1);
    }
}

TEST_CASE("lambda parameterization hits the documented variance") {
    Rng rng(11);
    for (double lambda : {5.0, 50.0}) {
        const NoiseModel m = NoiseModel::poisson_lambda(lambda);
        CHECK(m.a == doctest::Approx(1.0 / lambda));
        const int n = 40000;
        ImageBuffer pixel(1, 1, 1, 1.0);
        std::vector<double> xs;
        xs.reserve(n);
        for (int i = 0; i < n; ++i)
            xs.push_back(synthesize(pixel, m, rng).at(0, 0));
        const Moments mom = sample_moments(xs);
        const double expect = 1.0 / lambda;
        CHECK(std::fabs(mom.var - expect) < 4.0 * expect * std::sqrt(2.0 / (n - 1.0)));
    }
}

}  // TEST_SUITE

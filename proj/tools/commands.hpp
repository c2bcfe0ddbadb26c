#pragma once

#include <memory>
#include <string>
#include <vector>

#include "noise2vst/denoiser.hpp"
#include "noise2vst/image.hpp"

namespace n2v::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code contract shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Raised by bench --check when a threshold is violated.
class CheckFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Builds one of the built-in denoisers from CLI-style options.
std::unique_ptr<Denoiser> make_denoiser(const std::string& kind, const std::string& weights_path,
                                        double blur_sigma, int dct_patch, int dct_stride,
                                        double dct_threshold_factor);

struct BenchRow {
    std::string image;
    double lambda = 0.0;
    double psnr_noisy = 0.0, psnr_gat = 0.0, psnr_n2vst = 0.0;
    double ssim_noisy = 0.0, ssim_gat = 0.0, ssim_n2vst = 0.0;
};

struct BenchConfig {
    std::vector<double> lambdas{5.0, 25.0, 50.0};
    int iterations = 2000;
    double sigma_d = 25.0 / 255.0;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: resolve from N2VST_THREADS / hardware
};

struct BenchReport {
    std::vector<BenchRow> rows;
    BenchRow aggregate;  // means; image = "mean", lambda = 0
};

// Synthesizes Poisson noise at each lambda for every clean image in the
// corpus, runs the GAT-oracle pipeline and the learned-VST pipeline with a
// shared denoiser, and collects PSNR/SSIM against the clean originals.
// Deterministic given cfg.seed; rows ordered by (image, lambda).
BenchReport run_bench(const std::vector<std::pair<std::string, ImageBuffer>>& corpus,
                      const Denoiser& d, const BenchConfig& cfg);

std::string bench_to_csv(const BenchReport& report);
std::string bench_to_markdown(const BenchReport& report);

// Aggregate thresholds enforced by bench --check; throws CheckFailure.
void check_bench(const BenchReport& report);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace n2v::cli

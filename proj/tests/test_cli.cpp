#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "noise2vst/noise_lab.hpp"
#include "support.hpp"

using namespace n2v;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"n2vst"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path workdir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "n2vst_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

double image_std(const ImageBuffer& img) {
    double mean = 0.0;
    for (double v : img.data) mean += v;
    mean /= static_cast<double>(img.data.size());
    double var = 0.0;
    for (double v : img.data) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(img.data.size() - 1));
}

}  // namespace

TEST_SUITE("cli_eval") {

TEST_CASE("denoise writes all four artifacts and is reproducible") {
    const fs::path dir = workdir("denoise");
    const ImageBuffer clean = testsupport::scene_blobs(48);
    Rng rng(3);
    const ImageBuffer noisy = synthesize(clean, NoiseModel::poisson_lambda(30.0), rng);
    const std::string in = (dir / "noisy.npf").string();
    save_npf(noisy, in);

    const std::string out1 = (dir / "a.png").string();
    const std::vector<std::string> cmd{"denoise", "--input", in,       "--output", out1,
                                       "--denoiser", "dct", "--iters", "15",      "--seed", "1"};
    CHECK(run(cmd) == cli::kExitOk);
    CHECK(fs::exists(out1));
    CHECK(fs::exists(dir / "a.vst.json"));
    CHECK(fs::exists(dir / "a.loss.csv"));
    CHECK(fs::exists(dir / "a.manifest.json"));

    auto cmd2 = cmd;
    cmd2[4] = (dir / "b.png").string();
    CHECK(run(cmd2) == cli::kExitOk);
    CHECK(slurp(out1) == slurp(dir / "b.png"));
    CHECK(slurp(dir / "a.vst.json") == slurp(dir / "b.vst.json"));
    CHECK(slurp(dir / "a.loss.csv") == slurp(dir / "b.loss.csv"));
}

TEST_CASE("denoise usage errors") {
    const fs::path dir = workdir("denoise_err");
    const std::string in = (dir / "missing.npf").string();
    CHECK(run({"denoise", "--input", in, "--output", (dir / "o.png").string(), "--iters", "0"}) ==
          cli::kExitUsage);
    CHECK(run({"denoise", "--input", in, "--output", (dir / "o.png").string()}) == cli::kExitIo);
    CHECK(run({"nonsense"}) == cli::kExitUsage);
}

TEST_CASE("synth reproduces the documented noise statistics") {
    const fs::path dir = workdir("synth");
    ImageBuffer gray(128, 128, 1, 0.5);
    const std::string in = (dir / "gray.png").string();
    save_image(gray, in, 16);

    const std::string out50 = (dir / "n50.npf").string();
    CHECK(run({"synth", "--input", in, "--output", out50, "--model", "poisson", "--lambda",
               "50", "--seed", "9"}) == cli::kExitOk);
    const ImageBuffer n50 = load_image(out50);
    CHECK(image_std(n50) == doctest::Approx(std::sqrt(0.5 / 50.0)).epsilon(0.05));

    const std::string out5 = (dir / "n5.npf").string();
    CHECK(run({"synth", "--input", in, "--output", out5, "--model", "poisson", "--lambda", "5",
               "--seed", "9"}) == cli::kExitOk);
    const ImageBuffer n5 = load_image(out5);
    CHECK(image_std(n5) / image_std(n50) == doctest::Approx(std::sqrt(10.0)).epsilon(0.10));

    CHECK(run({"synth", "--input", in, "--output", (dir / "g.npf").string(), "--model", "gauss",
               "--sigma", "0"}) == cli::kExitUsage);
    CHECK(run({"synth", "--input", in, "--output", (dir / "bad.png").string(), "--model",
               "poisson", "--lambda", "10"}) == cli::kExitUsage);
    CHECK(fs::exists(dir / "n50.manifest.json"));
}

TEST_CASE("gat baseline beats the noisy input with the oracle parameter") {
    const fs::path dir = workdir("gat");
    const ImageBuffer clean = testsupport::scene_blobs(96);
    const std::string clean_path = (dir / "clean.png").string();
    save_image(clean, clean_path, 16);

    Rng rng(11);
    const ImageBuffer noisy = synthesize(clean, NoiseModel::poisson_lambda(20.0), rng);
    const std::string noisy_path = (dir / "noisy.npf").string();
    save_npf(noisy, noisy_path);

    const std::string oracle_out = (dir / "oracle.npf").string();
    CHECK(run({"gat", "--input", noisy_path, "--output", oracle_out, "--lambda", "20",
               "--denoiser", "dct"}) == cli::kExitOk);
    const double psnr_oracle = psnr(load_image(oracle_out), clean);
    CHECK(psnr_oracle > psnr(noisy, clean));

    // a 4x-wrong rate degrades the result
    const std::string wrong_out = (dir / "wrong.npf").string();
    CHECK(run({"gat", "--input", noisy_path, "--output", wrong_out, "--lambda", "80",
               "--denoiser", "dct"}) == cli::kExitOk);
    CHECK(psnr(load_image(wrong_out), clean) < psnr_oracle);

    CHECK(run({"gat", "--input", noisy_path, "--output", (dir / "x.npf").string()}) ==
          cli::kExitUsage);
}

TEST_CASE("eval reports the sentinel on identical inputs") {
    const fs::path dir = workdir("eval");
    const ImageBuffer img = testsupport::scene_blobs(32);
    const std::string a = (dir / "a.png").string();
    save_image(img, a, 16);

    const std::string report = (dir / "report.txt").string();
    CHECK(run({"eval", "--input", a, "--ref", a, "--output", report}) == cli::kExitOk);
    const std::string text = slurp(report);
    CHECK(text == "psnr_db: inf\nssim: 1.000000\n");

    // a constant 0.1 offset pins the PSNR at 20 dB
    ImageBuffer shifted = img;
    for (double& v : shifted.data) v = std::min(1.0, std::max(0.0, v + 0.1));
    bool clipped = false;
    for (double v : img.data)
        if (v + 0.1 > 1.0 || v + 0.1 < 0.0) clipped = true;
    if (!clipped) {
        const std::string b = (dir / "b.npf").string();
        save_npf(shifted, b);
        const std::string report2 = (dir / "r2.txt").string();
        CHECK(run({"eval", "--input", b, "--ref", a, "--output", report2}) == cli::kExitOk);
        CHECK(slurp(report2).rfind("psnr_db: 20.0", 0) == 0);
    }

    ImageBuffer other(16, 16, 1, 0.0);
    const std::string c = (dir / "c.png").string();
    save_image(other, c, 8);
    CHECK(run({"eval", "--input", a, "--ref", c}) == cli::kExitUsage);
}

TEST_CASE("export-vst samples the checkpoint curve") {
    const fs::path dir = workdir("export");
    const Vst id = Vst::identity(0.0, 1.0, 128);
    const std::string ckpt = (dir / "id.vst.json").string();
    std::ofstream(ckpt) << id.serialize();

    const std::string csv = (dir / "curve.csv").string();
    CHECK(run({"export-vst", "--input", ckpt, "--output", csv}) == cli::kExitOk);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "z,f,f_inv");
    std::vector<std::array<double, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::array<double, 3> row{};
        std::sscanf(line.c_str(), "%lf,%lf,%lf", &row[0], &row[1], &row[2]);
        rows.push_back(row);
    }
    REQUIRE(rows.size() == 256);
    CHECK(rows.front()[0] == 0.0);
    CHECK(rows.back()[0] == 1.0);
    for (const auto& row : rows)
        CHECK(row[1] == doctest::Approx(row[0]).epsilon(1e-9));  // identity: f == z

    CHECK(run({"export-vst", "--input", (dir / "nope.json").string(), "--output", csv}) ==
          cli::kExitIo);
}

TEST_CASE("bench writes the report table and enforces checks") {
    const fs::path dir = workdir("bench");
    const fs::path corpus = dir / "corpus";
    fs::create_directories(corpus);
    save_image(testsupport::scene_blobs(48), (corpus / "a_blobs.png").string(), 16);
    save_image(testsupport::scene_shapes(48), (corpus / "b_shapes.png").string(), 16);

    const fs::path outdir = dir / "out";
    CHECK(run({"bench", "--input", corpus.string(), "--output", outdir.string(), "--lambdas",
               "25", "--iters", "12", "--seed", "4"}) == cli::kExitOk);
    const std::string csv = slurp(outdir / "bench.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 2 rows + aggregate
    CHECK(csv.rfind("image,lambda,", 0) == 0);
    CHECK(fs::exists(outdir / "bench.md"));
    CHECK(fs::exists(outdir / "bench.manifest.json"));

    // identity denoiser cannot reach +3 dB, so --check must fail with exit 1
    const fs::path outdir2 = dir / "out2";
    CHECK(run({"bench", "--input", corpus.string(), "--output", outdir2.string(), "--lambdas",
               "25", "--iters", "12", "--seed", "4", "--denoiser", "identity", "--check"}) ==
          cli::kExitCheckFailed);

    CHECK(run({"bench", "--input", (dir / "empty").string(), "--output", outdir.string()}) ==
          cli::kExitUsage);
}

}  // TEST_SUITE

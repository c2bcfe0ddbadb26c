#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "noise2vst/noise_lab.hpp"
#include "noise2vst/trainer.hpp"
#include "noise2vst/vst.hpp"

namespace fs = std::filesystem;

namespace n2v::cli {

namespace {

std::string format_double(double v, int digits = 6) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open file for writing: " + path);
    out << content;
    if (!out)
        throw IoError("write failure: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file for reading: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// "out.png" -> "out.vst.json" etc.
std::string sibling_path(const std::string& output, const std::string& suffix) {
    fs::path p(output);
    p.replace_extension();
    return p.string() + suffix;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

class ManifestWriter {
public:
    ManifestWriter(const std::string& command, std::uint64_t seed)
        : start_(std::chrono::steady_clock::now()) {
        doc_["command"] = command;
        doc_["version"] = kVersion;
        doc_["seed"] = seed;
        doc_["inputs"] = nlohmann::json::array();
        doc_["outputs"] = nlohmann::json::array();
        doc_["config"] = nlohmann::json::object();
    }

    void add_input(const std::string& path) { doc_["inputs"].push_back(path); }
    void add_output(const std::string& path) { doc_["outputs"].push_back(path); }
    template <typename T>
    void config(const std::string& key, const T& value) { doc_["config"][key] = value; }

    void write(const std::string& path) {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        doc_["duration_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        write_text_file(path, doc_.dump(2) + "\n");
    }

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

std::string loss_trace_csv(const std::vector<TraceEntry>& trace) {
    std::string out = "iteration,lr,loss\n";
    char line[96];
    for (const TraceEntry& e : trace) {
        std::snprintf(line, sizeof(line), "%d,%.9g,%.9g\n", e.iteration, e.lr, e.loss);
        out += line;
    }
    return out;
}

std::string vst_curve_csv(const Vst& vst, int points = 256) {
    std::string out = "z,f,f_inv\n";
    char line[128];
    for (int i = 0; i < points; ++i) {
        const double z = vst.z_min() + (vst.z_max() - vst.z_min()) * i / (points - 1);
        std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g\n", z, vst.forward(z), vst.inverse(z));
        out += line;
    }
    return out;
}

int resolve_threads(int requested, std::size_t tasks) {
    int threads = requested;
    if (threads <= 0) {
        if (const char* env = std::getenv("N2VST_THREADS"))
            threads = std::atoi(env);
    }
    if (threads <= 0)
        threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0)
        threads = 1;
    return static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(tasks, 1)));
}

}  // namespace

std::unique_ptr<Denoiser> make_denoiser(const std::string& kind, const std::string& weights_path,
                                        double blur_sigma, int dct_patch, int dct_stride,
                                        double dct_threshold_factor) {
    if (kind == "identity")
        return make_identity_denoiser();
    if (kind == "blur")
        return make_gaussian_blur_denoiser(blur_sigma);
    if (kind == "dct")
        return make_dct_denoiser(dct_patch, dct_stride, dct_threshold_factor);
    if (kind == "convnet") {
        if (weights_path.empty())
            throw std::invalid_argument("convnet denoiser requires --weights");
        return load_convnet(weights_path);
    }
    throw std::invalid_argument("unknown denoiser: " + kind);
}

BenchReport run_bench(const std::vector<std::pair<std::string, ImageBuffer>>& corpus,
                      const Denoiser& d, const BenchConfig& cfg) {
    if (corpus.empty())
        throw std::invalid_argument("bench: empty corpus");
    if (cfg.lambdas.empty())
        throw std::invalid_argument("bench: no lambda values");

    struct Task {
        const std::string* name;
        const ImageBuffer* clean;
        double lambda;
        std::uint64_t index;
    };
    std::vector<Task> tasks;
    for (const auto& [name, img] : corpus)
        for (double lambda : cfg.lambdas)
            tasks.push_back({&name, &img, lambda, tasks.size()});

    BenchReport report;
    report.rows.resize(tasks.size());

    const int threads = resolve_threads(cfg.threads, tasks.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task& task = tasks[i];
            const double a = 1.0 / task.lambda;

            Rng synth_rng(mix_seed(cfg.seed, 2 * task.index));
            const ImageBuffer noisy =
                synthesize(*task.clean, NoiseModel::poisson_lambda(task.lambda), synth_rng);

            TrainConfig tc;
            tc.iterations = cfg.iterations;
            tc.sigma_d = cfg.sigma_d;
            tc.seed = mix_seed(cfg.seed, 2 * task.index + 1);
            const TrainResult trained = train(noisy, d, tc);
            const ImageBuffer learned = infer(noisy, trained.vst, d, cfg.sigma_d);
            const ImageBuffer gat = gat_pipeline(noisy, a, 0.0, d, cfg.sigma_d);

            BenchRow row;
            row.image = *task.name;
            row.lambda = task.lambda;
            row.psnr_noisy = psnr(noisy, *task.clean);
            row.psnr_gat = psnr(gat, *task.clean);
            row.psnr_n2vst = psnr(learned, *task.clean);
            row.ssim_noisy = ssim(noisy, *task.clean);
            row.ssim_gat = ssim(gat, *task.clean);
            row.ssim_n2vst = ssim(learned, *task.clean);
            report.rows[i] = std::move(row);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    BenchRow& mean = report.aggregate;
    mean.image = "mean";
    const double n = static_cast<double>(report.rows.size());
    for (const BenchRow& row : report.rows) {
        mean.psnr_noisy += row.psnr_noisy / n;
        mean.psnr_gat += row.psnr_gat / n;
        mean.psnr_n2vst += row.psnr_n2vst / n;
        mean.ssim_noisy += row.ssim_noisy / n;
        mean.ssim_gat += row.ssim_gat / n;
        mean.ssim_n2vst += row.ssim_n2vst / n;
    }
    return report;
}

std::string bench_to_csv(const BenchReport& report) {
    std::string out =
        "image,lambda,psnr_noisy,psnr_gat,psnr_n2vst,ssim_noisy,ssim_gat,ssim_n2vst\n";
    const auto add = [&](const BenchRow& r, const std::string& lambda) {
        out += r.image + "," + lambda + "," + format_double(r.psnr_noisy, 4) + "," +
               format_double(r.psnr_gat, 4) + "," + format_double(r.psnr_n2vst, 4) + "," +
               format_double(r.ssim_noisy, 4) + "," + format_double(r.ssim_gat, 4) + "," +
               format_double(r.ssim_n2vst, 4) + "\n";
    };
    for (const BenchRow& r : report.rows) add(r, format_double(r.lambda, 2));
    add(report.aggregate, "-");
    return out;
}

std::string bench_to_markdown(const BenchReport& report) {
    std::string out =
        "| image | lambda | PSNR noisy | PSNR GAT | PSNR learned | SSIM noisy | SSIM GAT | "
        "SSIM learned |\n|---|---|---|---|---|---|---|---|\n";
    const auto add = [&](const BenchRow& r, const std::string& lambda) {
        out += "| " + r.image + " | " + lambda + " | " + format_double(r.psnr_noisy, 2) + " | " +
               format_double(r.psnr_gat, 2) + " | " + format_double(r.psnr_n2vst, 2) + " | " +
               format_double(r.ssim_noisy, 3) + " | " + format_double(r.ssim_gat, 3) + " | " +
               format_double(r.ssim_n2vst, 3) + " |\n";
    };
    for (const BenchRow& r : report.rows) add(r, format_double(r.lambda, 0));
    add(report.aggregate, "-");
    return out;
}

void check_bench(const BenchReport& report) {
    std::string failures;
    const BenchRow& mean = report.aggregate;
    if (!(mean.psnr_n2vst >= mean.psnr_gat - 0.5)) {
        failures += "mean learned-VST PSNR " + format_double(mean.psnr_n2vst, 3) +
                    " dB is more than 0.5 dB below the GAT-oracle mean " +
                    format_double(mean.psnr_gat, 3) + " dB\n";
    }
    if (!(mean.psnr_n2vst >= mean.psnr_noisy + 3.0)) {
        failures += "mean learned-VST PSNR " + format_double(mean.psnr_n2vst, 3) +
                    " dB is not 3 dB above the noisy mean " +
                    format_double(mean.psnr_noisy, 3) + " dB\n";
    }
    if (!failures.empty())
        throw CheckFailure(failures);
}

namespace {

struct CommonFlags {
    std::string input, output, weights;
    std::string denoiser = "dct";
    double sigma_d = 25.0 / 255.0;
    double blur_sigma = 1.0;
    int dct_patch = 8;
    int dct_stride = 4;
    double dct_factor = 3.0;
    std::uint64_t seed = 0;
};

void add_denoiser_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--denoiser", flags.denoiser, "identity, blur, dct or convnet")
        ->check(CLI::IsMember({"identity", "blur", "dct", "convnet"}));
    cmd->add_option("--weights", flags.weights, "convnet weights file (N2VCNN1)");
    cmd->add_option("--sigma-d", flags.sigma_d, "noise level handed to the denoiser");
    cmd->add_option("--blur-sigma", flags.blur_sigma, "blur denoiser kernel std");
    cmd->add_option("--dct-patch", flags.dct_patch, "DCT denoiser patch side");
    cmd->add_option("--dct-stride", flags.dct_stride, "DCT denoiser stride");
    cmd->add_option("--dct-factor", flags.dct_factor, "DCT soft-threshold factor");
}

int cmd_denoise(const CommonFlags& flags, int iters, int batch, int patch, int stride_k,
                bool per_channel, int bit_depth, const std::string& trace_path,
                const std::string& export_vst_path) {
    ManifestWriter manifest("denoise", flags.seed);
    manifest.add_input(flags.input);
    manifest.config("denoiser", flags.denoiser);
    manifest.config("sigma_d", flags.sigma_d);
    manifest.config("iters", iters);
    manifest.config("batch", batch);
    manifest.config("patch", patch);
    manifest.config("stride_k", stride_k);
    manifest.config("per_channel", per_channel);
    manifest.config("bit_depth", bit_depth);

    const ImageBuffer noisy = load_image(flags.input);
    const auto d = make_denoiser(flags.denoiser, flags.weights, flags.blur_sigma,
                                 flags.dct_patch, flags.dct_stride, flags.dct_factor);

    TrainConfig tc;
    tc.iterations = iters;
    tc.batch = batch;
    tc.patch = patch;
    tc.stride_k = stride_k;
    tc.sigma_d = flags.sigma_d;
    tc.seed = flags.seed;
    tc.shared_vst_across_channels = !per_channel;

    const std::string ckpt_base = sibling_path(flags.output, ".vst");
    const std::string trace_file =
        trace_path.empty() ? sibling_path(flags.output, ".loss.csv") : trace_path;

    if (per_channel && noisy.channels > 1) {
        const std::vector<TrainResult> results = train_per_channel(noisy, *d, tc);
        std::vector<Vst> vsts;
        std::string trace;
        for (std::size_t ch = 0; ch < results.size(); ++ch) {
            const std::string path = ckpt_base + ".c" + std::to_string(ch) + ".json";
            write_text_file(path, results[ch].vst.serialize());
            manifest.add_output(path);
            vsts.push_back(results[ch].vst);
            trace += loss_trace_csv(results[ch].trace);
        }
        const ImageBuffer out = infer_per_channel(noisy, vsts, *d, flags.sigma_d);
        save_image(out, flags.output, bit_depth);
        write_text_file(trace_file, trace);
        if (!export_vst_path.empty())
            write_text_file(export_vst_path, vst_curve_csv(vsts.front()));
    } else {
        const TrainResult result = train(noisy, *d, tc);
        const ImageBuffer out = infer(noisy, result.vst, *d, flags.sigma_d);
        save_image(out, flags.output, bit_depth);
        write_text_file(ckpt_base + ".json", result.vst.serialize());
        manifest.add_output(ckpt_base + ".json");
        write_text_file(trace_file, loss_trace_csv(result.trace));
        if (!export_vst_path.empty()) {
            write_text_file(export_vst_path, vst_curve_csv(result.vst));
            manifest.add_output(export_vst_path);
        }
    }
    manifest.add_output(flags.output);
    manifest.add_output(trace_file);
    manifest.write(sibling_path(flags.output, ".manifest.json"));
    std::printf("denoised %s -> %s\n", flags.input.c_str(), flags.output.c_str());
    return kExitOk;
}

int cmd_synth(const CommonFlags& flags, const std::string& model, double lambda, double a,
              double b, double sigma) {
    if (fs::path(flags.output).extension() != ".npf")
        throw std::invalid_argument("synth writes the NPF1 float container; use a .npf output");

    NoiseModel m;
    if (model == "poisson") {
        if (lambda > 0.0)
            m = NoiseModel::poisson_lambda(lambda);
        else if (a > 0.0)
            m = NoiseModel::poisson_gauss(a, std::max(b, 0.0));
        else
            throw std::invalid_argument("synth --model poisson needs --lambda or --a");
    } else if (model == "gauss") {
        m = NoiseModel::gaussian(sigma);
    } else {
        throw std::invalid_argument("synth --model must be poisson or gauss");
    }

    ManifestWriter manifest("synth", flags.seed);
    manifest.add_input(flags.input);
    manifest.config("model", model);
    manifest.config("lambda", lambda);
    manifest.config("a", m.kind == NoiseModel::Kind::PoissonGauss ? m.a : 0.0);
    manifest.config("b", m.kind == NoiseModel::Kind::PoissonGauss ? m.b : 0.0);
    manifest.config("sigma", sigma);

    const ImageBuffer clean = load_image(flags.input);
    Rng rng(flags.seed);
    const ImageBuffer noisy = synthesize(clean, m, rng);
    save_npf(noisy, flags.output);
    manifest.add_output(flags.output);
    manifest.write(sibling_path(flags.output, ".manifest.json"));
    std::printf("synthesized %s -> %s\n", flags.input.c_str(), flags.output.c_str());
    return kExitOk;
}

int cmd_gat(const CommonFlags& flags, double lambda, double a, double b, int bit_depth) {
    double pa = a, pb = b;
    if (lambda > 0.0) {
        pa = 1.0 / lambda;
        pb = 0.0;
    }
    if (!(pa > 0.0))
        throw std::invalid_argument("gat needs --lambda or --a/--b oracle parameters");

    ManifestWriter manifest("gat", flags.seed);
    manifest.add_input(flags.input);
    manifest.config("a", pa);
    manifest.config("b", pb);
    manifest.config("denoiser", flags.denoiser);
    manifest.config("sigma_d", flags.sigma_d);

    const ImageBuffer noisy = load_image(flags.input);
    const auto d = make_denoiser(flags.denoiser, flags.weights, flags.blur_sigma,
                                 flags.dct_patch, flags.dct_stride, flags.dct_factor);
    const ImageBuffer out = gat_pipeline(noisy, pa, pb, *d, flags.sigma_d);
    save_image(out, flags.output, bit_depth);
    manifest.add_output(flags.output);
    manifest.write(sibling_path(flags.output, ".manifest.json"));
    std::printf("gat pipeline %s -> %s\n", flags.input.c_str(), flags.output.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& test_path, const std::string& ref_path,
             const std::string& output) {
    const ImageBuffer test = load_image(test_path);
    const ImageBuffer ref = load_image(ref_path);
    const double p = psnr(test, ref);
    const double s = ssim(test, ref);
    const std::string report =
        "psnr_db: " + format_double(p) + "\nssim: " + format_double(s) + "\n";
    std::fputs(report.c_str(), stdout);
    if (!output.empty()) {
        write_text_file(output, report);
        ManifestWriter manifest("eval", 0);
        manifest.add_input(test_path);
        manifest.add_input(ref_path);
        manifest.add_output(output);
        manifest.write(sibling_path(output, ".manifest.json"));
    }
    return kExitOk;
}

int cmd_export_vst(const std::string& input, const std::string& output) {
    const Vst vst = Vst::deserialize(read_text_file(input));
    write_text_file(output, vst_curve_csv(vst));
    ManifestWriter manifest("export-vst", 0);
    manifest.add_input(input);
    manifest.add_output(output);
    manifest.write(sibling_path(output, ".manifest.json"));
    std::printf("exported %s -> %s\n", input.c_str(), output.c_str());
    return kExitOk;
}

int cmd_bench(const CommonFlags& flags, const std::vector<double>& lambdas, int iters,
              bool check) {
    std::vector<std::pair<std::string, ImageBuffer>> corpus;
    if (!fs::is_directory(flags.input))
        throw std::invalid_argument("bench --input must be a directory of clean images");
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(flags.input)) {
        const std::string ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".npf")
            names.push_back(entry.path().string());
    }
    std::sort(names.begin(), names.end());
    for (const std::string& name : names)
        corpus.emplace_back(fs::path(name).filename().string(), load_image(name));
    if (corpus.empty())
        throw std::invalid_argument("bench: no images found in " + flags.input);

    ManifestWriter manifest("bench", flags.seed);
    manifest.add_input(flags.input);
    manifest.config("lambdas", lambdas);
    manifest.config("iters", iters);
    manifest.config("denoiser", flags.denoiser);
    manifest.config("sigma_d", flags.sigma_d);
    manifest.config("check", check);

    const auto d = make_denoiser(flags.denoiser, flags.weights, flags.blur_sigma,
                                 flags.dct_patch, flags.dct_stride, flags.dct_factor);
    BenchConfig bc;
    bc.lambdas = lambdas;
    bc.iterations = iters;
    bc.sigma_d = flags.sigma_d;
    bc.seed = flags.seed;
    const BenchReport report = run_bench(corpus, *d, bc);

    fs::create_directories(flags.output);
    const std::string csv_path = (fs::path(flags.output) / "bench.csv").string();
    const std::string md_path = (fs::path(flags.output) / "bench.md").string();
    write_text_file(csv_path, bench_to_csv(report));
    write_text_file(md_path, bench_to_markdown(report));
    manifest.add_output(csv_path);
    manifest.add_output(md_path);
    manifest.write((fs::path(flags.output) / "bench.manifest.json").string());
    std::fputs(bench_to_markdown(report).c_str(), stdout);

    if (check)
        check_bench(report);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"zero-shot image denoising with a learned variance-stabilizing transform"};
    app.require_subcommand(1);

    CommonFlags flags;
    int iters = 2000, batch = 4, patch = 64, stride_k = 4, bit_depth = 8;
    bool per_channel = false, check = false;
    double lambda = 0.0, a = 0.0, b = 0.0, sigma = 0.0;
    std::string model = "poisson", ref_path, trace_path, export_vst_path;
    std::vector<double> lambdas{5.0, 25.0, 50.0};

    CLI::App* denoise = app.add_subcommand("denoise", "train a VST on the input image and denoise it");
    denoise->add_option("--input", flags.input)->required();
    denoise->add_option("--output", flags.output)->required();
    add_denoiser_flags(denoise, flags);
    denoise->add_option("--iters", iters)->check(CLI::PositiveNumber);
    denoise->add_option("--batch", batch)->check(CLI::PositiveNumber);
    denoise->add_option("--patch", patch)->check(CLI::PositiveNumber);
    denoise->add_option("--stride-k", stride_k)->check(CLI::Range(2, 64));
    denoise->add_option("--seed", flags.seed);
    denoise->add_option("--bit-depth", bit_depth)->check(CLI::IsMember({8, 16}));
    denoise->add_option("--trace", trace_path, "loss-trace CSV path");
    denoise->add_option("--export-vst", export_vst_path, "write the learned curve as CSV");
    denoise->add_flag("--per-channel", per_channel, "learn one VST per channel");

    CLI::App* synth = app.add_subcommand("synth", "add synthetic noise to a clean image");
    synth->add_option("--input", flags.input)->required();
    synth->add_option("--output", flags.output)->required();
    synth->add_option("--model", model, "poisson or gauss");
    synth->add_option("--lambda", lambda);
    synth->add_option("--a", a);
    synth->add_option("--b", b);
    synth->add_option("--sigma", sigma);
    synth->add_option("--seed", flags.seed);

    CLI::App* gat = app.add_subcommand("gat", "GAT-oracle denoising baseline");
    gat->add_option("--input", flags.input)->required();
    gat->add_option("--output", flags.output)->required();
    add_denoiser_flags(gat, flags);
    gat->add_option("--lambda", lambda);
    gat->add_option("--a", a);
    gat->add_option("--b", b);
    gat->add_option("--bit-depth", bit_depth)->check(CLI::IsMember({8, 16}));

    CLI::App* eval = app.add_subcommand("eval", "PSNR/SSIM of a test image against a reference");
    eval->add_option("--input", flags.input)->required();
    eval->add_option("--ref", ref_path)->required();
    eval->add_option("--output", flags.output, "optional report file");

    CLI::App* export_vst = app.add_subcommand("export-vst", "sample a VST checkpoint as CSV");
    export_vst->add_option("--input", flags.input)->required();
    export_vst->add_option("--output", flags.output)->required();

    CLI::App* bench = app.add_subcommand("bench", "desk-scale benchmark over a corpus directory");
    bench->add_option("--input", flags.input)->required();
    bench->add_option("--output", flags.output)->required();
    add_denoiser_flags(bench, flags);
    bench->add_option("--lambdas", lambdas, "Poisson lambda values");
    bench->add_option("--iters", iters)->check(CLI::PositiveNumber);
    bench->add_option("--seed", flags.seed);
    bench->add_flag("--check", check, "enforce the quality thresholds; exit 1 on violation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (denoise->parsed())
            return cmd_denoise(flags, iters, batch, patch, stride_k, per_channel, bit_depth,
                               trace_path, export_vst_path);
        if (synth->parsed())
            return cmd_synth(flags, model, lambda, a, b, sigma);
        if (gat->parsed())
            return cmd_gat(flags, lambda, a, b, bit_depth);
        if (eval->parsed())
            return cmd_eval(flags.input, ref_path, flags.output);
        if (export_vst->parsed())
            return cmd_export_vst(flags.input, flags.output);
        if (bench->parsed())
            return cmd_bench(flags, lambdas, iters, check);
    } catch (const CheckFailure& e) {
        std::fprintf(stderr, "check failed:\n%s", e.what());
        return kExitCheckFailed;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    }
    return kExitUsage;
}

}  // namespace n2v::cli

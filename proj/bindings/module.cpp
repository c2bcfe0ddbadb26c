#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noise2vst/blindspot.hpp"
#include "noise2vst/denoiser.hpp"
#include "noise2vst/image.hpp"
#include "noise2vst/noise_lab.hpp"
#include "noise2vst/trainer.hpp"
#include "noise2vst/vst.hpp"

namespace py = pybind11;
using namespace n2v;

namespace {

ImageBuffer to_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() == 2) {
        ImageBuffer img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)), 1);
        std::memcpy(img.data.data(), arr.data(), sizeof(double) * img.size());
        return img;
    }
    if (arr.ndim() == 3) {
        const int c = static_cast<int>(arr.shape(2));
        ImageBuffer img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)), c);
        std::memcpy(img.data.data(), arr.data(), sizeof(double) * img.size());
        return img;
    }
    throw std::invalid_argument("expected an (H, W) or (H, W, C) array");
}

py::array_t<double> from_image(const ImageBuffer& img) {
    if (img.channels == 1) {
        py::array_t<double> arr({img.height, img.width});
        std::memcpy(arr.mutable_data(), img.data.data(), sizeof(double) * img.size());
        return arr;
    }
    py::array_t<double> arr({img.height, img.width, img.channels});
    std::memcpy(arr.mutable_data(), img.data.data(), sizeof(double) * img.size());
    return arr;
}

NoiseModel parse_model(const std::string& kind, double a, double b, double sigma,
                       double lambda) {
    if (kind == "poisson") {
        if (lambda > 0.0) return NoiseModel::poisson_lambda(lambda);
        return NoiseModel::poisson_gauss(a, b);
    }
    if (kind == "gauss") return NoiseModel::gaussian(sigma);
    throw std::invalid_argument("model must be 'poisson' or 'gauss'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "zero-shot denoising with a learned variance-stabilizing transform";

    py::register_exception<IoError>(m, "IoError");
    py::register_exception<FormatError>(m, "FormatError");

    py::class_<Vst>(m, "Vst")
        .def_static("identity", &Vst::identity, py::arg("z_min"), py::arg("z_max"),
                    py::arg("n") = 128)
        .def(py::init([](double z_min, double z_max, int n, std::vector<double> theta,
                         double alpha, double beta) {
                 return Vst(z_min, z_max, n, std::move(theta), alpha, beta);
             }),
             py::arg("z_min"), py::arg("z_max"), py::arg("n"), py::arg("theta"),
             py::arg("alpha"), py::arg("beta"))
        .def_property_readonly("n", &Vst::knot_count)
        .def_property_readonly("z_min", &Vst::z_min)
        .def_property_readonly("z_max", &Vst::z_max)
        .def_property_readonly("theta", [](const Vst& v) { return v.theta(); })
        .def_property_readonly("alpha", &Vst::alpha)
        .def_property_readonly("beta", &Vst::beta)
        .def_property_readonly("parameter_count", &Vst::parameter_count)
        .def("knot_positions", &Vst::knot_positions)
        .def("knot_values", [](const Vst& v) { return v.knot_values(); })
        .def("forward", [](const Vst& v, double z) { return v.forward(z); })
        .def("inverse", [](const Vst& v, double w) { return v.inverse(w); })
        .def("forward_image",
             [](const Vst& v, const py::array_t<double, py::array::c_style | py::array::forcecast>& z) {
                 return from_image(v.forward(to_image(z)));
             })
        .def("inverse_image",
             [](const Vst& v, const py::array_t<double, py::array::c_style | py::array::forcecast>& w) {
                 return from_image(v.inverse(to_image(w)));
             })
        .def("serialize", &Vst::serialize)
        .def_static("deserialize", &Vst::deserialize);

    py::class_<Denoiser, std::shared_ptr<Denoiser>>(m, "Denoiser")
        .def("apply",
             [](const Denoiser& d, const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
                double sigma) { return from_image(d.apply(to_image(img), sigma)); },
             py::arg("img"), py::arg("sigma"))
        .def_property_readonly("name", &Denoiser::name);

    m.def("identity_denoiser",
          []() { return std::shared_ptr<Denoiser>(make_identity_denoiser()); });
    m.def("gaussian_blur_denoiser",
          [](double sigma_blur) {
              return std::shared_ptr<Denoiser>(make_gaussian_blur_denoiser(sigma_blur));
          },
          py::arg("sigma_blur") = 1.0);
    m.def("dct_denoiser",
          [](int patch, int stride, double threshold_factor) {
              return std::shared_ptr<Denoiser>(make_dct_denoiser(patch, stride, threshold_factor));
          },
          py::arg("patch") = 8, py::arg("stride") = 4, py::arg("threshold_factor") = 3.0);
    m.def("convnet_denoiser",
          [](const std::string& path) { return std::shared_ptr<Denoiser>(load_convnet(path)); },
          py::arg("path"));

    m.def("load_image",
          [](const std::string& path, double expected_range) {
              return from_image(load_image(path, expected_range));
          },
          py::arg("path"), py::arg("expected_range") = 0.0);
    m.def("save_image",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::string& path, int bit_depth) { save_image(to_image(img), path, bit_depth); },
          py::arg("img"), py::arg("path"), py::arg("bit_depth") = 8);
    m.def("save_npf",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::string& path) { save_npf(to_image(img), path); },
          py::arg("img"), py::arg("path"));

    m.def("psnr",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& b, double peak) {
              return psnr(to_image(a), to_image(b), peak);
          },
          py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);
    m.def("ssim",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
              return ssim(to_image(a), to_image(b));
          },
          py::arg("a"), py::arg("b"));

    m.def("synthesize",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& clean,
             const std::string& model, double a, double b, double sigma, double lambda,
             std::uint64_t seed) {
              Rng rng(seed);
              return from_image(synthesize(to_image(clean), parse_model(model, a, b, sigma, lambda), rng));
          },
          py::arg("clean"), py::arg("model") = "poisson", py::arg("a") = 0.0, py::arg("b") = 0.0,
          py::arg("sigma") = 0.0, py::arg("lambda_") = 0.0, py::arg("seed") = 0);

    m.def("gat_forward", &gat_forward, py::arg("z"), py::arg("a"), py::arg("b"));
    m.def("gat_inverse",
          [](double w, double a, double b, const std::string& mode) {
              return gat_inverse(w, a, b,
                                 mode == "unbiased" ? GatInverseMode::Unbiased
                                                    : GatInverseMode::Algebraic);
          },
          py::arg("w"), py::arg("a"), py::arg("b"), py::arg("mode") = "unbiased");
    m.def("gat_pipeline",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& z, double a,
             double b, const std::shared_ptr<Denoiser>& d, double sigma_d) {
              return from_image(gat_pipeline(to_image(z), a, b, *d, sigma_d));
          },
          py::arg("z"), py::arg("a"), py::arg("b"), py::arg("denoiser"),
          py::arg("sigma_d") = 25.0 / 255.0);

    m.def("train",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::shared_ptr<Denoiser>& d, int iterations, int batch, int patch,
             double lr0, double sigma_d, int stride_k, std::uint64_t seed) {
              TrainConfig cfg;
              cfg.iterations = iterations;
              cfg.batch = batch;
              cfg.patch = patch;
              cfg.lr0 = lr0;
              cfg.sigma_d = sigma_d;
              cfg.stride_k = stride_k;
              cfg.seed = seed;
              TrainResult result = train(to_image(img), *d, cfg);
              std::vector<double> losses;
              losses.reserve(result.trace.size());
              for (const TraceEntry& e : result.trace) losses.push_back(e.loss);
              return py::make_tuple(result.vst, losses);
          },
          py::arg("img"), py::arg("denoiser"), py::arg("iterations") = 2000, py::arg("batch") = 4,
          py::arg("patch") = 64, py::arg("lr0") = 0.01, py::arg("sigma_d") = 25.0 / 255.0,
          py::arg("stride_k") = 4, py::arg("seed") = 0);

    m.def("infer",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const Vst& vst, const std::shared_ptr<Denoiser>& d, double sigma_d) {
              return from_image(infer(to_image(img), vst, *d, sigma_d));
          },
          py::arg("img"), py::arg("vst"), py::arg("denoiser"), py::arg("sigma_d") = 25.0 / 255.0);

    m.def("denoise",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
             const std::shared_ptr<Denoiser>& d, int iterations, double sigma_d,
             std::uint64_t seed) {
              TrainConfig cfg;
              cfg.iterations = iterations;
              cfg.sigma_d = sigma_d;
              cfg.seed = seed;
              const ImageBuffer buf = to_image(img);
              TrainResult result = train(buf, *d, cfg);
              return py::make_tuple(from_image(infer(buf, result.vst, *d, sigma_d)), result.vst);
          },
          py::arg("img"), py::arg("denoiser"), py::arg("iterations") = 2000,
          py::arg("sigma_d") = 25.0 / 255.0, py::arg("seed") = 0,
          "Train a VST on the image itself, then denoise it; returns (estimate, vst).");

    m.attr("__version__") = "0.1.0";
}

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ebl/baselines.hpp"
#include "ebl/elastic_loss.hpp"
#include "ebl/evolve.hpp"
#include "ebl/metrics.hpp"
#include "ebl/phantom.hpp"
#include "ebl/toy_net.hpp"

namespace py = pybind11;
using namespace ebl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ScalarField2D to_field(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    const int h = static_cast<int>(a.shape(0));
    const int w = static_cast<int>(a.shape(1));
    ScalarField2D f(w, h);
    std::copy(a.data(), a.data() + a.size(), f.values().begin());
    return f;
}

BinaryMask to_mask(const MaskArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D mask");
    const int h = static_cast<int>(a.shape(0));
    const int w = static_cast<int>(a.shape(1));
    BinaryMask m(w, h);
    for (py::ssize_t i = 0; i < a.size(); ++i) m[i] = a.data()[i] != 0;
    return m;
}

py::array_t<double> to_array(const ScalarField2D& f) {
    py::array_t<double> a({f.height(), f.width()});
    std::copy(f.values().begin(), f.values().end(), a.mutable_data());
    return a;
}

py::array_t<bool> to_array(const BinaryMask& m) {
    py::array_t<bool> a({m.height(), m.width()});
    for (std::size_t i = 0; i < m.size(); ++i) a.mutable_data()[i] = m[i] != 0;
    return a;
}

PilParams pil_params(double alpha, double beta, const std::string& kind, double prefactor,
                     bool same_orientation, double gt_sigma) {
    PilParams p;
    p.alpha = alpha;
    p.heaviside.beta = beta;
    if (kind == "hardtanh") p.heaviside.kind = HeavisideKind::HardTanh;
    else if (kind == "sinusoidal") p.heaviside.kind = HeavisideKind::Sinusoidal;
    else throw std::invalid_argument("kind must be 'hardtanh' or 'sinusoidal'");
    p.prefactor = prefactor;
    p.orientation = same_orientation ? Orientation::Same : Orientation::Opposite;
    p.gt_sigma = gt_sigma;
    p.validate();
    return p;
}

py::dict report_dict(const MetricsReport& r) {
    py::dict d;
    d["tp"] = r.counts.tp;
    d["fp"] = r.counts.fp;
    d["tn"] = r.counts.tn;
    d["fn"] = r.counts.fn;
    d["sensitivity"] = r.sensitivity;
    d["specificity"] = r.specificity;
    d["f1"] = r.f1;
    d["auc"] = r.auc;
    return d;
}

constexpr double kDefaultPrefactor = 1.0 / (8.0 * std::numbers::pi);

#define PIL_ARGS                                                                                      \
    py::arg("alpha") = 0.35, py::arg("beta") = 0.25, py::arg("kind") = "hardtanh",                   \
        py::arg("prefactor") = kDefaultPrefactor, py::arg("same_orientation") = false,               \
        py::arg("gt_sigma") = 0.0

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Elastic-interaction boundary loss: energies, gradients, phantoms and a toy network";

    m.def(
        "loss_and_grad",
        [](const MaskArray& gt, const Array& prob, double alpha, double beta, const std::string& kind,
           double prefactor, bool same, double gt_sigma) {
            const ScalarField2D p = to_field(prob);
            const SpectralPlan plan(p.width(), p.height());
            const EnergyGrad eg = loss_and_grad(to_mask(gt), p, pil_params(alpha, beta, kind, prefactor, same, gt_sigma), plan);
            return py::make_tuple(eg.energy, to_array(eg.grad_p));
        },
        py::arg("gt"), py::arg("prob"), PIL_ARGS, "Energy of prob against mask gt and its gradient dE/dP.");

    m.def(
        "energy_spectral",
        [](const Array& d, double prefactor) {
            const ScalarField2D f = to_field(d);
            return energy_spectral(f, SpectralPlan(f.width(), f.height()), prefactor);
        },
        py::arg("d"), py::arg("prefactor") = kDefaultPrefactor);
    m.def(
        "energy_direct",
        [](const Array& d, double prefactor, bool force) {
            const ScalarField2D f = to_field(d);
            return energy_direct(f, SpectralPlan(f.width(), f.height()), prefactor, force);
        },
        py::arg("d"), py::arg("prefactor") = kDefaultPrefactor, py::arg("force") = false);
    m.def(
        "energy_padded",
        [](const Array& d, double prefactor, int pad) { return energy_spectral_padded(to_field(d), prefactor, pad); },
        py::arg("d"), py::arg("prefactor") = kDefaultPrefactor, py::arg("pad_factor") = 2);
    m.def(
        "apply_halfnorm",
        [](const Array& f) {
            const ScalarField2D x = to_field(f);
            return to_array(SpectralPlan(x.width(), x.height()).apply_halfnorm(x));
        },
        py::arg("f"));
    m.def(
        "kernel_table", [](int height, int width) { return to_array(SpectralPlan(width, height).kernel_table()); },
        py::arg("height"), py::arg("width"));

    m.def(
        "bce", [](const Array& p, const MaskArray& g) {
            const LossGrad lg = bce_loss_grad(to_field(p), to_mask(g));
            return py::make_tuple(lg.loss, to_array(lg.grad_p));
        },
        py::arg("prob"), py::arg("gt"));
    m.def(
        "dice", [](const Array& p, const MaskArray& g) {
            const LossGrad lg = dice_loss_grad(to_field(p), to_mask(g));
            return py::make_tuple(lg.loss, to_array(lg.grad_p));
        },
        py::arg("prob"), py::arg("gt"));
    m.def(
        "surface", [](const Array& p, const MaskArray& g) {
            const LossGrad lg = surface_loss_grad(to_field(p), to_mask(g));
            return py::make_tuple(lg.loss, to_array(lg.grad_p));
        },
        py::arg("prob"), py::arg("gt"));
    m.def("distance_transform", [](const MaskArray& g) { return to_array(distance_transform(to_mask(g))); },
          py::arg("mask"));

    m.def(
        "evolve",
        [](const MaskArray& gt, const Array& p0, double alpha, double eta, int max_steps, double tol) {
            const BinaryMask g = to_mask(gt);
            EvolveConfig cfg;
            cfg.pil.alpha = alpha;
            cfg.eta = eta;
            cfg.max_steps = max_steps;
            cfg.tol = tol;
            const EvolveTrace t = gradient_flow(to_field(p0), g, cfg, SpectralPlan(g.width(), g.height()));
            py::dict d;
            d["energies"] = t.energies;
            d["final"] = to_array(t.final_p);
            d["iou"] = t.iou_final;
            d["steps"] = t.steps;
            return d;
        },
        py::arg("gt"), py::arg("p0"), py::arg("alpha") = 1.0, py::arg("eta") = 0.5, py::arg("max_steps") = 500,
        py::arg("tol") = 1e-8, "Projected gradient descent of p0 towards gt.");
    m.def("disc_mask", [](int h, int w, double cy, double cx, double r) { return to_array(disc_mask(w, h, cx, cy, r)); },
          py::arg("height"), py::arg("width"), py::arg("cy"), py::arg("cx"), py::arg("radius"));

    m.def(
        "phantom",
        [](int size, std::uint64_t seed, int n_branches, double contrast, double noise) {
            PhantomSpec spec;
            spec.width = spec.height = size;
            spec.seed = seed;
            spec.n_branches = n_branches;
            spec.contrast = contrast;
            spec.noise_sigma = noise;
            const Phantom ph = generate(spec);
            return py::make_tuple(to_array(ph.image), to_array(ph.mask));
        },
        py::arg("size") = 64, py::arg("seed") = 7, py::arg("n_branches") = 9, py::arg("contrast") = 0.6,
        py::arg("noise") = 0.1, "Returns (image, mask).");

    m.def(
        "evaluate",
        [](const Array& prob, const MaskArray& gt, double threshold) {
            return report_dict(evaluate(to_field(prob), to_mask(gt), threshold));
        },
        py::arg("prob"), py::arg("gt"), py::arg("threshold") = 0.5);
    m.def("roc_auc", [](const Array& prob, const MaskArray& gt) { return roc_auc(to_field(prob), to_mask(gt)); },
          py::arg("prob"), py::arg("gt"));

    py::class_<ToyNet>(m, "ToyNet")
        .def(py::init<>())
        .def_static("random", &ToyNet::random, py::arg("seed"))
        .def("forward", [](const ToyNet& net, const Array& image) { return to_array(forward(net, to_field(image))); },
             py::arg("image"))
        .def_property_readonly("parameter_count", &ToyNet::parameter_count)
        .def("parameters", &ToyNet::parameters)
        .def("set_parameters", &ToyNet::set_parameters, py::arg("flat"))
        .def(
            "train",
            [](ToyNet& net, const std::vector<Array>& images, const std::vector<MaskArray>& masks,
               const std::string& loss, int epochs, double lr, int batch_size, std::uint64_t seed, double alpha) {
                if (images.size() != masks.size() || images.empty()) {
                    throw std::invalid_argument("need equally many (non-zero) images and masks");
                }
                std::vector<Sample> data;
                for (std::size_t i = 0; i < images.size(); ++i) data.push_back({to_field(images[i]), to_mask(masks[i])});
                TrainConfig cfg;
                cfg.loss = parse_loss_kind(loss);
                cfg.epochs = epochs;
                cfg.lr = lr;
                cfg.batch_size = batch_size;
                cfg.seed = seed;
                cfg.pil.alpha = alpha;
                const SpectralPlan plan(data[0].image.width(), data[0].image.height());
                py::gil_scoped_release release;
                return train(net, data, cfg, plan).epoch_loss;
            },
            py::arg("images"), py::arg("masks"), py::arg("loss") = "pil", py::arg("epochs") = 200,
            py::arg("lr") = 1e-3, py::arg("batch_size") = 1, py::arg("seed") = 1, py::arg("alpha") = 0.35,
            "Adam training in place; returns the per-epoch mean loss.")
        .def("save", [](const ToyNet& net, const std::string& path) { save_checkpoint(path, net); }, py::arg("path"))
        .def_static("load", [](const std::string& path) { return load_checkpoint(path); }, py::arg("path"))
        .def("to_bytes",
             [](const ToyNet& net) {
                 std::ostringstream out;
                 save_checkpoint(out, net);
                 return py::bytes(out.str());
             })
        .def_static("from_bytes", [](const py::bytes& b) {
            std::istringstream in{std::string(b)};
            return load_checkpoint(in);
        })
        .def(py::self == py::self);
}

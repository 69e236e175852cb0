#include "ebl/toy_net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ebl/baselines.hpp"
#include "ebl/rng.hpp"

namespace ebl {

namespace {

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

FeatureMap conv_forward(const ConvLayer& layer, const FeatureMap& in) {
    const int w = in.width;
    const int h = in.height;
    const int r = layer.kernel / 2;
    FeatureMap out(layer.out_channels, w, h);
    for (int o = 0; o < layer.out_channels; ++o) {
        double* dst = &out.data[std::size_t(o) * w * h];
        std::fill(dst, dst + std::size_t(w) * h, layer.bias[o]);
        for (int i = 0; i < layer.in_channels; ++i) {
            const double* src = &in.data[std::size_t(i) * w * h];
            for (int ky = 0; ky < layer.kernel; ++ky) {
                const int oy = ky - r;
                for (int kx = 0; kx < layer.kernel; ++kx) {
                    const int ox = kx - r;
                    const double wt = layer.w(o, i, ky, kx);
                    if (wt == 0.0) continue;
                    const int y0 = std::max(0, -oy);
                    const int y1 = std::min(h, h - oy);
                    const int x0 = std::max(0, -ox);
                    const int x1 = std::min(w, w - ox);
                    for (int y = y0; y < y1; ++y) {
                        double* drow = dst + std::size_t(y) * w;
                        const double* srow = src + std::size_t(y + oy) * w + ox;
                        for (int x = x0; x < x1; ++x) drow[x] += wt * srow[x];
                    }
                }
            }
        }
    }
    for (double& v : out.data) {
        switch (layer.activation) {
            case Activation::ReLU: v = std::max(0.0, v); break;
            case Activation::Sigmoid: v = sigmoid(v); break;
            case Activation::None: break;
        }
    }
    return out;
}

// grad_z from grad of the post-activation output; out holds post-activation values.
void activation_backward(Activation act, const FeatureMap& out, std::vector<double>& grad) {
    for (std::size_t k = 0; k < grad.size(); ++k) {
        switch (act) {
            case Activation::ReLU: if (out.data[k] <= 0.0) grad[k] = 0.0; break;
            case Activation::Sigmoid: grad[k] *= out.data[k] * (1.0 - out.data[k]); break;
            case Activation::None: break;
        }
    }
}

FeatureMap to_map(const ScalarField2D& image) {
    FeatureMap m(1, image.width(), image.height());
    std::copy(image.values().begin(), image.values().end(), m.data.begin());
    return m;
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint truncated");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= std::uint32_t(b[k]) << (8 * k);
    return v;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("checkpoint truncated");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t(b[k]) << (8 * k);
    return std::bit_cast<double>(v);
}

}  // namespace

ConvLayer::ConvLayer(int in, int out, int k, Activation act)
    : in_channels(in), out_channels(out), kernel(k), activation(act),
      weights(std::size_t(in) * out * k * k, 0.0), bias(std::size_t(out), 0.0) {
    if (k != 1 && k != 3) throw std::invalid_argument("kernel size must be 1 or 3");
    if (in < 1 || out < 1) throw std::invalid_argument("channel counts must be positive");
}

ToyNet::ToyNet()
    : layers_{ConvLayer(1, 8, 3, Activation::ReLU), ConvLayer(8, 8, 3, Activation::ReLU),
              ConvLayer(8, 1, 1, Activation::Sigmoid)} {}

ToyNet ToyNet::random(std::uint64_t seed) {
    ToyNet net;
    SplitMix64 rng(seed);
    for (auto& layer : net.layers_) {
        const double bound = std::sqrt(1.0 / (layer.in_channels * layer.kernel * layer.kernel));
        for (double& v : layer.weights) v = rng.uniform(-bound, bound);
        for (double& v : layer.bias) v = rng.uniform(-bound, bound);
    }
    return net;
}

std::size_t ToyNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
    return n;
}

std::vector<double> ToyNet::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& layer : layers_) {
        flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
        flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
    }
    return flat;
}

void ToyNet::set_parameters(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) throw std::invalid_argument("parameter count mismatch");
    auto it = flat.begin();
    for (auto& layer : layers_) {
        std::copy_n(it, layer.weights.size(), layer.weights.begin());
        it += static_cast<std::ptrdiff_t>(layer.weights.size());
        std::copy_n(it, layer.bias.size(), layer.bias.begin());
        it += static_cast<std::ptrdiff_t>(layer.bias.size());
    }
}

double ToyNet::parameter(std::size_t index) const {
    for (const auto& layer : layers_) {
        if (index < layer.weights.size()) return layer.weights[index];
        index -= layer.weights.size();
        if (index < layer.bias.size()) return layer.bias[index];
        index -= layer.bias.size();
    }
    throw std::out_of_range("parameter index");
}

void ToyNet::set_parameter(std::size_t index, double value) {
    for (auto& layer : layers_) {
        if (index < layer.weights.size()) {
            layer.weights[index] = value;
            return;
        }
        index -= layer.weights.size();
        if (index < layer.bias.size()) {
            layer.bias[index] = value;
            return;
        }
        index -= layer.bias.size();
    }
    throw std::out_of_range("parameter index");
}

ScalarField2D forward_cached(const ToyNet& net, const ScalarField2D& image, ForwardCache& cache) {
    image.check_finite();
    cache.inputs.clear();
    cache.outputs.clear();
    FeatureMap current = to_map(image);
    for (const auto& layer : net.layers()) {
        cache.inputs.push_back(current);
        current = conv_forward(layer, current);
        cache.outputs.push_back(current);
    }
    return ScalarField2D(image.width(), image.height(), current.data, image.spacing());
}

ScalarField2D forward(const ToyNet& net, const ScalarField2D& image) {
    ForwardCache cache;
    return forward_cached(net, image, cache);
}

std::vector<double> backward(const ToyNet& net, const ForwardCache& cache,
                             const ScalarField2D& grad_out) {
    const auto& layers = net.layers();
    if (cache.outputs.size() != layers.size()) throw std::invalid_argument("stale forward cache");
    const FeatureMap& last = cache.outputs.back();
    if (grad_out.width() != last.width || grad_out.height() != last.height) {
        throw std::invalid_argument("backward: grad_out dimensions do not match the output");
    }

    // Per-layer gradients, assembled in flat parameter order at the end.
    std::vector<std::vector<double>> grad_w(layers.size());
    std::vector<std::vector<double>> grad_b(layers.size());
    std::vector<double> grad(grad_out.values().begin(), grad_out.values().end());

    for (std::size_t l = layers.size(); l-- > 0;) {
        const ConvLayer& layer = layers[l];
        const FeatureMap& in = cache.inputs[l];
        const int w = in.width;
        const int h = in.height;
        const int r = layer.kernel / 2;
        const std::size_t plane = std::size_t(w) * h;

        activation_backward(layer.activation, cache.outputs[l], grad);

        grad_w[l].assign(layer.weights.size(), 0.0);
        grad_b[l].assign(layer.bias.size(), 0.0);
        std::vector<double> grad_in(in.data.size(), 0.0);

        for (int o = 0; o < layer.out_channels; ++o) {
            const double* gz = &grad[std::size_t(o) * plane];
            grad_b[l][o] = std::accumulate(gz, gz + plane, 0.0);
            for (int i = 0; i < layer.in_channels; ++i) {
                const double* src = &in.data[std::size_t(i) * plane];
                double* gin = &grad_in[std::size_t(i) * plane];
                for (int ky = 0; ky < layer.kernel; ++ky) {
                    const int oy = ky - r;
                    for (int kx = 0; kx < layer.kernel; ++kx) {
                        const int ox = kx - r;
                        const int y0 = std::max(0, -oy);
                        const int y1 = std::min(h, h - oy);
                        const int x0 = std::max(0, -ox);
                        const int x1 = std::min(w, w - ox);
                        const double wt = layer.w(o, i, ky, kx);
                        double acc = 0.0;
                        for (int y = y0; y < y1; ++y) {
                            const double* grow = gz + std::size_t(y) * w;
                            const double* srow = src + std::size_t(y + oy) * w + ox;
                            double* girow = gin + std::size_t(y + oy) * w + ox;
                            for (int x = x0; x < x1; ++x) {
                                acc += grow[x] * srow[x];
                                girow[x] += wt * grow[x];
                            }
                        }
                        grad_w[l][((std::size_t(o) * layer.in_channels + i) * layer.kernel + ky) *
                                      layer.kernel + kx] = acc;
                    }
                }
            }
        }
        grad = std::move(grad_in);
    }

    std::vector<double> flat;
    flat.reserve(net.parameter_count());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        flat.insert(flat.end(), grad_w[l].begin(), grad_w[l].end());
        flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
    }
    return flat;
}

std::vector<double> backward(const ToyNet& net, const ScalarField2D& image,
                             const ScalarField2D& grad_out) {
    ForwardCache cache;
    forward_cached(net, image, cache);
    return backward(net, cache, grad_out);
}

LossKind parse_loss_kind(const std::string& name) {
    if (name == "pil") return LossKind::PIL;
    if (name == "bce") return LossKind::BCE;
    if (name == "dice") return LossKind::Dice;
    if (name == "surface") return LossKind::Surface;
    if (name == "pil+bce") return LossKind::PilBce;
    throw std::invalid_argument("unknown loss kind '" + name + "'");
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::PIL: return "pil";
        case LossKind::BCE: return "bce";
        case LossKind::Dice: return "dice";
        case LossKind::Surface: return "surface";
        case LossKind::PilBce: return "pil+bce";
    }
    return "?";
}

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (bce_weight < 0.0) throw std::invalid_argument("bce_weight must be nonnegative");
    pil.validate();
}

std::pair<double, ScalarField2D> prediction_loss(const ScalarField2D& prob, const BinaryMask& gt,
                                                 const TrainConfig& cfg, const SpectralPlan& plan) {
    switch (cfg.loss) {
        case LossKind::PIL: {
            EnergyGrad eg = loss_and_grad(gt, prob, cfg.pil, plan);
            return {eg.energy, std::move(eg.grad_p)};
        }
        case LossKind::BCE: {
            LossGrad lg = bce_loss_grad(prob, gt);
            return {lg.loss, std::move(lg.grad_p)};
        }
        case LossKind::Dice: {
            LossGrad lg = dice_loss_grad(prob, gt);
            return {lg.loss, std::move(lg.grad_p)};
        }
        case LossKind::Surface: {
            LossGrad lg = surface_loss_grad(prob, gt);
            return {lg.loss, std::move(lg.grad_p)};
        }
        case LossKind::PilBce: {
            EnergyGrad eg = loss_and_grad(gt, prob, cfg.pil, plan);
            const LossGrad lg = bce_loss_grad(prob, gt);
            for (std::size_t i = 0; i < eg.grad_p.size(); ++i) {
                eg.grad_p[i] += cfg.bce_weight * lg.grad_p[i];
            }
            return {eg.energy + cfg.bce_weight * lg.loss, std::move(eg.grad_p)};
        }
    }
    throw std::logic_error("unhandled loss kind");
}

double sample_loss(const ToyNet& net, const Sample& sample, const TrainConfig& cfg,
                   const SpectralPlan& plan) {
    return prediction_loss(forward(net, sample.image), sample.mask, cfg, plan).first;
}

TrainLog train(ToyNet& net, const std::vector<Sample>& data, const TrainConfig& cfg,
               const SpectralPlan& plan) {
    cfg.validate();
    if (data.empty()) throw std::invalid_argument("train: empty dataset");
    for (const auto& s : data) {
        if (s.image.width() != plan.width() || s.image.height() != plan.height() ||
            s.mask.width() != plan.width() || s.mask.height() != plan.height()) {
            throw std::invalid_argument("train: sample dimensions do not match the plan");
        }
    }

    const std::size_t n_params = net.parameter_count();
    std::vector<double> m(n_params, 0.0);
    std::vector<double> v(n_params, 0.0);
    std::vector<double> params = net.parameters();
    long long t = 0;

    SplitMix64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainLog log;
    ForwardCache cache;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the documented generator.
        for (std::size_t k = order.size(); k > 1; --k) {
            std::swap(order[k - 1], order[rng.below(k)]);
        }
        double epoch_total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + std::size_t(cfg.batch_size));
            std::vector<double> grad(n_params, 0.0);
            for (std::size_t k = start; k < stop; ++k) {
                const Sample& s = data[order[k]];
                const ScalarField2D prob = forward_cached(net, s.image, cache);
                auto [loss, grad_p] = prediction_loss(prob, s.mask, cfg, plan);
                if (!std::isfinite(loss)) {
                    throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch + 1));
                }
                epoch_total += loss;
                const std::vector<double> g = backward(net, cache, grad_p);
                for (std::size_t p = 0; p < n_params; ++p) grad[p] += g[p];
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            ++t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, double(t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, double(t));
            for (std::size_t p = 0; p < n_params; ++p) {
                const double g = grad[p] * inv;
                m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * g;
                v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * g * g;
                params[p] -= cfg.lr * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + cfg.adam_eps);
            }
            net.set_parameters(params);
        }
        log.epoch_loss.push_back(epoch_total / static_cast<double>(data.size()));
    }
    return log;
}

void save_checkpoint(std::ostream& out, const ToyNet& net) {
    out.write("EBL1", 4);
    put_u32(out, static_cast<std::uint32_t>(net.layers().size()));
    for (const auto& layer : net.layers()) {
        put_u32(out, static_cast<std::uint32_t>(layer.in_channels));
        put_u32(out, static_cast<std::uint32_t>(layer.out_channels));
        put_u32(out, static_cast<std::uint32_t>(layer.kernel));
        put_u32(out, static_cast<std::uint32_t>(layer.activation));
        for (double w : layer.weights) put_f64(out, w);
        for (double b : layer.bias) put_f64(out, b);
    }
    if (!out) throw std::runtime_error("failed writing checkpoint");
}

ToyNet load_checkpoint(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "EBL1", 4) != 0) {
        throw std::runtime_error("not an EBL1 checkpoint (bad magic bytes)");
    }
    ToyNet net;
    const std::uint32_t count = get_u32(in);
    if (count != net.layers().size()) {
        throw std::runtime_error("checkpoint layer count " + std::to_string(count) +
                                 " does not match the ToyNet architecture");
    }
    for (auto& layer : net.layers()) {
        const std::uint32_t in_ch = get_u32(in);
        const std::uint32_t out_ch = get_u32(in);
        const std::uint32_t kernel = get_u32(in);
        const std::uint32_t act = get_u32(in);
        if (int(in_ch) != layer.in_channels || int(out_ch) != layer.out_channels ||
            int(kernel) != layer.kernel || act != static_cast<std::uint32_t>(layer.activation)) {
            throw std::runtime_error("checkpoint layer shape does not match the ToyNet architecture");
        }
        for (double& w : layer.weights) w = get_f64(in);
        for (double& b : layer.bias) b = get_f64(in);
    }
    for (double p : net.parameters()) {
        if (!std::isfinite(p)) throw std::runtime_error("checkpoint contains non-finite weights");
    }
    return net;
}

void save_checkpoint(const std::string& path, const ToyNet& net) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save_checkpoint(out, net);
}

ToyNet load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return load_checkpoint(in);
}

}  // namespace ebl

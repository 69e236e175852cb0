#include "ebl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "ebl/rng.hpp"

namespace ebl {

namespace {

// Keep P at least `gap` away from the points where H' jumps.
double sample_probability(SplitMix64& rng, const HeavisideSpec& spec, double gap) {
    while (true) {
        const double p = rng.uniform(0.02, 0.98);
        if (std::abs(std::abs(p - 0.5) - spec.beta) > gap) return p;
    }
}

BinaryMask random_mask(SplitMix64& rng, int size) {
    BinaryMask g(size, size);
    for (auto& v : g.values()) v = rng.uniform() < 0.5 ? 1 : 0;
    return g;
}

// Which side of every kink the forward pass sits on: ReLU signs, then the
// Heaviside region of each output pixel. Central differences are only valid
// when a probe leaves this unchanged.
std::vector<std::int8_t> kink_signature(const ToyNet& net, const ScalarField2D& image, const HeavisideSpec& hs) {
    ForwardCache cache;
    const ScalarField2D prob = forward_cached(net, image, cache);
    std::vector<std::int8_t> sig;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        if (net.layers()[l].activation != Activation::ReLU) continue;
        for (double v : cache.outputs[l].data) sig.push_back(v > 0.0);
    }
    for (double p : prob.values()) {
        const double phi = p - 0.5;
        sig.push_back(phi <= -hs.beta ? -1 : (phi >= hs.beta ? 1 : 0));
    }
    return sig;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    return scale > 0.0 ? std::abs(analytic - numeric) / scale : 0.0;
}

GradcheckResult gradcheck_prediction(const TrainConfig& cfg, int size, std::uint64_t seed,
                                     double step) {
    SplitMix64 rng(seed);
    const SpectralPlan plan(size, size);
    const BinaryMask g = random_mask(rng, size);
    ScalarField2D p(size, size);
    for (auto& v : p.values()) v = sample_probability(rng, cfg.pil.heaviside, 1e-3);

    const auto [loss, grad] = prediction_loss(p, g, cfg, plan);
    std::vector<double> numeric(p.size());
    double max_numeric = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        // Five-point stencil: the sinusoidal Heaviside is nearly flat close to
        // its kinks, where plain central differences lose accuracy.
        auto probe = [&](double offset) {
            ScalarField2D q = p;
            q[i] += offset;
            return prediction_loss(q, g, cfg, plan).first;
        };
        numeric[i] = (8.0 * (probe(step) - probe(-step)) - (probe(2.0 * step) - probe(-2.0 * step))) /
                     (12.0 * step);
        max_numeric = std::max(max_numeric, std::abs(numeric[i]));
    }
    GradcheckResult result;
    const double floor = 1e-6 * std::max(max_numeric, 1e-300);
    for (std::size_t i = 0; i < p.size(); ++i) {
        result.max_rel_error = std::max(result.max_rel_error, relative_error(grad[i], numeric[i], floor));
        ++result.checked;
    }
    return result;
}

GradcheckResult gradcheck_network(const TrainConfig& cfg, int size, std::uint64_t seed,
                                  int n_params, double step) {
    SplitMix64 rng(seed);
    const SpectralPlan plan(size, size);
    ToyNet net = ToyNet::random(rng.next());
    Sample sample{ScalarField2D(size, size), random_mask(rng, size)};
    for (auto& v : sample.image.values()) v = rng.uniform();

    ForwardCache cache;
    const ScalarField2D prob = forward_cached(net, sample.image, cache);
    const ScalarField2D grad_out = prediction_loss(prob, sample.mask, cfg, plan).second;
    const std::vector<double> analytic = backward(net, cache, grad_out);

    const auto base = kink_signature(net, sample.image, cfg.pil.heaviside);
    std::vector<std::size_t> picks;
    std::vector<double> numeric;
    double max_numeric = 0.0;
    int skipped = 0;
    const int max_skips = 10 * n_params;
    while (static_cast<int>(picks.size()) < n_params) {
        const std::size_t k = rng.below(net.parameter_count());
        const double original = net.parameter(k);
        net.set_parameter(k, original + step);
        const double up = sample_loss(net, sample, cfg, plan);
        const bool smooth_up = kink_signature(net, sample.image, cfg.pil.heaviside) == base;
        net.set_parameter(k, original - step);
        const double down = sample_loss(net, sample, cfg, plan);
        const bool smooth_down = kink_signature(net, sample.image, cfg.pil.heaviside) == base;
        net.set_parameter(k, original);
        if (!(smooth_up && smooth_down)) {
            if (++skipped > max_skips) throw std::runtime_error("gradcheck_network: too many probes cross a kink");
            continue;
        }
        picks.push_back(k);
        numeric.push_back((up - down) / (2.0 * step));
        max_numeric = std::max(max_numeric, std::abs(numeric.back()));
    }
    GradcheckResult result;
    result.skipped = skipped;
    const double floor = 1e-6 * std::max(max_numeric, 1e-300);
    for (std::size_t j = 0; j < picks.size(); ++j) {
        result.max_rel_error =
            std::max(result.max_rel_error, relative_error(analytic[picks[j]], numeric[j], floor));
        ++result.checked;
    }
    return result;
}

}  // namespace ebl

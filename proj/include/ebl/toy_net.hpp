#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ebl/elastic_loss.hpp"
#include "ebl/field.hpp"

namespace ebl {

enum class Activation : std::uint32_t { None = 0, ReLU = 1, Sigmoid = 2 };

/// Multi-channel feature map, layout [channel][y][x].
struct FeatureMap {
    int channels = 0;
    int width = 0;
    int height = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int w, int h) : channels(c), width(w), height(h), data(std::size_t(c) * w * h, 0.0) {}

    double& at(int c, int x, int y) { return data[(std::size_t(c) * height + y) * width + x]; }
    double at(int c, int x, int y) const { return data[(std::size_t(c) * height + y) * width + x]; }
};

/// Same-padded 2D convolution; weights laid out [out][in][ky][kx].
struct ConvLayer {
    int in_channels = 1;
    int out_channels = 1;
    int kernel = 3;
    Activation activation = Activation::None;
    std::vector<double> weights;
    std::vector<double> bias;

    ConvLayer() = default;
    ConvLayer(int in, int out, int k, Activation act);

    std::size_t weight_count() const { return weights.size(); }
    double& w(int o, int i, int ky, int kx) {
        return weights[((std::size_t(o) * in_channels + i) * kernel + ky) * kernel + kx];
    }
    double w(int o, int i, int ky, int kx) const {
        return weights[((std::size_t(o) * in_channels + i) * kernel + ky) * kernel + kx];
    }

    bool operator==(const ConvLayer&) const = default;
};

/// conv3x3(1->8)+ReLU, conv3x3(8->8)+ReLU, conv1x1(8->1)+Sigmoid.
class ToyNet {
public:
    /// All weights and biases zero.
    ToyNet();
    /// Uniform init in +-sqrt(1/fan_in) for weights and biases, drawn from SplitMix64(seed).
    static ToyNet random(std::uint64_t seed);

    const std::vector<ConvLayer>& layers() const { return layers_; }
    std::vector<ConvLayer>& layers() { return layers_; }

    std::size_t parameter_count() const;
    /// Flat view in layer order: weights then bias of each layer.
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& flat);
    double parameter(std::size_t index) const;
    void set_parameter(std::size_t index, double value);

    bool operator==(const ToyNet&) const = default;

private:
    explicit ToyNet(std::vector<ConvLayer> layers) : layers_(std::move(layers)) {}
    std::vector<ConvLayer> layers_;
};

/// Activations retained by forward_cached for backpropagation.
struct ForwardCache {
    std::vector<FeatureMap> inputs;   // input to each layer
    std::vector<FeatureMap> outputs;  // post-activation output of each layer
};

ScalarField2D forward(const ToyNet& net, const ScalarField2D& image);
ScalarField2D forward_cached(const ToyNet& net, const ScalarField2D& image, ForwardCache& cache);

/// Gradient of a scalar loss with respect to every parameter (flat order of
/// ToyNet::parameters()), given dLoss/dOutput.
std::vector<double> backward(const ToyNet& net, const ForwardCache& cache,
                             const ScalarField2D& grad_out);
std::vector<double> backward(const ToyNet& net, const ScalarField2D& image,
                             const ScalarField2D& grad_out);

enum class LossKind { PIL, BCE, Dice, Surface, PilBce };

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);

struct TrainConfig {
    LossKind loss = LossKind::PIL;
    /// Weight of the BCE term for LossKind::PilBce.
    double bce_weight = 1.0;
    PilParams pil{};
    int epochs = 200;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Sample {
    ScalarField2D image;
    BinaryMask mask;
};

/// Loss of one prediction and its gradient with respect to the prediction.
std::pair<double, ScalarField2D> prediction_loss(const ScalarField2D& prob, const BinaryMask& gt,
                                                 const TrainConfig& cfg, const SpectralPlan& plan);

/// Total loss of the network on one sample (used by gradient checks).
double sample_loss(const ToyNet& net, const Sample& sample, const TrainConfig& cfg,
                   const SpectralPlan& plan);

struct TrainLog {
    std::vector<double> epoch_loss;
};

/// Mini-batch Adam. Sample order is shuffled each epoch from SplitMix64(cfg.seed).
/// Throws std::runtime_error on a non-finite loss.
TrainLog train(ToyNet& net, const std::vector<Sample>& data, const TrainConfig& cfg,
               const SpectralPlan& plan);

/// Checkpoint layout (all integers u32 little-endian, floats IEEE-754 f64 little-endian):
///   "EBL1" | layer_count | per layer: in, out, kernel, activation,
///   weights[out*in*kernel*kernel], bias[out]
void save_checkpoint(std::ostream& out, const ToyNet& net);
ToyNet load_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const ToyNet& net);
ToyNet load_checkpoint(const std::string& path);

}  // namespace ebl

#pragma once

#include <cstdint>

#include "ebl/toy_net.hpp"

namespace ebl {

struct GradcheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
    /// Probes discarded because the perturbation crossed a ReLU or Heaviside kink.
    int skipped = 0;
};

/// |a - b| / max(|a|, |b|, floor). The floor keeps entries that are zero up to
/// rounding from dominating.
double relative_error(double analytic, double numeric, double floor);

/// Random size x size instance (Bernoulli(0.5) mask, P uniform away from the
/// Heaviside kinks), every pixel checked by a five-point difference.
GradcheckResult gradcheck_prediction(const TrainConfig& cfg, int size, std::uint64_t seed,
                                     double step = 1e-4);

/// Central differences through ToyNet for n_params randomly chosen parameters.
/// A parameter whose +-step probe flips a ReLU sign or moves an output pixel
/// across a Heaviside kink is replaced by another draw.
GradcheckResult gradcheck_network(const TrainConfig& cfg, int size, std::uint64_t seed,
                                  int n_params = 20, double step = 1e-4);

}  // namespace ebl

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebl/elastic_loss.hpp"

namespace ebl {

struct EvolveConfig {
    PilParams pil{1.0};
    double eta = 0.5;
    int max_steps = 500;
    /// Stop when |dE| / max(E, 1e-12) < tol.
    double tol = 1e-8;
    /// Keep every n-th iterate; 0 keeps none.
    int snapshot_every = 0;

    void validate() const;
};

struct EvolveTrace {
    /// energies[0] is the energy of P0; energies[k] the energy after step k.
    std::vector<double> energies;
    ScalarField2D final_p;
    double iou_final = 0.0;
    int steps = 0;
    /// Step size in effect at the end (lower than cfg.eta if the guard fired).
    double eta_final = 0.0;
    std::vector<ScalarField2D> snapshots;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Projected gradient descent P <- clamp(P - eta * dE/dP, 0, 1).
/// Five consecutive energy increases halve eta; eta below 1e-6 throws DivergenceError.
EvolveTrace gradient_flow(const ScalarField2D& p0, const BinaryMask& gt, const EvolveConfig& cfg,
                          const SpectralPlan& plan);

using Objective = std::function<EnergyGrad(const ScalarField2D&)>;

/// Same iteration with an arbitrary energy/gradient callback (cfg.pil is ignored).
EvolveTrace gradient_flow(const ScalarField2D& p0, const BinaryMask& gt, const EvolveConfig& cfg,
                          const Objective& objective);

/// |A and B| / |A or B|, 1 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

BinaryMask disc_mask(int width, int height, double cx, double cy, double radius);

/// Soft start inside the unsaturated band of the Heaviside: 0.5 + margin on the
/// mask, 0.5 - margin off it.
ScalarField2D soft_init(const BinaryMask& mask, double margin = 0.2);

}  // namespace ebl

#include "ebl/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace ebl {

void EvolveConfig::validate() const {
    pil.validate();
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (tol < 0.0) throw std::invalid_argument("tol must be nonnegative");
    if (snapshot_every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
}

EvolveTrace gradient_flow(const ScalarField2D& p0, const BinaryMask& gt, const EvolveConfig& cfg,
                          const SpectralPlan& plan) {
    cfg.pil.validate();
    return gradient_flow(p0, gt, cfg, [&](const ScalarField2D& p) {
        return loss_and_grad(gt, p, cfg.pil, plan);
    });
}

EvolveTrace gradient_flow(const ScalarField2D& p0, const BinaryMask& gt, const EvolveConfig& cfg,
                          const Objective& objective) {
    cfg.validate();
    if (p0.width() != gt.width() || p0.height() != gt.height()) {
        throw std::invalid_argument("gradient_flow: initial field and mask dimensions differ");
    }
    constexpr double kMinEta = 1e-6;
    constexpr int kIncreaseLimit = 5;

    EvolveTrace trace;
    ScalarField2D p = p0;
    EnergyGrad eg = objective(p);
    trace.energies.push_back(eg.energy);
    double eta = cfg.eta;
    int increases = 0;

    for (int step = 1; step <= cfg.max_steps; ++step) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::clamp(p[i] - eta * eg.grad_p[i], 0.0, 1.0);
        }
        const double previous = eg.energy;
        eg = objective(p);
        trace.energies.push_back(eg.energy);
        trace.steps = step;
        if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) trace.snapshots.push_back(p);

        if (eg.energy > previous) {
            if (++increases >= kIncreaseLimit) {
                eta *= 0.5;
                increases = 0;
                if (eta < kMinEta) {
                    throw DivergenceError("gradient flow diverged: step size fell below 1e-6 at step " +
                                          std::to_string(step));
                }
            }
        } else {
            increases = 0;
        }
        if (std::abs(eg.energy - previous) / std::max(eg.energy, 1e-12) < cfg.tol) break;
    }

    trace.final_p = std::move(p);
    trace.eta_final = eta;
    trace.iou_final = iou(threshold(trace.final_p, 0.5), gt);
    return trace;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("iou: dimension mismatch");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += a[i] & b[i];
        uni += a[i] | b[i];
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask disc_mask(int width, int height, double cx, double cy, double radius) {
    BinaryMask m(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            m(x, y) = dx * dx + dy * dy <= radius * radius ? 1 : 0;
        }
    }
    return m;
}

ScalarField2D soft_init(const BinaryMask& mask, double margin) {
    if (!(margin >= 0.0 && margin <= 0.5)) throw std::invalid_argument("margin must lie in [0, 0.5]");
    ScalarField2D p(mask.width(), mask.height());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = mask[i] ? 0.5 + margin : 0.5 - margin;
    return p;
}

}  // namespace ebl

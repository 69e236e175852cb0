#pragma once

#include "ebl/field.hpp"

namespace ebl {

struct LossGrad {
    double loss = 0.0;
    ScalarField2D grad_p;
};

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy, P clamped to [eps, 1 - eps].
LossGrad bce_loss_grad(const ScalarField2D& prob, const BinaryMask& gt);

/// 1 - (2 sum PG + smooth) / (sum P + sum G + smooth).
LossGrad dice_loss_grad(const ScalarField2D& prob, const BinaryMask& gt, double smooth = 1.0);

/// Exact Euclidean distance (pixels) to the nearest foreground pixel
/// (Felzenszwalb-Huttenlocher lower envelope of parabolas). An all-zero mask
/// yields the sentinel W + H everywhere.
ScalarField2D distance_transform(const BinaryMask& mask);

/// dt(G) - dt(not G); negative inside G.
ScalarField2D signed_distance(const BinaryMask& mask);

/// mean(P * sdf(G)) with gradient sdf / (W*H).
LossGrad surface_loss_grad(const ScalarField2D& prob, const BinaryMask& gt);

}  // namespace ebl

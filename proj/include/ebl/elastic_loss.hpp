#pragma once

#include <iosfwd>
#include <numbers>
#include <vector>

#include "ebl/field.hpp"
#include "ebl/spectral.hpp"

namespace ebl {

/// Sign with which the prediction enters the combined field.
/// Opposite: D = G - alpha*H(phi), so a perfect match at alpha = 1 annihilates.
/// Same: D = G + alpha*H(phi), kept for ablation only.
enum class Orientation { Opposite, Same };

struct PilParams {
    double alpha = 0.35;
    HeavisideSpec heaviside{0.25, HeavisideKind::HardTanh};
    double prefactor = 1.0 / (8.0 * std::numbers::pi);
    Orientation orientation = Orientation::Opposite;
    /// Gaussian smoothing of the ground-truth mask in pixels; 0 uses the raw mask.
    double gt_sigma = 0.0;

    void validate() const;
};

struct EnergyGrad {
    double energy = 0.0;
    ScalarField2D grad_p;
};

/// D = G - alpha * H_phi (or G + alpha * H_phi for Orientation::Same).
ScalarField2D combined_field(const ScalarField2D& gt, const ScalarField2D& h_phi, double alpha,
                             Orientation orientation = Orientation::Opposite);
ScalarField2D combined_field(const BinaryMask& gt, const ScalarField2D& h_phi, double alpha,
                             Orientation orientation = Orientation::Opposite);

/// E = prefactor / (W*H) * sum_k k_mag(k) |D^(k)|^2 = prefactor * <D, halfnorm(D)>.
double energy_spectral(const ScalarField2D& d, const SpectralPlan& plan, double prefactor);

/// Free-space variant: D is zero-padded to (pad_factor*W) x (pad_factor*H) and
/// evaluated with a periodic plan of that size.
double energy_spectral_padded(const ScalarField2D& d, double prefactor, int pad_factor = 2);

/// Largest grid energy_direct accepts without force = true.
inline constexpr int kDirectMaxSide = 64;

/// Explicit O(N^2) pairwise sum prefactor * sum_x sum_x' D(x) K(x - x') D(x').
/// Refuses grids larger than 64x64 unless force is set.
double energy_direct(const ScalarField2D& d, const SpectralPlan& plan, double prefactor,
                     bool force = false);
/// Same, with a precomputed kernel_table().
double energy_direct(const ScalarField2D& d, const ScalarField2D& kernel, double prefactor,
                     bool force = false);

/// Energy of the prediction P against mask G and its gradient with respect to P.
EnergyGrad loss_and_grad(const BinaryMask& gt, const ScalarField2D& prob, const PilParams& params,
                         const SpectralPlan& plan);

struct BenchRow {
    int size = 0;
    double t_fft_ns = 0.0;
    double t_direct_ns = 0.0;
    double ratio() const { return t_direct_ns / t_fft_ns; }
};

/// Median wall-clock time (after one warm-up) of energy_spectral vs energy_direct on size x size
/// random fields. Sizes above 128 are rejected.
std::vector<BenchRow> bench_paths(const std::vector<int>& sizes, int repeats,
                                  std::uint64_t seed = 1);

/// CSV with header size,t_fft_ns,t_direct_ns,ratio.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace ebl

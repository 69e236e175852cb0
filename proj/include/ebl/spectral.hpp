#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ebl/field.hpp"

namespace ebl {

struct ComplexField2D {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> values;

    std::complex<double>& operator()(int x, int y) { return values[std::size_t(y) * width + x]; }
    std::complex<double> operator()(int x, int y) const { return values[std::size_t(y) * width + x]; }
};

/// Fixed-size 2D transform engine on a periodic grid.
///
/// Conventions: forward() is the unnormalized DFT, inverse divides by
/// width*height. k_mag(x, y) = 2*pi*sqrt(fx^2 + fy^2) with fx = i/(width*spacing)
/// for i < width/2 and (i - width)/(width*spacing) otherwise (likewise fy).
/// A built plan is immutable and transforms use per-thread scratch, so one plan
/// can be used from several threads at once.
class SpectralPlan {
public:
    SpectralPlan(int width, int height, double spacing = 1.0);

    int width() const { return width_; }
    int height() const { return height_; }
    double spacing() const { return spacing_; }
    const ScalarField2D& k_mag() const { return k_mag_; }

    ComplexField2D forward(const ScalarField2D& f) const;
    ComplexField2D forward(const ComplexField2D& f) const;
    /// Unnormalized-inverse / (W*H), complex result.
    ComplexField2D inverse(const ComplexField2D& f) const;
    /// Inverse transform that drops the imaginary part after checking it is
    /// at most 1e-9 * (max |real| + 1). Throws std::runtime_error otherwise.
    ScalarField2D inverse_real(const ComplexField2D& f) const;

    /// inverse_real(k_mag * forward(f)): the periodic half-Laplacian.
    ScalarField2D apply_halfnorm(const ScalarField2D& f) const;

    /// <f, apply_halfnorm(f)> = (1/(W*H)) * sum_k k_mag(k) |f^(k)|^2, without
    /// materialising the spectrum.
    double quadratic_form(const ScalarField2D& f) const;

    /// Real-space kernel K with apply_halfnorm(f) == K (cyclic conv) f.
    ScalarField2D kernel_table() const;

private:
    struct FftwPlans;

    void check_shape(int width, int height) const;

    int width_;
    int height_;
    double spacing_;
    ScalarField2D k_mag_;
    std::shared_ptr<const FftwPlans> plans_;
};

inline SpectralPlan build_plan(int width, int height, double spacing = 1.0) {
    return SpectralPlan(width, height, spacing);
}

}  // namespace ebl

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ebl {

/// Row-major real-valued grid. Index (x, y) maps to values[y * width + x].
class ScalarField2D {
public:
    ScalarField2D() = default;
    ScalarField2D(int width, int height, double fill = 0.0, double spacing = 1.0);
    ScalarField2D(int width, int height, std::vector<double> values, double spacing = 1.0);

    int width() const { return width_; }
    int height() const { return height_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int x, int y) { return values_[index(x, y)]; }
    double operator()(int x, int y) const { return values_[index(x, y)]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    bool same_shape(const ScalarField2D& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// Throws std::invalid_argument if any value is NaN or infinite.
    void check_finite() const;

    bool operator==(const ScalarField2D&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    double spacing_ = 1.0;
    std::vector<double> values_;
};

/// Binary ground-truth mask; every entry is exactly 0 or 1.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, std::uint8_t fill = 0);
    BinaryMask(int width, int height, std::vector<std::uint8_t> values);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }

    std::uint8_t& operator()(int x, int y) { return values_[index(x, y)]; }
    std::uint8_t operator()(int x, int y) const { return values_[index(x, y)]; }
    std::uint8_t& operator[](std::size_t i) { return values_[i]; }
    std::uint8_t operator[](std::size_t i) const { return values_[i]; }

    std::span<std::uint8_t> values() { return values_; }
    std::span<const std::uint8_t> values() const { return values_; }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    std::size_t count() const;
    BinaryMask complement() const;
    ScalarField2D to_field() const;

    bool operator==(const BinaryMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> values_;
};

/// Binarize a field: 1 where value >= threshold.
BinaryMask threshold(const ScalarField2D& field, double threshold = 0.5);

/// Cyclic shift: out(x + dx, y + dy) = in(x, y), indices taken modulo the size.
ScalarField2D cyclic_shift(const ScalarField2D& field, int dx, int dy);
BinaryMask cyclic_shift(const BinaryMask& mask, int dx, int dy);

double dot(const ScalarField2D& a, const ScalarField2D& b);
double max_abs(const ScalarField2D& f);
double max_abs_diff(const ScalarField2D& a, const ScalarField2D& b);

enum class HeavisideKind { Sinusoidal, HardTanh };

struct HeavisideSpec {
    double beta = 0.25;
    HeavisideKind kind = HeavisideKind::HardTanh;

    void validate() const;
};

/// phi = P - 0.5. Rejects probabilities outside [0, 1] by more than 1e-9.
ScalarField2D prob_to_levelset(const ScalarField2D& prob);

double heaviside(double phi, const HeavisideSpec& spec);

/// Derivative of heaviside(). At |phi| == beta the interior one-sided value is returned.
double heaviside_deriv(double phi, const HeavisideSpec& spec);

ScalarField2D apply_heaviside(const ScalarField2D& phi, const HeavisideSpec& spec);
ScalarField2D apply_heaviside_deriv(const ScalarField2D& phi, const HeavisideSpec& spec);

/// Separable Gaussian blur with clamped borders. sigma <= 0 returns the mask as reals.
ScalarField2D gaussian_smooth(const BinaryMask& mask, double sigma);

}  // namespace ebl

#include "ebl/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ebl {

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("field dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

}  // namespace

ScalarField2D::ScalarField2D(int width, int height, double fill, double spacing)
    : width_(width), height_(height), spacing_(spacing) {
    check_dims(width, height);
    if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ScalarField2D::ScalarField2D(int width, int height, std::vector<double> values, double spacing)
    : width_(width), height_(height), spacing_(spacing), values_(std::move(values)) {
    check_dims(width, height);
    if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("value count does not match width*height");
    }
}

void ScalarField2D::check_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("field contains a non-finite value");
    }
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    if (fill > 1) throw std::invalid_argument("mask values must be 0 or 1");
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("value count does not match width*height");
    }
    for (auto v : values_) {
        if (v > 1) throw std::invalid_argument("mask values must be 0 or 1");
    }
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (auto& v : out.values_) v = static_cast<std::uint8_t>(1 - v);
    return out;
}

ScalarField2D BinaryMask::to_field() const {
    ScalarField2D out(width_, height_);
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i];
    return out;
}

BinaryMask threshold(const ScalarField2D& field, double t) {
    BinaryMask out(field.width(), field.height());
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = field[i] >= t ? 1 : 0;
    return out;
}

ScalarField2D cyclic_shift(const ScalarField2D& field, int dx, int dy) {
    ScalarField2D out(field.width(), field.height(), 0.0, field.spacing());
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            out(wrap(x + dx, field.width()), wrap(y + dy, field.height())) = field(x, y);
        }
    }
    return out;
}

BinaryMask cyclic_shift(const BinaryMask& mask, int dx, int dy) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            out(wrap(x + dx, mask.width()), wrap(y + dy, mask.height())) = mask(x, y);
        }
    }
    return out;
}

double dot(const ScalarField2D& a, const ScalarField2D& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(const ScalarField2D& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const ScalarField2D& a, const ScalarField2D& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void HeavisideSpec::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("heaviside beta must be positive and finite");
    }
}

ScalarField2D prob_to_levelset(const ScalarField2D& prob) {
    constexpr double tol = 1e-9;
    ScalarField2D phi(prob.width(), prob.height(), 0.0, prob.spacing());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double p = prob[i];
        if (!(p >= -tol && p <= 1.0 + tol)) {
            throw std::invalid_argument("probability value " + std::to_string(p) +
                                        " outside [0, 1]");
        }
        phi[i] = p - 0.5;
    }
    return phi;
}

double heaviside(double phi, const HeavisideSpec& spec) {
    const double beta = spec.beta;
    const double a = std::abs(phi);
    double upper = 1.0;  // H(|phi|), always in [0.5, 1]
    if (a < beta) {
        switch (spec.kind) {
            case HeavisideKind::Sinusoidal:
                upper = 0.5 * (std::sin(std::numbers::pi * a / (2.0 * beta)) + 1.0);
                break;
            case HeavisideKind::HardTanh:
                upper = std::min(1.0, a / (2.0 * beta) + 0.5);
                break;
        }
    }
    // 1 - upper is exact for upper in [0.5, 1], so H(phi) + H(-phi) == 1 bitwise.
    return phi < 0.0 ? 1.0 - upper : upper;
}

double heaviside_deriv(double phi, const HeavisideSpec& spec) {
    const double beta = spec.beta;
    if (std::abs(phi) > beta) return 0.0;
    switch (spec.kind) {
        case HeavisideKind::Sinusoidal:
            // cos(+-pi/2) is ~6e-17 rather than 0; clamp keeps the result nonnegative.
            return std::max(0.0, std::numbers::pi / (4.0 * beta) *
                                     std::cos(std::numbers::pi * phi / (2.0 * beta)));
        case HeavisideKind::HardTanh:
            return 1.0 / (2.0 * beta);
    }
    return 0.0;
}

ScalarField2D apply_heaviside(const ScalarField2D& phi, const HeavisideSpec& spec) {
    spec.validate();
    ScalarField2D out(phi.width(), phi.height(), 0.0, phi.spacing());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = heaviside(phi[i], spec);
    return out;
}

ScalarField2D apply_heaviside_deriv(const ScalarField2D& phi, const HeavisideSpec& spec) {
    spec.validate();
    ScalarField2D out(phi.width(), phi.height(), 0.0, phi.spacing());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = heaviside_deriv(phi[i], spec);
    return out;
}

ScalarField2D gaussian_smooth(const BinaryMask& mask, double sigma) {
    ScalarField2D src = mask.to_field();
    if (sigma <= 0.0) return src;

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(2 * radius + 1);
    double norm = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        norm += taps[k + radius];
    }
    for (double& t : taps) t /= norm;

    const int w = src.width();
    const int h = src.height();
    ScalarField2D tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                s += taps[k + radius] * src(std::clamp(x + k, 0, w - 1), y);
            }
            tmp(x, y) = s;
        }
    }
    ScalarField2D out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                s += taps[k + radius] * tmp(x, std::clamp(y + k, 0, h - 1));
            }
            out(x, y) = std::clamp(s, 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace ebl

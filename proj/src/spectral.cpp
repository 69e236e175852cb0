#include "ebl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ebl {

namespace {

// FFTW planner calls (create/destroy) are not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (data == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* data;
};

// Per-thread transform buffers, grown to the largest grid seen. Large fresh
// allocations cost more than the transform itself at 128x128.
struct Scratch {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t capacity = 0;

    ~Scratch() {
        fftw_free(in);
        fftw_free(out);
    }

    void reserve(std::size_t n) {
        if (n <= capacity) return;
        fftw_free(in);
        fftw_free(out);
        in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (in == nullptr || out == nullptr) {
            fftw_free(in);
            fftw_free(out);
            in = out = nullptr;
            capacity = 0;
            throw std::bad_alloc();
        }
        capacity = n;
    }
};

Scratch& scratch(std::size_t n) {
    thread_local Scratch s;
    s.reserve(n);
    return s;
}

double frequency(int index, int n, double spacing) {
    const int signed_index = index < (n + 1) / 2 ? index : index - n;
    return static_cast<double>(signed_index) / (static_cast<double>(n) * spacing);
}

}  // namespace

struct SpectralPlan::FftwPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    FftwPlans(int width, int height) {
        const std::size_t n = std::size_t(width) * std::size_t(height);
        FftwBuffer in(n);
        FftwBuffer out(n);
        std::lock_guard lock(planner_mutex());
        // FFTW_ESTIMATE plans are deterministic and leave the buffers untouched.
        forward = fftw_plan_dft_2d(height, width, in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(height, width, in.data, out.data, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (forward == nullptr || backward == nullptr) {
            throw std::runtime_error("FFTW failed to create a plan");
        }
    }

    ~FftwPlans() {
        std::lock_guard lock(planner_mutex());
        if (forward != nullptr) fftw_destroy_plan(forward);
        if (backward != nullptr) fftw_destroy_plan(backward);
    }

    FftwPlans(const FftwPlans&) = delete;
    FftwPlans& operator=(const FftwPlans&) = delete;
};

SpectralPlan::SpectralPlan(int width, int height, double spacing)
    : width_(width), height_(height), spacing_(spacing) {
    if (width < 4 || height < 4) {
        throw std::invalid_argument("spectral plan needs width, height >= 4, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw std::invalid_argument("spectral plan spacing must be positive");
    }
    k_mag_ = ScalarField2D(width, height, 0.0, spacing);
    for (int j = 0; j < height; ++j) {
        const double fy = frequency(j, height, spacing);
        for (int i = 0; i < width; ++i) {
            const double fx = frequency(i, width, spacing);
            k_mag_(i, j) = 2.0 * std::numbers::pi * std::sqrt(fx * fx + fy * fy);
        }
    }
    plans_ = std::make_shared<const FftwPlans>(width, height);
}

void SpectralPlan::check_shape(int width, int height) const {
    if (width != width_ || height != height_) {
        throw std::invalid_argument("field " + std::to_string(width) + "x" +
                                    std::to_string(height) + " does not match plan " +
                                    std::to_string(width_) + "x" + std::to_string(height_));
    }
}

ComplexField2D SpectralPlan::forward(const ScalarField2D& f) const {
    check_shape(f.width(), f.height());
    const std::size_t n = f.size();
    Scratch& buf = scratch(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf.in[i][0] = f[i];
        buf.in[i][1] = 0.0;
    }
    fftw_execute_dft(plans_->forward, buf.in, buf.out);
    ComplexField2D result{width_, height_, std::vector<std::complex<double>>(n)};
    std::memcpy(static_cast<void*>(result.values.data()), buf.out, sizeof(fftw_complex) * n);
    return result;
}

ComplexField2D SpectralPlan::forward(const ComplexField2D& f) const {
    check_shape(f.width, f.height);
    const std::size_t n = f.values.size();
    Scratch& buf = scratch(n);
    std::memcpy(buf.in, f.values.data(), sizeof(fftw_complex) * n);
    fftw_execute_dft(plans_->forward, buf.in, buf.out);
    ComplexField2D result{width_, height_, std::vector<std::complex<double>>(n)};
    std::memcpy(static_cast<void*>(result.values.data()), buf.out, sizeof(fftw_complex) * n);
    return result;
}

ComplexField2D SpectralPlan::inverse(const ComplexField2D& f) const {
    check_shape(f.width, f.height);
    const std::size_t n = f.values.size();
    Scratch& buf = scratch(n);
    std::memcpy(buf.in, f.values.data(), sizeof(fftw_complex) * n);
    fftw_execute_dft(plans_->backward, buf.in, buf.out);
    ComplexField2D result{width_, height_, std::vector<std::complex<double>>(n)};
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.values[i] = {buf.out[i][0] * scale, buf.out[i][1] * scale};
    }
    return result;
}

double SpectralPlan::quadratic_form(const ScalarField2D& f) const {
    check_shape(f.width(), f.height());
    const std::size_t n = f.size();
    Scratch& buf = scratch(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf.in[i][0] = f[i];
        buf.in[i][1] = 0.0;
    }
    fftw_execute_dft(plans_->forward, buf.in, buf.out);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += k_mag_[i] * (buf.out[i][0] * buf.out[i][0] + buf.out[i][1] * buf.out[i][1]);
    }
    return sum / static_cast<double>(n);
}

ScalarField2D SpectralPlan::inverse_real(const ComplexField2D& f) const {
    const ComplexField2D c = inverse(f);
    ScalarField2D out(width_, height_, 0.0, spacing_);
    double max_real = 0.0;
    double max_imag = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        out[i] = c.values[i].real();
        max_real = std::max(max_real, std::abs(c.values[i].real()));
        max_imag = std::max(max_imag, std::abs(c.values[i].imag()));
    }
    if (max_imag > 1e-9 * (max_real + 1.0)) {
        throw std::runtime_error("inverse_real: imaginary residual " + std::to_string(max_imag) +
                                 " exceeds tolerance (spectrum is not conjugate-symmetric)");
    }
    return out;
}

ScalarField2D SpectralPlan::apply_halfnorm(const ScalarField2D& f) const {
    ComplexField2D spectrum = forward(f);
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) spectrum.values[i] *= k_mag_[i];
    return inverse_real(spectrum);
}

ScalarField2D SpectralPlan::kernel_table() const {
    ComplexField2D spectrum{width_, height_, {}};
    spectrum.values.resize(k_mag_.size());
    for (std::size_t i = 0; i < k_mag_.size(); ++i) spectrum.values[i] = k_mag_[i];
    return inverse_real(spectrum);
}

}  // namespace ebl

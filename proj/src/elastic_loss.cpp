#include "ebl/elastic_loss.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ebl/rng.hpp"

namespace ebl {

void PilParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
    if (!(prefactor > 0.0) || !std::isfinite(prefactor)) {
        throw std::invalid_argument("prefactor must be positive");
    }
    if (gt_sigma < 0.0) throw std::invalid_argument("gt_sigma must be nonnegative");
    heaviside.validate();
}

ScalarField2D combined_field(const ScalarField2D& gt, const ScalarField2D& h_phi, double alpha,
                             Orientation orientation) {
    if (!gt.same_shape(h_phi)) throw std::invalid_argument("combined_field: dimension mismatch");
    const double sign = orientation == Orientation::Opposite ? -1.0 : 1.0;
    ScalarField2D d(gt.width(), gt.height(), 0.0, gt.spacing());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = gt[i] + sign * alpha * h_phi[i];
    return d;
}

ScalarField2D combined_field(const BinaryMask& gt, const ScalarField2D& h_phi, double alpha,
                             Orientation orientation) {
    if (gt.width() != h_phi.width() || gt.height() != h_phi.height()) {
        throw std::invalid_argument("combined_field: dimension mismatch");
    }
    ScalarField2D g = gt.to_field();
    return combined_field(g, h_phi, alpha, orientation);
}

double energy_spectral(const ScalarField2D& d, const SpectralPlan& plan, double prefactor) {
    return prefactor * plan.quadratic_form(d);
}

double energy_spectral_padded(const ScalarField2D& d, double prefactor, int pad_factor) {
    if (pad_factor < 1) throw std::invalid_argument("pad_factor must be >= 1");
    const int pw = d.width() * pad_factor;
    const int ph = d.height() * pad_factor;
    ScalarField2D padded(pw, ph, 0.0, d.spacing());
    for (int y = 0; y < d.height(); ++y) {
        for (int x = 0; x < d.width(); ++x) padded(x, y) = d(x, y);
    }
    const SpectralPlan plan(pw, ph, d.spacing());
    return energy_spectral(padded, plan, prefactor);
}

double energy_direct(const ScalarField2D& d, const SpectralPlan& plan, double prefactor,
                     bool force) {
    if (d.width() != plan.width() || d.height() != plan.height()) {
        throw std::invalid_argument("energy_direct: field does not match plan");
    }
    if (!force && (d.width() > kDirectMaxSide || d.height() > kDirectMaxSide)) {
        throw std::invalid_argument("energy_direct: grid larger than 64x64 (pass force to override)");
    }
    return energy_direct(d, plan.kernel_table(), prefactor, force);
}

double energy_direct(const ScalarField2D& d, const ScalarField2D& kernel, double prefactor,
                     bool force) {
    if (!d.same_shape(kernel)) throw std::invalid_argument("energy_direct: kernel shape mismatch");
    const int w = d.width();
    const int h = d.height();
    if (!force && (w > kDirectMaxSide || h > kDirectMaxSide)) {
        throw std::invalid_argument("energy_direct: grid larger than 64x64 (pass force to override)");
    }
    const std::span<const double> dv = d.values();
    const std::span<const double> kv = kernel.values();
    double total = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = dv[std::size_t(y) * w + x];
            if (dx == 0.0) continue;
            double inner = 0.0;
            for (int yp = 0; yp < h; ++yp) {
                const int ky = y - yp < 0 ? y - yp + h : y - yp;
                const double* krow = kv.data() + std::size_t(ky) * w;
                const double* drow = dv.data() + std::size_t(yp) * w;
                // K(x - x') split at the wrap point to keep the inner loop branch-free.
                for (int xp = 0; xp <= x; ++xp) inner += krow[x - xp] * drow[xp];
                for (int xp = x + 1; xp < w; ++xp) inner += krow[x - xp + w] * drow[xp];
            }
            total += dx * inner;
        }
    }
    return prefactor * total;
}

EnergyGrad loss_and_grad(const BinaryMask& gt, const ScalarField2D& prob, const PilParams& params,
                         const SpectralPlan& plan) {
    params.validate();
    if (gt.width() != prob.width() || gt.height() != prob.height()) {
        throw std::invalid_argument("loss_and_grad: mask and prediction dimensions differ");
    }
    const ScalarField2D phi = prob_to_levelset(prob);
    const ScalarField2D h_phi = apply_heaviside(phi, params.heaviside);
    const ScalarField2D g = gaussian_smooth(gt, params.gt_sigma);
    const ScalarField2D d = combined_field(g, h_phi, params.alpha, params.orientation);

    // E = c <D, A D> with A self-adjoint, so dE/dD = 2c A D and
    // dE/dP = dE/dD * dD/dH * H'(phi) = 2c A D * (-+alpha) * H'(phi).
    const ScalarField2D force = plan.apply_halfnorm(d);
    EnergyGrad out;
    out.energy = std::max(0.0, params.prefactor * dot(d, force));
    const double sign = params.orientation == Orientation::Opposite ? -1.0 : 1.0;
    const double scale = 2.0 * params.prefactor * params.alpha * sign;
    out.grad_p = ScalarField2D(prob.width(), prob.height(), 0.0, prob.spacing());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        out.grad_p[i] = scale * heaviside_deriv(phi[i], params.heaviside) * force[i];
    }
    return out;
}

std::vector<BenchRow> bench_paths(const std::vector<int>& sizes, int repeats, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    if (repeats < 1) throw std::invalid_argument("bench_paths: repeats must be >= 1");
    std::vector<BenchRow> rows;
    SplitMix64 rng(seed);
    for (int size : sizes) {
        if (size < 4 || size > 128) {
            throw std::invalid_argument("bench_paths: sizes must lie in [4, 128]");
        }
        const SpectralPlan plan(size, size);
        const ScalarField2D kernel = plan.kernel_table();
        ScalarField2D d(size, size);
        for (auto& v : d.values()) v = rng.uniform(-1.0, 1.0);

        std::vector<double> t_fft;
        std::vector<double> t_direct;
        volatile double sink = 0.0;
        // Untimed warm-up: first touch of scratch buffers and caches.
        sink = sink + energy_spectral(d, plan, 1.0) + energy_direct(d, kernel, 1.0, true);
        for (int r = 0; r < repeats; ++r) {
            auto t0 = clock::now();
            sink = sink + energy_spectral(d, plan, 1.0);
            auto t1 = clock::now();
            sink = sink + energy_direct(d, kernel, 1.0, true);
            auto t2 = clock::now();
            t_fft.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
            t_direct.push_back(std::chrono::duration<double, std::nano>(t2 - t1).count());
        }
        auto median = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        };
        rows.push_back({size, median(t_fft), median(t_direct)});
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "size,t_fft_ns,t_direct_ns,ratio\n";
    for (const auto& r : rows) {
        out << r.size << ',' << static_cast<long long>(r.t_fft_ns) << ','
            << static_cast<long long>(r.t_direct_ns) << ',' << r.ratio() << '\n';
    }
}

}  // namespace ebl

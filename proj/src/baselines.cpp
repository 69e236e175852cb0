#include "ebl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ebl {

namespace {

void check_same(const ScalarField2D& p, const BinaryMask& g, const char* who) {
    if (p.width() != g.width() || p.height() != g.height()) {
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
}

// 1D squared distance transform of sampled function f (Felzenszwalb & Huttenlocher).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        double s = 0.0;
        while (true) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[k] && k > 0) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

LossGrad bce_loss_grad(const ScalarField2D& prob, const BinaryMask& gt) {
    check_same(prob, gt, "bce_loss_grad");
    const double n = static_cast<double>(prob.size());
    LossGrad out{0.0, ScalarField2D(prob.width(), prob.height())};
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double p = std::clamp(prob[i], kBceEpsilon, 1.0 - kBceEpsilon);
        const double g = gt[i];
        out.loss -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
        out.grad_p[i] = -(g / p - (1.0 - g) / (1.0 - p)) / n;
    }
    out.loss /= n;
    return out;
}

LossGrad dice_loss_grad(const ScalarField2D& prob, const BinaryMask& gt, double smooth) {
    check_same(prob, gt, "dice_loss_grad");
    double inter = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        inter += prob[i] * gt[i];
        total += prob[i] + gt[i];
    }
    const double num = 2.0 * inter + smooth;
    const double den = total + smooth;
    LossGrad out{1.0 - num / den, ScalarField2D(prob.width(), prob.height())};
    for (std::size_t i = 0; i < prob.size(); ++i) {
        out.grad_p[i] = -(2.0 * gt[i] * den - num) / (den * den);
    }
    return out;
}

ScalarField2D distance_transform(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    if (mask.count() == 0) return ScalarField2D(w, h, static_cast<double>(w + h));

    // Finite stand-in for +inf keeps the parabola intersections well defined.
    const double far = 4.0 * (double(w) * w + double(h) * h) + 1.0;
    ScalarField2D sq(w, h);
    for (std::size_t i = 0; i < mask.size(); ++i) sq[i] = mask[i] ? 0.0 : far;

    const int n = std::max(w, h);
    std::vector<double> f(n);
    std::vector<double> d(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    f.resize(h);
    d.resize(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = sq(x, y);
        edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) sq(x, y) = d[y];
    }
    f.resize(w);
    d.resize(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = sq(x, y);
        edt_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) sq(x, y) = d[x];
    }
    for (auto& value : sq.values()) value = std::sqrt(value);
    return sq;
}

ScalarField2D signed_distance(const BinaryMask& mask) {
    ScalarField2D outside = distance_transform(mask);
    const ScalarField2D inside = distance_transform(mask.complement());
    for (std::size_t i = 0; i < outside.size(); ++i) outside[i] -= inside[i];
    return outside;
}

LossGrad surface_loss_grad(const ScalarField2D& prob, const BinaryMask& gt) {
    check_same(prob, gt, "surface_loss_grad");
    const ScalarField2D sdf = signed_distance(gt);
    const double n = static_cast<double>(prob.size());
    LossGrad out{0.0, ScalarField2D(prob.width(), prob.height())};
    for (std::size_t i = 0; i < prob.size(); ++i) {
        out.loss += prob[i] * sdf[i];
        out.grad_p[i] = sdf[i] / n;
    }
    out.loss /= n;
    return out;
}

}  // namespace ebl

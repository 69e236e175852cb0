#include "ebl/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "ebl/rng.hpp"

namespace ebl {

namespace {

struct Segment {
    double x0, y0, x1, y1;
    double half_width;
    double angle;
    double length;
};

double distance_to_segment(double px, double py, const Segment& s) {
    const double dx = s.x1 - s.x0;
    const double dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = s.x0 + t * dx - px;
    const double ey = s.y0 + t * dy - py;
    return std::sqrt(ex * ex + ey * ey);
}

void rasterize(const Segment& s, BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    const double r = s.half_width;
    const int xa = std::max(0, static_cast<int>(std::floor(std::min(s.x0, s.x1) - r)));
    const int xb = std::min(w - 1, static_cast<int>(std::ceil(std::max(s.x0, s.x1) + r)));
    const int ya = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - r)));
    const int yb = std::min(h - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + r)));
    for (int y = ya; y <= yb; ++y) {
        for (int x = xa; x <= xb; ++x) {
            if (distance_to_segment(x, y, s) <= r) mask(x, y) = 1;
        }
    }
}

bool inside(double x, double y, int w, int h) {
    return x >= 0.0 && y >= 0.0 && x <= w - 1.0 && y <= h - 1.0;
}

}  // namespace

void PhantomSpec::validate() const {
    if (width < 4 || height < 4) throw std::invalid_argument("phantom size must be at least 4x4");
    if (n_branches < 1) throw std::invalid_argument("n_branches must be >= 1");
    // Half-widths below sqrt(2)/2 can rasterize into disconnected pixels.
    if (min_width < 0.75) throw std::invalid_argument("min_width must be >= 0.75");
    if (min_width > max_width) throw std::invalid_argument("min_width must not exceed max_width");
    if (!(contrast > 0.0 && contrast <= 1.0)) throw std::invalid_argument("contrast must lie in (0, 1]");
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be nonnegative");
}

Phantom generate(const PhantomSpec& spec) {
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    const double extent = std::min(w, h);
    constexpr double pi = std::numbers::pi;
    SplitMix64 rng(spec.seed);

    // Root enters from one of the four borders, aimed roughly at the centre.
    const auto side = rng.below(4);
    const double along = rng.uniform(0.25, 0.75);
    double sx = 0.0;
    double sy = 0.0;
    switch (side) {
        case 0: sx = along * (w - 1); sy = 0.0; break;
        case 1: sx = w - 1.0; sy = along * (h - 1); break;
        case 2: sx = along * (w - 1); sy = h - 1.0; break;
        default: sx = 0.0; sy = along * (h - 1); break;
    }
    const double to_centre = std::atan2(0.5 * (h - 1) - sy, 0.5 * (w - 1) - sx);
    Segment root;
    root.angle = to_centre + rng.uniform(-pi / 8.0, pi / 8.0);
    root.length = extent * rng.uniform(0.35, 0.5);
    root.half_width = spec.max_width;
    root.x0 = sx;
    root.y0 = sy;
    root.x1 = sx + root.length * std::cos(root.angle);
    root.y1 = sy + root.length * std::sin(root.angle);

    std::vector<Segment> segments{root};
    std::deque<std::size_t> frontier{0};
    while (static_cast<int>(segments.size()) < spec.n_branches && !frontier.empty()) {
        const Segment parent = segments[frontier.front()];
        frontier.pop_front();
        if (!inside(parent.x1, parent.y1, w, h)) continue;
        for (int child = 0; child < 2 && static_cast<int>(segments.size()) < spec.n_branches; ++child) {
            const double turn = rng.uniform(pi / 9.0, pi / 4.0);
            Segment s;
            s.angle = parent.angle + (child == 0 ? turn : -turn);
            s.length = parent.length * rng.uniform(0.55, 0.8);
            s.half_width = std::max(spec.min_width, parent.half_width * rng.uniform(0.65, 0.85));
            s.x0 = parent.x1;
            s.y0 = parent.y1;
            s.x1 = s.x0 + s.length * std::cos(s.angle);
            s.y1 = s.y0 + s.length * std::sin(s.angle);
            segments.push_back(s);
            frontier.push_back(segments.size() - 1);
        }
    }

    Phantom out;
    out.seed = spec.seed;
    out.mask = BinaryMask(w, h);
    for (const auto& s : segments) rasterize(s, out.mask);

    const double background = 0.5 * (1.0 - spec.contrast);
    out.image = ScalarField2D(w, h);
    for (std::size_t i = 0; i < out.image.size(); ++i) {
        double v = background + spec.contrast * out.mask[i];
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
        out.image[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

std::vector<Phantom> dataset(const PhantomSpec& base, int n_images, std::uint64_t seed) {
    if (n_images < 1) throw std::invalid_argument("dataset needs n_images >= 1");
    std::vector<Phantom> out;
    out.reserve(static_cast<std::size_t>(n_images));
    for (int i = 0; i < n_images; ++i) {
        PhantomSpec spec = base;
        spec.seed = seed + static_cast<std::uint64_t>(i);
        out.push_back(generate(spec));
    }
    return out;
}

std::vector<Sample> to_samples(const std::vector<Phantom>& phantoms) {
    std::vector<Sample> out;
    out.reserve(phantoms.size());
    for (const auto& p : phantoms) out.push_back({p.image, p.mask});
    return out;
}

std::pair<std::vector<Phantom>, std::vector<Phantom>> split(const std::vector<Phantom>& phantoms) {
    std::pair<std::vector<Phantom>, std::vector<Phantom>> out;
    for (std::size_t i = 0; i < phantoms.size(); ++i) {
        (i % 2 == 0 ? out.first : out.second).push_back(phantoms[i]);
    }
    return out;
}

int count_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<char> seen(mask.size(), 0);
    int components = 0;
    std::deque<std::pair<int, int>> queue;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!mask(x0, y0) || seen[mask.index(x0, y0)]) continue;
            ++components;
            seen[mask.index(x0, y0)] = 1;
            queue.emplace_back(x0, y0);
            while (!queue.empty()) {
                const auto [x, y] = queue.front();
                queue.pop_front();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (!mask(nx, ny) || seen[mask.index(nx, ny)]) continue;
                        seen[mask.index(nx, ny)] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
        }
    }
    return components;
}

}  // namespace ebl

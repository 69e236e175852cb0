#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ebl/field.hpp"
#include "ebl/toy_net.hpp"

namespace ebl {

struct PhantomSpec {
    int width = 64;
    int height = 64;
    /// Total number of vessel segments in the tree.
    int n_branches = 9;
    /// Vessel half-widths in pixels.
    double min_width = 1.0;
    double max_width = 3.0;
    double contrast = 0.6;
    double noise_sigma = 0.1;
    std::uint64_t seed = 7;

    void validate() const;
};

struct Phantom {
    ScalarField2D image;
    BinaryMask mask;
    std::uint64_t seed = 0;
};

/// Branching tree of straight capsules grown breadth-first from a root entering
/// at a random image border. All draws come from SplitMix64(spec.seed): tree
/// geometry first, then one normal() per pixel in row-major order when
/// noise_sigma > 0. Background intensity is 0.5*(1 - contrast), vessels add contrast.
Phantom generate(const PhantomSpec& spec);

/// n_images phantoms; image i uses seed + i.
std::vector<Phantom> dataset(const PhantomSpec& base, int n_images, std::uint64_t seed);

std::vector<Sample> to_samples(const std::vector<Phantom>& phantoms);

/// Even indices train, odd indices test.
std::pair<std::vector<Phantom>, std::vector<Phantom>> split(const std::vector<Phantom>& phantoms);

/// Number of 8-connected foreground components.
int count_components(const BinaryMask& mask);

}  // namespace ebl

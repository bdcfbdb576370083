#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tilediff/denoiser.hpp"
#include "tilediff/grid.hpp"
#include "tilediff/tiler.hpp"

// Synthetic inputs for runs without an external base image.
namespace tilediff::fixtures {

// Linear ramp along x + y, from 0 to 1.
Grid ramp(const Shape& shape);

// Alternating squares of side `cell`, values 0 and 1.
Grid checker(const Shape& shape, std::size_t cell);

// N(0, 1) per element.
Grid white_noise(const Shape& shape, std::uint64_t seed);

// Sum of a few random low-frequency cosines, zero mean, unit standard
// deviation per channel. Stands in for a coarse latent.
Grid smooth(const Shape& shape, std::uint64_t seed);

// Image-like content in [0, 1]: smooth shading, a handful of hard-edged
// discs and bars, and faint fine texture.
Grid scene(const Shape& shape, std::uint64_t seed);

// Named lookup used by the run config: ramp, checker, noise, smooth, scene.
Grid by_name(std::string_view name, const Shape& shape, std::uint64_t seed);

// One constant patch per layout slot, alternating 0 and 1 in a checkerboard
// over the patch grid. Neighbouring patches disagree everywhere they overlap.
std::vector<Grid> conflicting_patches(const TileLayout& layout, std::size_t channels = 1);

// Equal-weight mixture whose component means are white noise of standard
// deviation `amplitude`. Each component has per-element variance `variance`.
GmmPrior texture_prior(const Shape& patch, std::size_t components, double variance, double amplitude,
                       std::uint64_t seed);

} // namespace tilediff::fixtures

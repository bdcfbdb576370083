#pragma once

#include <cstddef>

#include "tilediff/grid.hpp"

namespace tilediff {

// Catmull-Rom cubic convolution kernel (a = -0.5).
double catmull_rom(double x) noexcept;

// Bicubic upscale by an integer factor with half-pixel sample alignment and
// clamp-to-edge borders. scale == 1 returns a copy. Throws on scale == 0.
Grid interpolate_bicubic(const Grid& g, std::size_t scale);

// Bilinear upscale by an integer factor, same alignment and borders.
Grid upsample_bilinear(const Grid& g, std::size_t factor);

// factor x factor block mean. Height and width must be divisible by factor.
Grid downsample_box(const Grid& g, std::size_t factor);

} // namespace tilediff

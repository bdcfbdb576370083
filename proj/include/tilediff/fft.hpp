#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tilediff {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n) noexcept;

// Largest dimension accepted by the O(n^2) direct transform.
inline constexpr std::size_t kMaxDirectDft = 256;

// In-place 1-D DFT (unnormalized forward, 1/n-scaled inverse). Uses iterative
// radix-2 for power-of-two lengths and a direct sum otherwise.
void dft(std::vector<Complex>& data, bool inverse);

// In-place 2-D transform over a row-major height x width plane.
void dft2d(std::vector<Complex>& plane, std::size_t height, std::size_t width, bool inverse);

} // namespace tilediff

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace tilediff {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

// Identifies one independent noise stream. Streams for distinct keys never
// share counter blocks, so results do not depend on evaluation order.
struct NoiseKey {
    std::uint64_t seed = 0;
    std::uint32_t level = 0;
    std::uint32_t patch = 0;
    std::uint32_t step = 0;

    friend bool operator==(const NoiseKey&, const NoiseKey&) = default;
};

// Fills `out` with standard normal variates from the stream named by `key`
// (Box-Muller over consecutive counter blocks). Element i is a function of
// (key, i) only.
void fill_standard_normal(const NoiseKey& key, std::span<float> out);

// Uniform variate in (0, 1] from a 32-bit word.
double uniform_open_closed(std::uint32_t word) noexcept;

} // namespace tilediff

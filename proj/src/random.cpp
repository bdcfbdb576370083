#include "tilediff/random.hpp"

#include <cmath>
#include <numbers>

namespace tilediff {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;
constexpr int kRounds = 10;

PhiloxCounter round_once(const PhiloxCounter& ctr, const PhiloxKey& key) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

} // namespace

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept {
    for (int r = 0; r < kRounds; ++r) {
        if (r > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        counter = round_once(counter, key);
    }
    return counter;
}

double uniform_open_closed(std::uint32_t word) noexcept {
    return (static_cast<double>(word) + 1.0) * 0x1p-32;
}

void fill_standard_normal(const NoiseKey& key, std::span<float> out) {
    const PhiloxKey k{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)};
    std::size_t i = 0;
    for (std::uint32_t block = 0; i < out.size(); ++block) {
        const auto words = philox4x32({block, key.step, key.patch, key.level}, k);
        for (int pair = 0; pair < 2 && i < out.size(); ++pair) {
            const double radius = std::sqrt(-2.0 * std::log(uniform_open_closed(words[2 * pair])));
            const double angle = 2.0 * std::numbers::pi * uniform_open_closed(words[2 * pair + 1]);
            out[i++] = static_cast<float>(radius * std::cos(angle));
            if (i < out.size()) out[i++] = static_cast<float>(radius * std::sin(angle));
        }
    }
}

} // namespace tilediff

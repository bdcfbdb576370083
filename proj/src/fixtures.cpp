#include "tilediff/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tilediff/random.hpp"

namespace tilediff::fixtures {

namespace {

// Distinct seeds in the "level" slot keep fixture streams apart from the
// sampler's injection noise.
constexpr std::uint32_t kFixtureStream = 0xF1C5u;

void normalize_channel(std::span<float> v) {
    double mean = 0.0;
    for (float x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (float x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    for (float& x : v) x = static_cast<float>(sd > 0.0 ? (x - mean) / sd : 0.0);
}

} // namespace

Grid ramp(const Shape& shape) {
    Grid g(shape);
    const double denom = static_cast<double>(shape.height + shape.width - 2);
    for (std::size_t c = 0; c < shape.channels; ++c) {
        for (std::size_t y = 0; y < shape.height; ++y) {
            for (std::size_t x = 0; x < shape.width; ++x) {
                g.at(c, y, x) = denom > 0 ? static_cast<float>(static_cast<double>(x + y) / denom) : 0.0f;
            }
        }
    }
    return g;
}

Grid checker(const Shape& shape, std::size_t cell) {
    if (cell == 0) throw InvalidArgument("checker cell size must be positive");
    Grid g(shape);
    for (std::size_t c = 0; c < shape.channels; ++c) {
        for (std::size_t y = 0; y < shape.height; ++y) {
            for (std::size_t x = 0; x < shape.width; ++x) g.at(c, y, x) = ((y / cell + x / cell) % 2) ? 1.0f : 0.0f;
        }
    }
    return g;
}

Grid white_noise(const Shape& shape, std::uint64_t seed) {
    Grid g(shape);
    fill_standard_normal(NoiseKey{seed, kFixtureStream, 0, 0}, g.values());
    return g;
}

Grid smooth(const Shape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5eed5eedULL);
    std::uniform_int_distribution<int> freq(0, 3);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> amp(0.0, 1.0);
    Grid g(shape);
    for (std::size_t c = 0; c < shape.channels; ++c) {
        auto plane = g.channel(c);
        for (int k = 0; k < 6; ++k) {
            int fy = freq(rng);
            const int fx = freq(rng);
            if (fy == 0 && fx == 0) fy = 1;
            const double ph = phase(rng);
            const double a = amp(rng) / (1.0 + fy + fx);
            for (std::size_t y = 0; y < shape.height; ++y) {
                for (std::size_t x = 0; x < shape.width; ++x) {
                    const double u = static_cast<double>(y) / static_cast<double>(shape.height);
                    const double v = static_cast<double>(x) / static_cast<double>(shape.width);
                    plane[y * shape.width + x] +=
                        static_cast<float>(a * std::cos(2.0 * std::numbers::pi * (fy * u + fx * v) + ph));
                }
            }
        }
        normalize_channel(plane);
    }
    return g;
}

Grid scene(const Shape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xC0FFEEULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double h = static_cast<double>(shape.height);
    const double w = static_cast<double>(shape.width);
    Grid g(shape);
    const Grid tex = white_noise(shape, seed);
    for (std::size_t c = 0; c < shape.channels; ++c) {
        const double gy = unit(rng) - 0.5;
        const double gx = unit(rng) - 0.5;
        struct Disc {
            double cy, cx, r, v;
        };
        std::vector<Disc> discs(4);
        for (auto& d : discs) d = {unit(rng) * h, unit(rng) * w, (0.08 + 0.15 * unit(rng)) * std::min(h, w), unit(rng)};
        const double bar_y = unit(rng) * h;
        const double bar_half = 0.04 * h + 1.0;
        const double bar_v = unit(rng);
        for (std::size_t y = 0; y < shape.height; ++y) {
            for (std::size_t x = 0; x < shape.width; ++x) {
                const double py = static_cast<double>(y) + 0.5;
                const double px = static_cast<double>(x) + 0.5;
                double v = 0.5 + 0.3 * (gy * (py / h - 0.5) * 2.0 + gx * (px / w - 0.5) * 2.0);
                if (std::abs(py - bar_y) < bar_half) v = 0.6 * v + 0.4 * bar_v;
                for (const auto& d : discs) {
                    if ((py - d.cy) * (py - d.cy) + (px - d.cx) * (px - d.cx) < d.r * d.r) v = 0.5 * v + 0.5 * d.v;
                }
                v += 0.02 * tex.at(c, y, x);
                g.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return g;
}

Grid by_name(std::string_view name, const Shape& shape, std::uint64_t seed) {
    if (name == "ramp") return ramp(shape);
    if (name == "checker") return checker(shape, std::max<std::size_t>(1, shape.width / 8));
    if (name == "noise") return white_noise(shape, seed);
    if (name == "smooth") return smooth(shape, seed);
    if (name == "scene") return scene(shape, seed);
    throw ConfigError("unknown fixture '" + std::string(name) + "' (ramp, checker, noise, smooth, scene)");
}

std::vector<Grid> conflicting_patches(const TileLayout& layout, std::size_t channels) {
    std::vector<Grid> patches;
    patches.reserve(layout.patch_count());
    const std::size_t cols = layout.col_offsets().size();
    for (std::size_t p = 0; p < layout.patch_count(); ++p) {
        const float v = ((p / cols + p % cols) % 2) ? 1.0f : 0.0f;
        patches.emplace_back(channels, layout.patch_height(), layout.patch_width(), v);
    }
    return patches;
}

GmmPrior texture_prior(const Shape& patch, std::size_t components, double variance, double amplitude,
                       std::uint64_t seed) {
    if (components == 0) throw InvalidArgument("texture prior needs at least one component");
    std::vector<GmmComponent> comps;
    comps.reserve(components);
    for (std::size_t k = 0; k < components; ++k) {
        Grid mean(patch);
        fill_standard_normal(NoiseKey{seed, kFixtureStream + 1, static_cast<std::uint32_t>(k), 0}, mean.values());
        for (float& v : mean.values()) v = static_cast<float>(v * amplitude);
        comps.push_back({std::move(mean), 1.0 / static_cast<double>(components), variance});
    }
    // Equal weights may not sum to exactly 1 in floating point; fold the residue.
    double total = 0.0;
    for (const auto& c : comps) total += c.weight;
    comps.back().weight += 1.0 - total;
    return GmmPrior(std::move(comps));
}

} // namespace tilediff::fixtures

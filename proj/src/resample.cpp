#include "tilediff/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace tilediff {

namespace {

constexpr double kCubicA = -0.5;

template <std::size_t Taps>
struct AxisTaps {
    std::array<std::size_t, Taps> index{};
    std::array<double, Taps> weight{};
};

std::size_t clamp_index(long i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
}

double source_coordinate(std::size_t out, std::size_t scale) {
    return (static_cast<double>(out) + 0.5) / static_cast<double>(scale) - 0.5;
}

std::vector<AxisTaps<4>> cubic_taps(std::size_t n, std::size_t scale) {
    std::vector<AxisTaps<4>> taps(n * scale);
    for (std::size_t o = 0; o < taps.size(); ++o) {
        const double src = source_coordinate(o, scale);
        const double base = std::floor(src);
        const double t = src - base;
        const long i0 = static_cast<long>(base);
        for (long k = 0; k < 4; ++k) {
            taps[o].index[k] = clamp_index(i0 - 1 + k, n);
            taps[o].weight[k] = catmull_rom(t - static_cast<double>(k - 1));
        }
    }
    return taps;
}

std::vector<AxisTaps<2>> linear_taps(std::size_t n, std::size_t scale) {
    std::vector<AxisTaps<2>> taps(n * scale);
    for (std::size_t o = 0; o < taps.size(); ++o) {
        const double src = source_coordinate(o, scale);
        const double base = std::floor(src);
        const double t = src - base;
        const long i0 = static_cast<long>(base);
        taps[o].index = {clamp_index(i0, n), clamp_index(i0 + 1, n)};
        taps[o].weight = {1.0 - t, t};
    }
    return taps;
}

// Interpolated values are accumulated as offsets from the reference tap, so a
// constant neighbourhood reproduces its value exactly.
template <std::size_t Taps>
double apply_taps(const AxisTaps<Taps>& taps, std::size_t ref, auto&& sample) {
    const double anchor = sample(taps.index[ref]);
    double acc = 0.0;
    for (std::size_t k = 0; k < Taps; ++k) {
        acc += taps.weight[k] * (sample(taps.index[k]) - anchor);
    }
    return anchor + acc;
}

template <std::size_t Taps>
Grid separable_upsample(const Grid& g, std::size_t scale, const std::vector<AxisTaps<Taps>>& rows,
                        const std::vector<AxisTaps<Taps>>& cols, std::size_t ref) {
    const std::size_t out_h = g.height() * scale;
    const std::size_t out_w = g.width() * scale;
    Grid out(g.channels(), out_h, out_w);
    std::vector<double> horizontal(g.height() * out_w);

    for (std::size_t c = 0; c < g.channels(); ++c) {
        const auto plane = g.channel(c);
        for (std::size_t y = 0; y < g.height(); ++y) {
            const float* row = plane.data() + y * g.width();
            for (std::size_t x = 0; x < out_w; ++x) {
                horizontal[y * out_w + x] =
                    apply_taps(cols[x], ref, [row](std::size_t i) { return static_cast<double>(row[i]); });
            }
        }
        auto dst = out.channel(c);
        for (std::size_t y = 0; y < out_h; ++y) {
            for (std::size_t x = 0; x < out_w; ++x) {
                dst[y * out_w + x] = static_cast<float>(apply_taps(
                    rows[y], ref, [&](std::size_t i) { return horizontal[i * out_w + x]; }));
            }
        }
    }
    return out;
}

void check_scale(std::size_t scale, const char* what) {
    if (scale == 0) throw InvalidArgument(std::string(what) + ": scale factor must be >= 1");
}

} // namespace

double catmull_rom(double x) noexcept {
    const double ax = std::abs(x);
    if (ax <= 1.0) return ((kCubicA + 2.0) * ax - (kCubicA + 3.0)) * ax * ax + 1.0;
    if (ax < 2.0) return ((kCubicA * ax - 5.0 * kCubicA) * ax + 8.0 * kCubicA) * ax - 4.0 * kCubicA;
    return 0.0;
}

Grid interpolate_bicubic(const Grid& g, std::size_t scale) {
    check_scale(scale, "interpolate_bicubic");
    if (scale == 1) return g;
    return separable_upsample(g, scale, cubic_taps(g.height(), scale), cubic_taps(g.width(), scale), 1);
}

Grid upsample_bilinear(const Grid& g, std::size_t factor) {
    check_scale(factor, "upsample_bilinear");
    if (factor == 1) return g;
    return separable_upsample(g, factor, linear_taps(g.height(), factor), linear_taps(g.width(), factor), 0);
}

Grid downsample_box(const Grid& g, std::size_t factor) {
    check_scale(factor, "downsample_box");
    if (g.height() % factor != 0 || g.width() % factor != 0) {
        throw InvalidArgument("downsample_box: " + to_string(g.shape()) + " not divisible by factor " +
                              std::to_string(factor));
    }
    if (factor == 1) return g;
    const std::size_t out_h = g.height() / factor;
    const std::size_t out_w = g.width() / factor;
    const double inv_area = 1.0 / static_cast<double>(factor * factor);
    Grid out(g.channels(), out_h, out_w);
    for (std::size_t c = 0; c < g.channels(); ++c) {
        for (std::size_t y = 0; y < out_h; ++y) {
            for (std::size_t x = 0; x < out_w; ++x) {
                const double anchor = g.at(c, y * factor, x * factor);
                double acc = 0.0;
                for (std::size_t dy = 0; dy < factor; ++dy) {
                    for (std::size_t dx = 0; dx < factor; ++dx) {
                        acc += g.at(c, y * factor + dy, x * factor + dx) - anchor;
                    }
                }
                out.at(c, y, x) = static_cast<float>(anchor + acc * inv_area);
            }
        }
    }
    return out;
}

} // namespace tilediff

#include "tilediff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tilediff/fft.hpp"

namespace tilediff {

namespace {

constexpr double kParsevalTolerance = 1e-4;

void check_transformable(const Shape& s) {
    if (!spectral_size_supported(s)) {
        throw InvalidArgument("spectral metrics need power-of-two sizes or sizes <= " + std::to_string(kMaxDirectDft) +
                              ", got " + to_string(s));
    }
}

std::vector<Complex> forward_plane(std::span<const float> values, std::size_t h, std::size_t w) {
    std::vector<Complex> plane(values.begin(), values.end());
    dft2d(plane, h, w, false);

    double spatial = 0.0;
    for (float v : values) spatial += static_cast<double>(v) * v;
    double spectral = 0.0;
    for (const auto& f : plane) spectral += std::norm(f);
    spectral /= static_cast<double>(h * w);
    if (std::abs(spectral - spatial) > kParsevalTolerance * std::max(spatial, 1e-300)) {
        throw NumericError("Parseval check failed: spatial " + std::to_string(spatial) + " vs spectral " +
                           std::to_string(spectral));
    }
    return plane;
}

// Signed frequency index mapped to cycles per sample times two (Nyquist = 1).
double axis_frequency(std::size_t k, std::size_t n) noexcept {
    const double signed_k = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    return 2.0 * signed_k / static_cast<double>(n);
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    // Relative floor: filtered constants leave ~1e-30 of transform residue.
    const double floor = 1e-24 * std::max({1.0, ma * ma, mb * mb}) * n;
    const bool flat_a = saa <= floor;
    const bool flat_b = sbb <= floor;
    if (flat_a || flat_b) {
        if (!(flat_a && flat_b)) return 0.0;
        return std::abs(ma - mb) <= 1e-12 * std::max({1.0, std::abs(ma), std::abs(mb)}) ? 1.0 : 0.0;
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void mark_boundaries(std::vector<bool>& flags, std::size_t canvas, std::size_t patch,
                     const std::vector<std::size_t>& offsets) {
    // An interface at position x separates cells x - 1 and x.
    auto mark = [&](std::size_t x) {
        if (x == 0 || x >= canvas) return;
        flags[x - 1] = true;
        flags[x] = true;
    };
    if (offsets.size() < 2) return;
    for (std::size_t off : offsets) {
        mark(off);
        mark(off + patch);
    }
    const auto owner = nearest_patch_along_axis(canvas, patch, offsets);
    for (std::size_t x = 1; x < canvas; ++x) {
        if (owner[x] != owner[x - 1]) mark(x);
    }
}

} // namespace

bool spectral_size_supported(const Shape& shape) noexcept {
    auto ok = [](std::size_t n) { return is_power_of_two(n) || n <= kMaxDirectDft; };
    return ok(shape.height) && ok(shape.width);
}

double radial_frequency(std::size_t ky, std::size_t kx, std::size_t h, std::size_t w) noexcept {
    return std::hypot(axis_frequency(ky, h), axis_frequency(kx, w));
}

SpectrumBands radial_band_energy(const Grid& g, std::vector<double> edges) {
    check_transformable(g.shape());
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw InvalidArgument("band edges must be strictly ascending");
    }
    const std::size_t h = g.height();
    const std::size_t w = g.width();
    SpectrumBands out;
    out.edges = std::move(edges);
    out.energies.assign(out.edges.size() + 1, 0.0);

    // Bin lookup is shared across channels.
    std::vector<std::size_t> bin(h * w);
    for (std::size_t ky = 0; ky < h; ++ky) {
        for (std::size_t kx = 0; kx < w; ++kx) {
            const double r = radial_frequency(ky, kx, h, w);
            bin[ky * w + kx] = static_cast<std::size_t>(std::upper_bound(out.edges.begin(), out.edges.end(), r) -
                                                        out.edges.begin());
        }
    }

    const double scale = 1.0 / static_cast<double>(h * w);
    for (std::size_t c = 0; c < g.channels(); ++c) {
        const auto plane = forward_plane(g.channel(c), h, w);
        out.dc += std::norm(plane[0]) * scale;
        for (std::size_t i = 1; i < plane.size(); ++i) out.energies[bin[i]] += std::norm(plane[i]) * scale;
    }
    for (double e : out.energies) out.total += e;
    return out;
}

GridF64 band_filter(const Grid& g, const Band& band) {
    check_transformable(g.shape());
    const std::size_t h = g.height();
    const std::size_t w = g.width();
    GridF64 out(g.shape());
    for (std::size_t c = 0; c < g.channels(); ++c) {
        auto plane = forward_plane(g.channel(c), h, w);
        for (std::size_t ky = 0; ky < h; ++ky) {
            for (std::size_t kx = 0; kx < w; ++kx) {
                if (!band.contains(radial_frequency(ky, kx, h, w))) plane[ky * w + kx] = 0.0;
            }
        }
        dft2d(plane, h, w, true);
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < plane.size(); ++i) dst[i] = plane[i].real();
    }
    return out;
}

double band_correlation(const Grid& a, const Grid& b, const Band& band) {
    require_same_shape(a.shape(), b.shape(), "band_correlation");
    const auto fa = band_filter(a, band);
    const auto fb = band_filter(b, band);
    return pearson(fa.values(), fb.values());
}

double psnr(const Grid& a, const Grid& b, double peak) {
    require_same_shape(a.shape(), b.shape(), "psnr");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sq += d * d;
    }
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / (sq / static_cast<double>(a.size())));
}

Grid seam_boundary_mask(const TileLayout& layout) {
    const std::size_t h = layout.canvas_height();
    const std::size_t w = layout.canvas_width();
    std::vector<bool> rows(h, false);
    std::vector<bool> cols(w, false);
    mark_boundaries(rows, h, layout.patch_height(), layout.row_offsets());
    mark_boundaries(cols, w, layout.patch_width(), layout.col_offsets());
    Grid mask(1, h, w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) mask.at(0, y, x) = rows[y] || cols[x] ? 1.0f : 0.0f;
    }
    return mask;
}

double seam_energy(const Grid& g, const TileLayout& layout) {
    if (g.height() != layout.canvas_height() || g.width() != layout.canvas_width()) {
        throw InvalidArgument("seam_energy: grid " + to_string(g.shape()) + " does not match layout canvas");
    }
    if (layout.patch_count() < 2) return 1.0;

    const Grid mask = seam_boundary_mask(layout);
    const std::size_t h = g.height();
    const std::size_t w = g.width();
    const auto stats = compute_stats(g);
    const double range_eps = 1e-6 * (stats.max - stats.min);
    const double eps = std::max(range_eps * range_eps, 1e-30);

    double sum_b = 0.0;
    double sum_i = 0.0;
    std::size_t n_b = 0;
    std::size_t n_i = 0;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::size_t c = 0; c < g.channels(); ++c) {
                const double v = g.at(c, y, x);
                if (x > 0 && x + 1 < w) {
                    const double d = static_cast<double>(g.at(c, y, x - 1)) - 2.0 * v + g.at(c, y, x + 1);
                    s += d * d;
                }
                if (y > 0 && y + 1 < h) {
                    const double d = static_cast<double>(g.at(c, y - 1, x)) - 2.0 * v + g.at(c, y + 1, x);
                    s += d * d;
                }
            }
            if (mask.at(0, y, x) != 0.0f) {
                sum_b += s;
                ++n_b;
            } else {
                sum_i += s;
                ++n_i;
            }
        }
    }
    if (n_b == 0 || n_i == 0) return 1.0;
    return std::sqrt((sum_b / static_cast<double>(n_b) + eps) / (sum_i / static_cast<double>(n_i) + eps));
}

} // namespace tilediff

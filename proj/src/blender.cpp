#include "tilediff/blender.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tilediff {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        total += v;
    }
    for (double& v : k) v /= total;
    return k;
}

std::vector<double> blur_replicate(const std::vector<double>& signal, const std::vector<double>& kernel) {
    const long n = static_cast<long>(signal.size());
    const long radius = static_cast<long>(kernel.size() / 2);
    std::vector<double> out(signal.size(), 0.0);
    for (long x = 0; x < n; ++x) {
        double acc = 0.0;
        for (long k = -radius; k <= radius; ++k) {
            acc += kernel[static_cast<std::size_t>(k + radius)] * signal[static_cast<std::size_t>(std::clamp(x + k, 0L, n - 1))];
        }
        out[static_cast<std::size_t>(x)] = acc;
    }
    return out;
}

// Raw (unnormalized) per-patch weight profile along one axis, over the canvas.
std::vector<std::vector<double>> axis_profiles(std::size_t canvas, std::size_t patch,
                                               const std::vector<std::size_t>& offsets, BlendMode mode,
                                               double sigma) {
    std::vector<std::vector<double>> profiles(offsets.size(), std::vector<double>(canvas, 0.0));
    if (mode == BlendMode::uniform) {
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            std::fill_n(profiles[i].begin() + static_cast<long>(offsets[i]), patch, 1.0);
        }
        return profiles;
    }
    const auto owner = nearest_patch_along_axis(canvas, patch, offsets);
    const auto kernel = mode == BlendMode::gaussian_feather ? gaussian_kernel(sigma) : std::vector<double>{1.0};
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        std::vector<double> indicator(canvas, 0.0);
        for (std::size_t x = 0; x < canvas; ++x) indicator[x] = owner[x] == i ? 1.0 : 0.0;
        profiles[i] = blur_replicate(indicator, kernel);
        // Crop to the patch window.
        for (std::size_t x = 0; x < canvas; ++x) {
            if (x < offsets[i] || x >= offsets[i] + patch) profiles[i][x] = 0.0;
        }
    }
    return profiles;
}

} // namespace

std::string_view to_string(BlendMode mode) {
    switch (mode) {
    case BlendMode::uniform: return "uniform";
    case BlendMode::gaussian_feather: return "gaussian_feather";
    case BlendMode::hard: return "hard";
    }
    return "unknown";
}

BlendMode parse_blend_mode(std::string_view name) {
    if (name == "uniform") return BlendMode::uniform;
    if (name == "gaussian_feather" || name == "gaussian") return BlendMode::gaussian_feather;
    if (name == "hard") return BlendMode::hard;
    throw InvalidArgument("unknown blend mode '" + std::string(name) + "'");
}

double default_feather_sigma(const TileLayout& layout) {
    std::size_t overlap = 0;
    for (std::size_t o : {layout.min_overlap_rows(), layout.min_overlap_cols()}) {
        if (o > 0) overlap = overlap == 0 ? o : std::min(overlap, o);
    }
    return overlap == 0 ? 1.0 : static_cast<double>(overlap) / 4.0;
}

BlendMaskSet build_masks(const TileLayout& layout, BlendMode mode, std::optional<double> sigma) {
    BlendMaskSet set;
    set.mode = mode;
    set.sigma = sigma.value_or(default_feather_sigma(layout));
    if (mode == BlendMode::gaussian_feather && !(set.sigma > 0.0 && std::isfinite(set.sigma))) {
        throw InvalidArgument("gaussian feathering needs sigma > 0, got " + std::to_string(set.sigma));
    }

    const auto rows = axis_profiles(layout.canvas_height(), layout.patch_height(), layout.row_offsets(), mode, set.sigma);
    const auto cols = axis_profiles(layout.canvas_width(), layout.patch_width(), layout.col_offsets(), mode, set.sigma);

    const std::size_t h = layout.canvas_height();
    const std::size_t w = layout.canvas_width();
    std::vector<double> total(h * w, 0.0);
    for (std::size_t p = 0; p < layout.patch_count(); ++p) {
        const auto off = layout.offset(p);
        const auto& rp = rows[p / layout.col_offsets().size()];
        const auto& cp = cols[p % layout.col_offsets().size()];
        for (std::size_t y = off.row; y < off.row + layout.patch_height(); ++y) {
            for (std::size_t x = off.col; x < off.col + layout.patch_width(); ++x) total[y * w + x] += rp[y] * cp[x];
        }
    }

    set.weights.reserve(layout.patch_count());
    for (std::size_t p = 0; p < layout.patch_count(); ++p) {
        const auto off = layout.offset(p);
        const auto& rp = rows[p / layout.col_offsets().size()];
        const auto& cp = cols[p % layout.col_offsets().size()];
        Grid mask(1, layout.patch_height(), layout.patch_width());
        for (std::size_t y = 0; y < layout.patch_height(); ++y) {
            for (std::size_t x = 0; x < layout.patch_width(); ++x) {
                const std::size_t cy = off.row + y;
                const std::size_t cx = off.col + x;
                const double norm = total[cy * w + cx];
                if (!(norm > 0.0)) throw NumericError("blend masks leave canvas cell uncovered");
                mask.at(0, y, x) = static_cast<float>(rp[cy] * cp[cx] / norm);
            }
        }
        set.weights.push_back(std::move(mask));
    }
    return set;
}

template <typename T>
BasicGrid<T> blend(const std::vector<BasicGrid<T>>& patches, const TileLayout& layout, const BlendMaskSet& masks) {
    if (patches.size() != layout.patch_count() || masks.weights.size() != layout.patch_count()) {
        throw InvalidArgument("blend: expected " + std::to_string(layout.patch_count()) + " patches and masks, got " +
                              std::to_string(patches.size()) + " and " + std::to_string(masks.weights.size()));
    }
    const std::size_t channels = patches.front().channels();
    const std::size_t h = layout.canvas_height();
    const std::size_t w = layout.canvas_width();
    for (const auto& p : patches) {
        require_same_shape(p.shape(), Shape{channels, layout.patch_height(), layout.patch_width()}, "blend patch");
    }

    std::vector<double> acc(channels * h * w, 0.0);
    std::vector<double> norm(h * w, 0.0);
    for (std::size_t i = 0; i < patches.size(); ++i) {
        const auto off = layout.offset(i);
        const auto& mask = masks.weights[i];
        for (std::size_t y = 0; y < layout.patch_height(); ++y) {
            for (std::size_t x = 0; x < layout.patch_width(); ++x) {
                const double wgt = mask.at(0, y, x);
                if (wgt == 0.0) continue;
                const std::size_t cell = (off.row + y) * w + off.col + x;
                norm[cell] += wgt;
                for (std::size_t c = 0; c < channels; ++c) {
                    acc[c * h * w + cell] += wgt * static_cast<double>(patches[i].at(c, y, x));
                }
            }
        }
    }

    BasicGrid<T> out(channels, h, w);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t cell = 0; cell < h * w; ++cell) {
            if (!(norm[cell] > 0.0)) throw NumericError("blend: canvas cell without weight");
            out[c * h * w + cell] = static_cast<T>(acc[c * h * w + cell] / norm[cell]);
        }
    }
    return out;
}

template Grid blend(const std::vector<Grid>&, const TileLayout&, const BlendMaskSet&);
template GridF64 blend(const std::vector<GridF64>&, const TileLayout&, const BlendMaskSet&);

Grid weight_sum(const TileLayout& layout, const BlendMaskSet& masks) {
    Grid all = canvas_weights(layout, masks);
    Grid sum(1, layout.canvas_height(), layout.canvas_width());
    for (std::size_t cell = 0; cell < sum.size(); ++cell) {
        double s = 0.0;
        for (std::size_t p = 0; p < all.channels(); ++p) s += all[p * sum.size() + cell];
        sum[cell] = static_cast<float>(s);
    }
    return sum;
}

Grid canvas_weights(const TileLayout& layout, const BlendMaskSet& masks) {
    if (masks.weights.size() != layout.patch_count()) throw InvalidArgument("mask count does not match layout");
    Grid out(layout.patch_count(), layout.canvas_height(), layout.canvas_width());
    for (std::size_t p = 0; p < layout.patch_count(); ++p) {
        const auto off = layout.offset(p);
        for (std::size_t y = 0; y < layout.patch_height(); ++y) {
            for (std::size_t x = 0; x < layout.patch_width(); ++x) {
                out.at(p, off.row + y, off.col + x) = masks.weights[p].at(0, y, x);
            }
        }
    }
    return out;
}

} // namespace tilediff

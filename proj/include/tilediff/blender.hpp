#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "tilediff/grid.hpp"
#include "tilediff/tiler.hpp"

namespace tilediff {

enum class BlendMode {
    uniform,          // plain averaging over covering patches
    gaussian_feather, // blurred nearest-centre ownership
    hard,             // unblurred nearest-centre ownership (one-hot stitch)
};

std::string_view to_string(BlendMode mode);
BlendMode parse_blend_mode(std::string_view name);

/// Per-patch weight fields, already normalized so that at every canvas cell
/// the weights of the covering patches sum to one.
struct BlendMaskSet {
    BlendMode mode = BlendMode::uniform;
    double sigma = 0.0;
    std::vector<Grid> weights; // 1 x patch_h x patch_w, one per patch, row-major patch order
};

// overlap / 4 in cells, using the narrowest overlap of the layout; 1 when the
// layout has no overlap at all.
double default_feather_sigma(const TileLayout& layout);

/// Builds normalized masks. In gaussian_feather mode each patch's ownership
/// indicator (cells whose nearest patch centre is this patch's) is blurred
/// with a separable Gaussian truncated at 3 sigma, replicating the canvas
/// border, then cropped to the patch window. `sigma` defaults to
/// default_feather_sigma() and is ignored by the other modes.
BlendMaskSet build_masks(const TileLayout& layout, BlendMode mode, std::optional<double> sigma = std::nullopt);

// canvas(p) = sum_i w_i(p) P_i(p - offset_i) / sum_i w_i(p), accumulated in
// fixed patch order.
template <typename T>
BasicGrid<T> blend(const std::vector<BasicGrid<T>>& patches, const TileLayout& layout, const BlendMaskSet& masks);

// Per-cell sum of the normalized weights (1 x canvas_h x canvas_w).
Grid weight_sum(const TileLayout& layout, const BlendMaskSet& masks);

// Normalized weights of every patch laid out on the canvas, one channel per patch.
Grid canvas_weights(const TileLayout& layout, const BlendMaskSet& masks);

} // namespace tilediff

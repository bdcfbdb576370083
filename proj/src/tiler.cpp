#include "tilediff/tiler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tilediff {

namespace {

// Guards ceil() against ratios like 3.0000000000000004 from inexact fractions.
constexpr double kCeilSlack = 1e-9;

std::size_t min_gap(const std::vector<std::size_t>& offsets, std::size_t patch) {
    if (offsets.size() < 2) return 0;
    std::size_t widest_step = 0;
    for (std::size_t i = 1; i < offsets.size(); ++i) widest_step = std::max(widest_step, offsets[i] - offsets[i - 1]);
    return patch - widest_step;
}

void check_axis(const std::vector<std::size_t>& offsets, std::size_t canvas, std::size_t patch, const char* axis) {
    if (offsets.empty() || offsets.front() != 0 || offsets.back() + patch != canvas) {
        throw InvalidArgument(std::string("layout ") + axis + " offsets must start at 0 and end flush with the canvas");
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) {
        if (offsets[i] <= offsets[i - 1] || offsets[i] - offsets[i - 1] > patch) {
            throw InvalidArgument(std::string("layout ") + axis + " offsets must increase and leave no gaps");
        }
    }
}

} // namespace

TileLayout::TileLayout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w,
                       double overlap, std::vector<std::size_t> row_offsets, std::vector<std::size_t> col_offsets)
    : canvas_h_(canvas_h), canvas_w_(canvas_w), patch_h_(patch_h), patch_w_(patch_w), overlap_(overlap),
      row_offsets_(std::move(row_offsets)), col_offsets_(std::move(col_offsets)) {
    check_axis(row_offsets_, canvas_h_, patch_h_, "row");
    check_axis(col_offsets_, canvas_w_, patch_w_, "column");
}

PatchOffset TileLayout::offset(std::size_t patch) const {
    if (patch >= patch_count()) {
        throw InvalidArgument("patch index " + std::to_string(patch) + " out of range (" +
                              std::to_string(patch_count()) + " patches)");
    }
    return {row_offsets_[patch / col_offsets_.size()], col_offsets_[patch % col_offsets_.size()]};
}

std::size_t TileLayout::min_overlap_rows() const noexcept { return min_gap(row_offsets_, patch_h_); }
std::size_t TileLayout::min_overlap_cols() const noexcept { return min_gap(col_offsets_, patch_w_); }

std::size_t patch_count(double ratio, double overlap) {
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw InvalidArgument("overlap fraction must lie in [0, 1), got " + std::to_string(overlap));
    }
    if (!(ratio >= 1.0)) throw InvalidArgument("upscale ratio must be >= 1, got " + std::to_string(ratio));
    const double n = std::ceil((ratio - overlap) / (1.0 - overlap) - kCeilSlack);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

std::vector<std::size_t> axis_offsets(std::size_t canvas, std::size_t patch, double overlap) {
    if (patch == 0 || patch > canvas) {
        throw InvalidArgument("patch size " + std::to_string(patch) + " must be in [1, canvas=" +
                              std::to_string(canvas) + "]");
    }
    const std::size_t n = patch_count(static_cast<double>(canvas) / static_cast<double>(patch), overlap);
    const std::size_t span = canvas - patch;
    if (n == 1 || span == 0) return {0};

    // round(i * span / (n - 1)) with the upper half mirrored from the lower half.
    const std::size_t steps = n - 1;
    auto rounded = [&](std::size_t i) { return (2 * i * span + steps) / (2 * steps); };
    std::vector<std::size_t> offsets(n);
    for (std::size_t i = 0; i < n; ++i) {
        offsets[i] = 2 * i <= steps ? rounded(i) : span - rounded(steps - i);
    }
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    return offsets;
}

TileLayout build_layout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w,
                        double overlap) {
    return TileLayout(canvas_h, canvas_w, patch_h, patch_w, overlap, axis_offsets(canvas_h, patch_h, overlap),
                      axis_offsets(canvas_w, patch_w, overlap));
}

std::vector<std::size_t> nearest_patch_along_axis(std::size_t canvas, std::size_t patch,
                                                  const std::vector<std::size_t>& offsets) {
    std::vector<std::size_t> owner(canvas, 0);
    for (std::size_t x = 0; x < canvas; ++x) {
        // Distances in half-cells keep the comparison exact.
        std::size_t best = 0;
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            const std::size_t cell = 2 * x + 1;
            const std::size_t centre = 2 * offsets[i] + patch;
            const std::size_t d = cell > centre ? cell - centre : centre - cell;
            if (i == 0 || d < best) {
                best = d;
                owner[x] = i;
            }
        }
    }
    return owner;
}

template <typename T>
BasicGrid<T> extract(const BasicGrid<T>& g, const TileLayout& layout, std::size_t patch) {
    if (g.height() != layout.canvas_height() || g.width() != layout.canvas_width()) {
        throw InvalidArgument("extract: grid " + to_string(g.shape()) + " does not match layout canvas");
    }
    const auto off = layout.offset(patch);
    BasicGrid<T> out(g.channels(), layout.patch_height(), layout.patch_width());
    for (std::size_t c = 0; c < g.channels(); ++c) {
        for (std::size_t y = 0; y < out.height(); ++y) {
            const auto src = g.channel(c).subspan((off.row + y) * g.width() + off.col, out.width());
            std::copy(src.begin(), src.end(), out.channel(c).begin() + static_cast<long>(y * out.width()));
        }
    }
    return out;
}

template <typename T>
void paste(BasicGrid<T>& canvas, const BasicGrid<T>& patch, const TileLayout& layout, std::size_t index) {
    if (canvas.height() != layout.canvas_height() || canvas.width() != layout.canvas_width() ||
        patch.height() != layout.patch_height() || patch.width() != layout.patch_width() ||
        patch.channels() != canvas.channels()) {
        throw InvalidArgument("paste: patch/canvas shapes do not match layout");
    }
    const auto off = layout.offset(index);
    for (std::size_t c = 0; c < canvas.channels(); ++c) {
        for (std::size_t y = 0; y < patch.height(); ++y) {
            const auto src = patch.channel(c).subspan(y * patch.width(), patch.width());
            std::copy(src.begin(), src.end(),
                      canvas.channel(c).begin() + static_cast<long>((off.row + y) * canvas.width() + off.col));
        }
    }
}

template Grid extract(const Grid&, const TileLayout&, std::size_t);
template GridF64 extract(const GridF64&, const TileLayout&, std::size_t);
template void paste(Grid&, const Grid&, const TileLayout&, std::size_t);
template void paste(GridF64&, const GridF64&, const TileLayout&, std::size_t);

} // namespace tilediff

#pragma once

#include <cstddef>
#include <vector>

#include "tilediff/grid.hpp"

namespace tilediff {

struct PatchOffset {
    std::size_t row = 0;
    std::size_t col = 0;

    friend bool operator==(const PatchOffset&, const PatchOffset&) = default;
};

/// Overlapping fixed-size patch placement over a canvas. Patches are ordered
/// row-major by offset; every canvas cell is covered by at least one patch.
class TileLayout {
public:
    TileLayout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w,
               double overlap, std::vector<std::size_t> row_offsets, std::vector<std::size_t> col_offsets);

    std::size_t canvas_height() const noexcept { return canvas_h_; }
    std::size_t canvas_width() const noexcept { return canvas_w_; }
    std::size_t patch_height() const noexcept { return patch_h_; }
    std::size_t patch_width() const noexcept { return patch_w_; }
    double overlap() const noexcept { return overlap_; }

    const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
    const std::vector<std::size_t>& col_offsets() const noexcept { return col_offsets_; }

    std::size_t patch_count() const noexcept { return row_offsets_.size() * col_offsets_.size(); }
    PatchOffset offset(std::size_t patch) const;

    // Smallest overlap width (cells) between neighbouring patches along each
    // axis; 0 when the axis holds a single patch.
    std::size_t min_overlap_rows() const noexcept;
    std::size_t min_overlap_cols() const noexcept;

private:
    std::size_t canvas_h_;
    std::size_t canvas_w_;
    std::size_t patch_h_;
    std::size_t patch_w_;
    double overlap_;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_offsets_;
};

// Patches per dimension for an upscale ratio M at overlap fraction o:
// the smallest n with n - (n - 1) o >= M, i.e. ceil((M - o) / (1 - o)).
std::size_t patch_count(double ratio, double overlap);

// Evenly spaced offsets from 0 to canvas - patch (last one flush with the
// edge), rounded to the nearest cell and mirror-symmetric.
std::vector<std::size_t> axis_offsets(std::size_t canvas, std::size_t patch, double overlap);

TileLayout build_layout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w,
                        double overlap);

// Index of the patch whose centre is nearest to each cell along one axis (ties
// go to the lower index). The nearest patch always covers the cell.
std::vector<std::size_t> nearest_patch_along_axis(std::size_t canvas, std::size_t patch,
                                                  const std::vector<std::size_t>& offsets);

template <typename T>
BasicGrid<T> extract(const BasicGrid<T>& g, const TileLayout& layout, std::size_t patch);

// Copies `patch` into `canvas` at the patch's offset (plain overwrite).
template <typename T>
void paste(BasicGrid<T>& canvas, const BasicGrid<T>& patch, const TileLayout& layout, std::size_t index);

} // namespace tilediff

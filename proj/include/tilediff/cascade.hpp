#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tilediff/blender.hpp"
#include "tilediff/codec.hpp"
#include "tilediff/ddim.hpp"
#include "tilediff/denoiser.hpp"
#include "tilediff/metrics.hpp"
#include "tilediff/schedule.hpp"
#include "tilediff/tiler.hpp"

namespace tilediff {

enum class UpSpace { pixel, latent };

std::string_view to_string(UpSpace space);
UpSpace parse_up_space(std::string_view name);

// Step grid for one level: equispaced over `steps`, truncated at depth K.
struct LevelSchedule {
    int steps = 4;
    int depth = 249;

    friend bool operator==(const LevelSchedule&, const LevelSchedule&) = default;
};

struct CascadeConfig {
    int levels = 1;
    UpSpace up_space = UpSpace::pixel;
    Codec codec = Codec::identity();
    Schedule schedule = Schedule::standard();
    LevelSchedule level_schedule;
    std::vector<std::optional<LevelSchedule>> level_overrides; // index = level
    double overlap = 0.5;
    BlendMode blend = BlendMode::gaussian_feather;
    std::optional<double> sigma;
    double lambda = 0.95;
    std::uint64_t seed = 0;
    GuidanceContext guidance;
    // Patch size in latent cells; 0 takes the denoiser's size, falling back to
    // the base latent's size for size-agnostic denoisers.
    std::size_t patch_height = 0;
    std::size_t patch_width = 0;
    std::size_t threads = 1;
    bool compute_metrics = true;

    LevelSchedule schedule_for(int level) const;
    StepGrid grid_for(int level) const;
    void validate() const;
};

struct LevelMetrics {
    std::optional<SpectrumBands> bands; // absent when the canvas size is not transformable
    double seam_ratio = 1.0;
};

struct LevelReport {
    int level = 0;
    Shape canvas;
    std::optional<TileLayout> layout;
    double sigma = 0.0;
    StepGrid grid{{0}, 1};
    std::uint64_t nfe_reverse = 0;
    std::uint64_t nfe_inversion = 0;
    double wall_ms = 0.0;
    std::optional<LevelMetrics> metrics;
};

struct CascadeResult {
    Grid output;
    std::vector<Grid> level_outputs;
    std::vector<LevelReport> reports;
};

// pixel: encode(bicubic x2 (decode(z))). latent: bicubic x2 on z directly.
Grid up(const Grid& z0, UpSpace space, const Codec& codec);

// Tiled refinement of an already upsampled canvas: per-patch inversion to
// depth K, then every reverse step refines all patches and blends them back
// into the canvas before the next step.
Grid refine_canvas(const Grid& canvas, Denoiser& den, const CascadeConfig& cfg, int level, std::size_t patch_h,
                   std::size_t patch_w, LevelReport* report = nullptr);

Grid cascade_step(const Grid& z0, Denoiser& den, const CascadeConfig& cfg, int level, std::size_t patch_h,
                  std::size_t patch_w, LevelReport* report = nullptr);

CascadeResult run_cascade(const Grid& base, Denoiser& den, const CascadeConfig& cfg);

// Patch size used for a run on `base` with `den` (see CascadeConfig).
std::pair<std::size_t, std::size_t> resolve_patch_size(const CascadeConfig& cfg, const Denoiser& den,
                                                       const Grid& base);

LevelMetrics measure_level(const Grid& canvas, const TileLayout& layout);

} // namespace tilediff

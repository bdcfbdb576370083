#include "tilediff/cascade.hpp"

#include <chrono>
#include <string>

#include "tilediff/parallel.hpp"
#include "tilediff/resample.hpp"

namespace tilediff {

std::string_view to_string(UpSpace space) { return space == UpSpace::pixel ? "pixel" : "latent"; }

UpSpace parse_up_space(std::string_view name) {
    if (name == "pixel") return UpSpace::pixel;
    if (name == "latent") return UpSpace::latent;
    throw InvalidArgument("unknown up_space '" + std::string(name) + "' (pixel, latent)");
}

LevelSchedule CascadeConfig::schedule_for(int level) const {
    if (level >= 0 && static_cast<std::size_t>(level) < level_overrides.size() && level_overrides[level]) {
        return *level_overrides[level];
    }
    return level_schedule;
}

StepGrid CascadeConfig::grid_for(int level) const {
    const LevelSchedule ls = schedule_for(level);
    if (ls.steps < 1 || ls.steps > schedule.steps()) {
        throw InvalidArgument("level " + std::to_string(level) + ": steps must lie in [1, " +
                              std::to_string(schedule.steps()) + "], got " + std::to_string(ls.steps));
    }
    if (ls.depth < 0 || ls.depth >= schedule.steps()) {
        throw InvalidArgument("level " + std::to_string(level) + ": depth K must lie in [0, T), got " +
                              std::to_string(ls.depth));
    }
    return truncate_grid(equispaced_grid(schedule, ls.steps), ls.depth);
}

void CascadeConfig::validate() const {
    if (levels < 1) throw InvalidArgument("levels must be >= 1, got " + std::to_string(levels));
    if (level_overrides.size() > static_cast<std::size_t>(levels)) {
        throw InvalidArgument("more per-level overrides than levels");
    }
    if (!(overlap >= 0.0 && overlap < 1.0)) throw InvalidArgument("overlap must lie in [0, 1)");
    if (!(lambda >= 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in [0, 1)");
    if (!(guidance.guidance_scale >= 0.0f)) throw InvalidArgument("guidance_scale must be >= 0");
    if (sigma && !(*sigma > 0.0)) throw InvalidArgument("blend sigma must be > 0");
    if (codec.factor == 0) throw InvalidArgument("codec factor must be positive");
    for (int level = 0; level < levels; ++level) (void)grid_for(level);
}

Grid up(const Grid& z0, UpSpace space, const Codec& codec) {
    if (space == UpSpace::latent) return interpolate_bicubic(z0, 2);
    return encode(codec, interpolate_bicubic(decode(codec, z0), 2));
}

LevelMetrics measure_level(const Grid& canvas, const TileLayout& layout) {
    LevelMetrics m;
    if (spectral_size_supported(canvas.shape())) m.bands = radial_band_energy(canvas);
    m.seam_ratio = seam_energy(canvas, layout);
    return m;
}

Grid refine_canvas(const Grid& canvas, Denoiser& den, const CascadeConfig& cfg, int level, std::size_t patch_h,
                   std::size_t patch_w, LevelReport* report) {
    const TileLayout layout = build_layout(canvas.height(), canvas.width(), patch_h, patch_w, cfg.overlap);
    const BlendMaskSet masks = build_masks(layout, cfg.blend, cfg.sigma);
    const StepGrid grid = cfg.grid_for(level);
    const std::size_t threads = den.capabilities().concurrent_safe ? cfg.threads : 1;
    const std::size_t n = layout.patch_count();
    NfeCounter nfe;

    GridF64 current = GridF64::converted_from(canvas);
    std::vector<GridF64> patches(n);
    parallel_for(n, threads, [&](std::size_t i) {
        patches[i] = invert_to_depth(extract(current, layout, i), den, cfg.guidance, grid, cfg.schedule, &nfe);
    });

    const auto& ts = grid.timesteps();
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const int t_prev = j + 1 < ts.size() ? ts[j + 1] : -1;
        parallel_for(n, threads, [&](std::size_t i) {
            const InjectionConfig inj{cfg.lambda, NoiseKey{cfg.seed, static_cast<std::uint32_t>(level),
                                                           static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}};
            patches[i] = reverse_step(patches[i], den, cfg.guidance, ts[j], t_prev, cfg.schedule, inj, &nfe);
        });
        current = blend(patches, layout, masks);
        if (j + 1 < ts.size()) {
            for (std::size_t i = 0; i < n; ++i) patches[i] = extract(current, layout, i);
        }
    }

    Grid out = Grid::converted_from(current);
    require_finite(out, "refined canvas");
    if (report) {
        report->level = level;
        report->canvas = out.shape();
        report->layout = layout;
        report->sigma = masks.sigma;
        report->grid = grid;
        report->nfe_reverse = nfe.reverse.load();
        report->nfe_inversion = nfe.inversion.load();
    }
    return out;
}

Grid cascade_step(const Grid& z0, Denoiser& den, const CascadeConfig& cfg, int level, std::size_t patch_h,
                  std::size_t patch_w, LevelReport* report) {
    if (level < 0 || level >= cfg.levels) {
        throw InvalidArgument("level " + std::to_string(level) + " outside [0, " + std::to_string(cfg.levels) + ")");
    }
    return refine_canvas(up(z0, cfg.up_space, cfg.codec), den, cfg, level, patch_h, patch_w, report);
}

std::pair<std::size_t, std::size_t> resolve_patch_size(const CascadeConfig& cfg, const Denoiser& den,
                                                       const Grid& base) {
    const auto& caps = den.capabilities();
    const std::size_t h = cfg.patch_height ? cfg.patch_height : caps.patch_height ? caps.patch_height : base.height();
    const std::size_t w = cfg.patch_width ? cfg.patch_width : caps.patch_width ? caps.patch_width : base.width();
    return {h, w};
}

CascadeResult run_cascade(const Grid& base, Denoiser& den, const CascadeConfig& cfg) {
    cfg.validate();
    const auto [patch_h, patch_w] = resolve_patch_size(cfg, den, base);
    CascadeResult result;
    Grid current = base;
    for (int level = 0; level < cfg.levels; ++level) {
        LevelReport report;
        const auto start = std::chrono::steady_clock::now();
        current = cascade_step(current, den, cfg, level, patch_h, patch_w, &report);
        report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (cfg.compute_metrics) report.metrics = measure_level(current, *report.layout);
        result.level_outputs.push_back(current);
        result.reports.push_back(std::move(report));
    }
    result.output = std::move(current);
    return result;
}

} // namespace tilediff

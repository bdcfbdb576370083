#include "tilediff/manifest.hpp"

#include <cstdio>

#include "tilediff/grid_io.hpp"

namespace tilediff {

using nlohmann::json;

namespace {

json shape_json(const Shape& s) { return json::array({s.channels, s.height, s.width}); }

} // namespace

std::string fnv1a64_hex(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json layout_json(const TileLayout& layout) {
    return {{"canvas", {layout.canvas_height(), layout.canvas_width()}},
            {"patch", {layout.patch_height(), layout.patch_width()}},
            {"overlap", layout.overlap()},
            {"row_offsets", layout.row_offsets()},
            {"col_offsets", layout.col_offsets()},
            {"patch_count", layout.patch_count()}};
}

json bands_json(const SpectrumBands& bands) {
    return {{"edges", bands.edges}, {"energies", bands.energies}, {"total", bands.total}, {"dc", bands.dc}};
}

json level_json(const LevelReport& r) {
    json j = {{"level", r.level},
              {"canvas", shape_json(r.canvas)},
              {"sigma", r.sigma},
              {"timesteps", r.grid.timesteps()},
              {"steps", r.grid.size()},
              {"nfe", r.nfe_reverse},
              {"inversion_nfe", r.nfe_inversion},
              {"wall_ms", r.wall_ms}};
    if (r.layout) j["layout"] = layout_json(*r.layout);
    if (r.metrics) {
        j["metrics"] = {{"seam_ratio", r.metrics->seam_ratio},
                        {"bands", r.metrics->bands ? bands_json(*r.metrics->bands) : json(nullptr)}};
    }
    return j;
}

json build_manifest(const RunConfig& cfg, const Denoiser& den, const Grid& base, const CascadeResult& result,
                    double total_wall_ms) {
    const auto& caps = den.capabilities();
    json levels = json::array();
    std::uint64_t nfe = 0;
    std::uint64_t inversion = 0;
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        json lj = level_json(result.reports[i]);
        lj["seeds"] = {{"seed", cfg.cascade.seed}, {"level", result.reports[i].level}};
        lj["rgf_fnv1a64"] = fnv1a64_hex(encode_rgf(result.level_outputs[i]));
        levels.push_back(std::move(lj));
        nfe += result.reports[i].nfe_reverse;
        inversion += result.reports[i].nfe_inversion;
    }
    return {{"format", "tilediff-manifest/1"},
            {"config", to_json(cfg)},
            {"denoiser",
             {{"model", caps.model_name},
              {"accepted_timesteps", caps.accepted_timesteps},
              {"min_timestep", caps.min_timestep},
              {"concurrent_safe", caps.concurrent_safe}}},
            {"input", {{"shape", shape_json(base.shape())}, {"rgf_fnv1a64", fnv1a64_hex(encode_rgf(base))}}},
            {"output", {{"shape", shape_json(result.output.shape())}}},
            {"levels", levels},
            {"totals", {{"nfe", nfe}, {"inversion_nfe", inversion}}},
            {"runtime", {{"threads", cfg.cascade.threads}, {"wall_ms", total_wall_ms}}}};
}

json strip_runtime(json manifest) {
    manifest.erase("runtime");
    if (auto it = manifest.find("levels"); it != manifest.end() && it->is_array()) {
        for (auto& level : *it) level.erase("wall_ms");
    }
    return manifest;
}

} // namespace tilediff

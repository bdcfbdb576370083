#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"
#include "tilediff/cascade.hpp"
#include "tilediff/run_config.hpp"

namespace tilediff {

// FNV-1a over raw bytes, rendered as 16 hex digits.
std::string fnv1a64_hex(std::span<const std::uint8_t> bytes);

nlohmann::json layout_json(const TileLayout& layout);
nlohmann::json bands_json(const SpectrumBands& bands);
nlohmann::json level_json(const LevelReport& report);

/// Run manifest: config echo, denoiser identity, per-level reports with
/// output checksums, NFE totals, and a "runtime" block (threads, wall time).
nlohmann::json build_manifest(const RunConfig& cfg, const Denoiser& den, const Grid& base,
                              const CascadeResult& result, double total_wall_ms);

// Drops everything that legitimately varies between identical runs: the
// "runtime" block and per-level wall_ms.
nlohmann::json strip_runtime(nlohmann::json manifest);

} // namespace tilediff

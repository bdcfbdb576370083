#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tilediff/run_config.hpp"

namespace tilediff {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitProtocol = 4;
inline constexpr int kExitNumeric = 5;

int exit_code(ErrorKind kind) noexcept;

// Each command writes its files under cfg.output_dir, reports progress on
// `log`, and returns an exit code. Library errors propagate as exceptions.
int cmd_generate(const RunConfig& cfg, std::ostream& log);
int cmd_ablate(const RunConfig& cfg, std::ostream& log);
int cmd_bench(const RunConfig& cfg, std::ostream& log);
int cmd_masks(const RunConfig& cfg, std::ostream& log);
int cmd_inspect(const std::vector<std::filesystem::path>& paths, std::ostream& out);

// Grid prepared for viewing: decoded to pixel space, reduced to 1 or 3
// channels, and stretched to [0, 1] when it leaves that range.
Grid view_grid(const Grid& latent, const Codec& codec);

} // namespace tilediff

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tilediff/cascade.hpp"
#include "tilediff/denoiser.hpp"

namespace tilediff {

struct InputSpec {
    std::string fixture = "smooth"; // used when path is empty
    Shape shape{4, 64, 64};
    std::string path;               // .rgf, .pgm or .ppm
};

struct BackendSpec {
    enum class Kind { zero, gmm, bridge };
    Kind kind = Kind::zero;
    std::size_t gmm_components = 8;
    double gmm_variance = 1.0;
    double gmm_mean_amplitude = 1.0;
    std::uint64_t gmm_seed = 7;
    std::string bridge_address;
    std::chrono::milliseconds bridge_timeout{5000};
};

std::string_view to_string(BackendSpec::Kind kind);

struct AblateSpec {
    std::vector<int> depths{249, 499, 749, 999};
    std::vector<double> lambdas{0.0, 0.7, 0.8, 0.9, 0.95};
    std::vector<BlendMode> blend_modes{BlendMode::uniform, BlendMode::gaussian_feather, BlendMode::hard};
    int baseline_steps = 50;
    int seeds = 1;
};

struct BenchSpec {
    int ratio = 4;
    std::vector<double> overlaps{0.5, 0.25};
    int baseline_steps = 50;
};

/// Parsed run document. Unknown keys and wrongly typed values are rejected
/// with ConfigError naming the offending JSON path.
struct RunConfig {
    InputSpec input;
    std::string output_dir = "out";
    CascadeConfig cascade;
    BackendSpec backend;
    AblateSpec ablate;
    BenchSpec bench;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Normalized echo of every setting that affects results. Thread count and
// output location are left out: they do not change outputs.
nlohmann::json to_json(const RunConfig& cfg);

// Base latent from the input settings; fixtures are seeded with cascade.seed.
Grid load_input(const RunConfig& cfg);

// `patch` is the latent patch shape used when the backend needs one (gmm).
std::unique_ptr<Denoiser> make_denoiser(const RunConfig& cfg, const Shape& patch);

} // namespace tilediff

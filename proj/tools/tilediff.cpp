#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tilediff/commands.hpp"

namespace {

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::string> output;
};

tilediff::RunConfig resolve_config(const GlobalFlags& flags) {
    tilediff::RunConfig cfg = flags.config.empty() ? tilediff::parse_run_config(nlohmann::json::object())
                                                   : tilediff::load_run_config(flags.config);
    if (flags.seed) cfg.cascade.seed = *flags.seed;
    if (flags.threads) {
        if (*flags.threads == 0) throw tilediff::ConfigError("--threads must be >= 1");
        cfg.cascade.threads = *flags.threads;
    }
    if (flags.output) cfg.output_dir = *flags.output;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tiled few-step diffusion refinement"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--config", flags.config, "Run config (JSON)");
    app.add_option("--seed", flags.seed, "Override the run seed");
    app.add_option("--threads", flags.threads, "Worker threads");
    app.add_option("--output", flags.output, "Output directory");

    auto* generate = app.add_subcommand("generate", "Run the cascade and write grids, views and a manifest");
    auto* ablate = app.add_subcommand("ablate", "Sweep inversion depth, blend modes and noise injection into a CSV");
    auto* bench = app.add_subcommand("bench", "Compare NFE and wall time of few-step vs full-inversion refinement");
    auto* masks = app.add_subcommand("masks", "Dump blend masks for the first level's layout");
    auto* inspect = app.add_subcommand("inspect", "Print statistics of grid files");
    std::vector<std::string> inspect_paths;
    inspect->add_option("paths", inspect_paths, "RGF, PGM or PPM files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (inspect->parsed()) {
            std::vector<std::filesystem::path> paths(inspect_paths.begin(), inspect_paths.end());
            return tilediff::cmd_inspect(paths, std::cout);
        }
        const auto cfg = resolve_config(flags);
        if (generate->parsed()) return tilediff::cmd_generate(cfg, std::cerr);
        if (ablate->parsed()) return tilediff::cmd_ablate(cfg, std::cerr);
        if (bench->parsed()) return tilediff::cmd_bench(cfg, std::cerr);
        if (masks->parsed()) return tilediff::cmd_masks(cfg, std::cerr);
    } catch (const tilediff::Error& e) {
        std::cerr << "error: " << tilediff::to_string(e.kind()) << ": " << e.what() << "\n";
        return tilediff::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tilediff::kExitNumeric;
    }
    return tilediff::kExitConfig;
}

#include "doctest.h"
#include "tilediff/manifest.hpp"
#include "tilediff/run_config.hpp"

using namespace tilediff;
using nlohmann::json;

namespace {

std::string config_error(const json& doc) {
    try {
        parse_run_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("expected ConfigError for " << doc.dump());
    return {};
}

} // namespace

TEST_CASE("defaults") {
    const auto cfg = parse_run_config(json::object());
    CHECK(cfg.cascade.levels == 1);
    CHECK(cfg.cascade.lambda == 0.95);
    CHECK(cfg.cascade.overlap == 0.5);
    CHECK(cfg.cascade.blend == BlendMode::gaussian_feather);
    CHECK(cfg.cascade.level_schedule == LevelSchedule{4, 249});
    CHECK(cfg.cascade.up_space == UpSpace::pixel);
    CHECK(cfg.backend.kind == BackendSpec::Kind::zero);
    CHECK(to_json(parse_run_config(to_json(cfg))) == to_json(cfg));
}

TEST_CASE("full document") {
    const auto doc = json::parse(R"({
        "input": {"fixture": "scene", "shape": [3, 32, 48]},
        "output_dir": "o", "seed": 12, "threads": 3,
        "schedule": {"kind": "linear", "steps": 500, "beta_start": 0.0001, "beta_end": 0.02},
        "levels": 2, "steps": 5, "depth": 399,
        "level_overrides": [null, {"steps": 5, "depth": 199}],
        "up_space": "latent", "codec": {"kind": "boxpool", "factor": 2},
        "overlap": 0.25, "blend": {"mode": "uniform", "sigma": 3},
        "lambda": 0.5, "prompt": "p", "guidance_scale": 7.5, "patch": [16, 24],
        "backend": {"kind": "gmm", "gmm": {"components": 3, "variance": 0.5, "mean_amplitude": 2, "seed": 4}},
        "metrics": {"enabled": false},
        "ablate": {"depths": [99], "lambdas": [0, 0.5], "blend_modes": ["hard"], "baseline_steps": 10, "seeds": 2},
        "bench": {"ratio": 2, "overlaps": [0.5], "baseline_steps": 20}
    })");
    const auto cfg = parse_run_config(doc);
    CHECK(cfg.input.shape == Shape{3, 32, 48});
    CHECK(cfg.cascade.schedule.steps() == 500);
    CHECK(cfg.cascade.grid_for(0).timesteps() == std::vector<int>{399, 299, 199, 99});
    CHECK(cfg.cascade.grid_for(1).timesteps() == std::vector<int>{199, 99});
    CHECK(cfg.cascade.codec == Codec::boxpool(2));
    CHECK(cfg.cascade.sigma == 3.0);
    CHECK(cfg.cascade.threads == 3);
    CHECK(cfg.backend.gmm_components == 3);
    CHECK(cfg.ablate.seeds == 2);
    CHECK(cfg.bench.baseline_steps == 20);

    // The echo parses back to the same settings and leaves out threads.
    const json echo = to_json(cfg);
    CHECK_FALSE(echo.contains("threads"));
    CHECK_FALSE(echo.contains("output_dir"));
    CHECK(to_json(parse_run_config(echo)) == echo);
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK(config_error({{"lamda", 0.5}}).find("/lamda") != std::string::npos);
    CHECK(config_error({{"blend", {{"modee", "hard"}}}}).find("/blend/modee") != std::string::npos);
    CHECK(config_error({{"backend", {{"gmm", {{"comps", 2}}}}}}).find("/backend/gmm/comps") != std::string::npos);
}

TEST_CASE("bad values are config errors") {
    config_error({{"lambda", 1.0}});
    config_error({{"lambda", "high"}});
    config_error({{"overlap", 1.5}});
    config_error({{"levels", 0}});
    config_error({{"depth", 250}});
    config_error({{"blend", {{"mode", "median"}}}});
    config_error({{"patch", {16}}});
    config_error({{"backend", {{"kind", "cloud"}}}});
    config_error({{"input", {{"fixture", "ramp"}, {"path", "x.rgf"}}}});
    config_error(json::array());
}

TEST_CASE("manifest stripping removes runtime only") {
    json m = {{"config", {{"seed", 1}}}, {"runtime", {{"threads", 8}}}, {"levels", {{{"wall_ms", 3.0}, {"nfe", 9}}}}};
    const json s = strip_runtime(m);
    CHECK_FALSE(s.contains("runtime"));
    CHECK_FALSE(s["levels"][0].contains("wall_ms"));
    CHECK(s["levels"][0]["nfe"] == 9);
    CHECK(fnv1a64_hex(std::vector<std::uint8_t>{}) == "cbf29ce484222325");
    CHECK(fnv1a64_hex(std::vector<std::uint8_t>{'a'}) == "af63dc4c8601ec8c");
}

#include <cmath>

#include "doctest.h"
#include "tilediff/cascade.hpp"
#include "tilediff/fixtures.hpp"
#include "tilediff/metrics.hpp"
#include "tilediff/resample.hpp"

using namespace tilediff;

namespace {

CascadeConfig zero_config(int levels) {
    CascadeConfig cfg;
    cfg.levels = levels;
    cfg.lambda = 0.0;
    return cfg;
}

double l2_gap(const Grid& a, const Grid& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (static_cast<double>(a[i]) - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("up doubles dimensions and keeps constants") {
    const Grid c(4, 8, 8, 0.25f);
    for (auto space : {UpSpace::pixel, UpSpace::latent}) {
        const Grid u = up(c, space, Codec::identity());
        CHECK(u.shape() == Shape{4, 16, 16});
        for (float v : u.values()) CHECK(v == doctest::Approx(0.25f));
    }
    const Grid u = up(c, UpSpace::pixel, Codec::boxpool(2));
    CHECK(u.shape() == Shape{4, 16, 16});
    for (float v : u.values()) CHECK(v == doctest::Approx(0.25f));
}

TEST_CASE("identity codec makes pixel and latent upsampling coincide") {
    const Grid z = fixtures::white_noise({4, 16, 16}, 1);
    CHECK(up(z, UpSpace::pixel, Codec::identity()) == up(z, UpSpace::latent, Codec::identity()));
}

TEST_CASE("boxpool codec separates pixel and latent upsampling on a checkerboard") {
    const Grid z = fixtures::checker({1, 16, 16}, 1);
    const double gap = l2_gap(up(z, UpSpace::pixel, Codec::boxpool(2)), up(z, UpSpace::latent, Codec::boxpool(2)));
    MESSAGE("pixel vs latent L2 gap: " << gap);
    CHECK(gap > 1.0);
}

TEST_CASE("dimension law and NFE accounting") {
    ZeroDenoiser den;
    auto cfg = zero_config(2);
    const Grid base = fixtures::smooth({4, 64, 64}, 0);
    const auto res = run_cascade(base, den, cfg);
    CHECK(res.output.shape() == Shape{4, 256, 256});
    REQUIRE(res.reports.size() == 2);
    CHECK(res.level_outputs.size() == 2);
    CHECK(res.reports[0].layout->patch_count() == 9);
    CHECK(res.reports[1].layout->patch_count() == 49);
    CHECK(res.reports[0].nfe_reverse == 9);
    CHECK(res.reports[1].nfe_reverse == 49);
    CHECK(res.reports[0].nfe_reverse + res.reports[1].nfe_reverse == 58);
    CHECK(res.reports[0].nfe_inversion == 9);

    // Per-level overrides: two reverse steps on level 1.
    cfg.level_overrides = {std::nullopt, LevelSchedule{4, 499}};
    const auto res2 = run_cascade(base, den, cfg);
    CHECK(res2.reports[1].nfe_reverse == 98);
    CHECK(res2.reports[1].nfe_inversion == 98);

    // Full-inversion baseline through the same code path.
    auto baseline = zero_config(1);
    baseline.level_schedule = {50, 999};
    const auto res3 = run_cascade(base, den, baseline);
    CHECK(res3.reports[0].nfe_reverse == 9 * 50);
}

TEST_CASE("identity collapse") {
    ZeroDenoiser den;
    for (auto mode : {BlendMode::uniform, BlendMode::gaussian_feather, BlendMode::hard}) {
        auto cfg = zero_config(2);
        cfg.blend = mode;
        const Grid base = fixtures::smooth({4, 32, 32}, 4);
        const auto res = run_cascade(base, den, cfg);
        const Grid expected = interpolate_bicubic(interpolate_bicubic(base, 2), 2);
        CHECK(max_abs_diff(res.output, expected) < 1e-5);
    }
}

TEST_CASE("gmm refinement keeps structure and adds high frequencies") {
    const Grid base = fixtures::smooth({4, 64, 64}, 2);
    GmmDenoiser den(fixtures::texture_prior({4, 64, 64}, 8, 1.0, 1.0, 7), Schedule::standard());
    CascadeConfig cfg;
    cfg.up_space = UpSpace::latent;
    cfg.seed = 2;
    cfg.threads = 2;
    const Grid coarse = up(base, cfg.up_space, cfg.codec);
    const auto res = run_cascade(base, den, cfg);
    CHECK(band_correlation(res.output, coarse, kLowBand) >= 0.95);
    CHECK(radial_band_energy(res.output).high() > radial_band_energy(coarse).high());
}

TEST_CASE("thread count does not change the output") {
    const Grid base = fixtures::smooth({4, 32, 32}, 3);
    GmmDenoiser den(fixtures::texture_prior({4, 32, 32}, 4, 1.0, 1.0, 1), Schedule::standard());
    CascadeConfig cfg;
    cfg.levels = 2;
    cfg.seed = 9;
    cfg.threads = 1;
    const auto a = run_cascade(base, den, cfg);
    cfg.threads = 5;
    const auto b = run_cascade(base, den, cfg);
    CHECK(a.output == b.output);
    cfg.seed = 10;
    CHECK(run_cascade(base, den, cfg).output != a.output);
}

TEST_CASE("patch size resolution") {
    ZeroDenoiser zero;
    CascadeConfig cfg;
    const Grid base(4, 24, 40);
    CHECK(resolve_patch_size(cfg, zero, base) == std::pair<std::size_t, std::size_t>{24, 40});
    cfg.patch_height = 16;
    cfg.patch_width = 8;
    CHECK(resolve_patch_size(cfg, zero, base) == std::pair<std::size_t, std::size_t>{16, 8});
    GmmDenoiser gmm(fixtures::texture_prior({4, 12, 12}, 2, 1.0, 1.0, 1), Schedule::standard());
    cfg.patch_height = cfg.patch_width = 0;
    CHECK(resolve_patch_size(cfg, gmm, base) == std::pair<std::size_t, std::size_t>{12, 12});
}

TEST_CASE("config validation") {
    CascadeConfig cfg;
    cfg.levels = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.lambda = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.level_schedule = {4, 250};
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.overlap = -0.1;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("level reports carry metrics") {
    ZeroDenoiser den;
    auto cfg = zero_config(1);
    const auto res = run_cascade(fixtures::smooth({4, 32, 32}, 1), den, cfg);
    REQUIRE(res.reports[0].metrics);
    CHECK(res.reports[0].metrics->bands);
    CHECK(res.reports[0].sigma == 4.0);
    CHECK(res.reports[0].grid.timesteps() == std::vector<int>{249});
}

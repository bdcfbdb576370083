#include <cmath>

#include "doctest.h"
#include "tilediff/blender.hpp"
#include "tilediff/fixtures.hpp"

using namespace tilediff;

namespace {

void check_partition(const TileLayout& layout, BlendMode mode) {
    const auto masks = build_masks(layout, mode);
    const Grid sum = weight_sum(layout, masks);
    for (float v : sum.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& m : masks.weights)
        for (float v : m.values()) CHECK(v >= 0.0f);
}

// Independent 1-D reference: Gaussian blur of the nearest-centre indicator,
// clamped at the canvas border, cropped to each window and normalized.
std::vector<std::vector<double>> reference_profiles(std::size_t canvas, std::size_t patch,
                                                    const std::vector<std::size_t>& off, double sigma) {
    const long radius = static_cast<long>(std::ceil(3 * sigma));
    const std::size_t n = off.size();
    std::vector<std::vector<double>> w(n, std::vector<double>(canvas, 0.0));
    auto owner_of = [&](long x) {
        x = std::clamp<long>(x, 0, static_cast<long>(canvas) - 1);
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = std::fabs((x + 0.5) - (off[i] + patch / 2.0));
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return best;
    };
    double ksum = 0.0;
    for (long k = -radius; k <= radius; ++k) ksum += std::exp(-0.5 * k * k / (sigma * sigma));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t x = off[i]; x < off[i] + patch; ++x) {
            double acc = 0.0;
            for (long k = -radius; k <= radius; ++k) {
                if (owner_of(static_cast<long>(x) + k) == i) acc += std::exp(-0.5 * k * k / (sigma * sigma));
            }
            w[i][x] = acc / ksum;
        }
    }
    for (std::size_t x = 0; x < canvas; ++x) {
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) t += w[i][x];
        for (std::size_t i = 0; i < n; ++i) w[i][x] /= t;
    }
    return w;
}

} // namespace

TEST_CASE("partition of unity for the reference layouts") {
    const TileLayout layouts[] = {
        build_layout(64, 64, 64, 64, 0.5),   // 1 x 1
        build_layout(128, 128, 64, 64, 0.5), // 3 x 3
        build_layout(256, 256, 64, 64, 0.25), // 5 x 5
        build_layout(256, 256, 64, 64, 0.5), // 7 x 7
        build_layout(100, 150, 40, 48, 0.3), // uneven
    };
    for (const auto& layout : layouts) {
        for (auto mode : {BlendMode::uniform, BlendMode::gaussian_feather, BlendMode::hard}) check_partition(layout, mode);
    }
}

TEST_CASE("default sigma is a quarter of the overlap") {
    CHECK(default_feather_sigma(build_layout(128, 128, 64, 64, 0.5)) == 8.0);
    CHECK(default_feather_sigma(build_layout(64, 64, 64, 64, 0.5)) == 1.0);
    CHECK(default_feather_sigma(build_layout(256, 256, 64, 64, 0.25)) == 4.0);
}

TEST_CASE("feather masks match the 1-D convolution reference") {
    for (double sigma : {2.0, 5.0, 8.0}) {
        const auto layout = build_layout(1, 160, 1, 64, 0.5);
        const auto masks = build_masks(layout, BlendMode::gaussian_feather, sigma);
        const auto ref = reference_profiles(160, 64, layout.col_offsets(), sigma);
        for (std::size_t p = 0; p < layout.patch_count(); ++p) {
            const auto off = layout.offset(p).col;
            for (std::size_t x = 0; x < 64; ++x) {
                CHECK(masks.weights[p].at(0, 0, x) == doctest::Approx(ref[p][off + x]).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("uniform masks average the covering patches") {
    const auto layout = build_layout(1, 128, 1, 64, 0.5);
    const auto masks = build_masks(layout, BlendMode::uniform);
    CHECK(masks.weights[0].at(0, 0, 10) == 1.0f);
    CHECK(masks.weights[0].at(0, 0, 40) == 0.5f);
    CHECK(masks.weights[1].at(0, 0, 10) == 0.5f);
}

TEST_CASE("hard masks are one-hot") {
    const auto layout = build_layout(128, 128, 64, 64, 0.5);
    const auto masks = build_masks(layout, BlendMode::hard);
    for (const auto& m : masks.weights)
        for (float v : m.values()) CHECK((v == 0.0f || v == 1.0f));
}

TEST_CASE("feather weights rise monotonically towards the patch centre") {
    const auto layout = build_layout(1, 256, 1, 64, 0.5);
    const auto masks = build_masks(layout, BlendMode::gaussian_feather);
    for (std::size_t p = 0; p < layout.patch_count(); ++p) {
        const auto& m = masks.weights[p];
        const auto off = layout.offset(p).col;
        // Interior patches rise on both sides; edge patches are flat at the canvas border.
        for (std::size_t x = 1; x < 32; ++x) {
            if (off > 0) CHECK(m.at(0, 0, x) >= m.at(0, 0, x - 1));
        }
        for (std::size_t x = 33; x < 64; ++x) {
            if (off + 64 < 256) CHECK(m.at(0, 0, x) <= m.at(0, 0, x - 1));
        }
    }
}

TEST_CASE("each patch dominates at its own centre") {
    const auto layout = build_layout(256, 256, 64, 64, 0.5);
    const auto masks = build_masks(layout, BlendMode::gaussian_feather);
    const Grid all = canvas_weights(layout, masks);
    for (std::size_t p = 0; p < layout.patch_count(); ++p) {
        const auto off = layout.offset(p);
        const std::size_t cy = off.row + 32;
        const std::size_t cx = off.col + 32;
        for (std::size_t q = 0; q < layout.patch_count(); ++q) {
            if (q != p) CHECK(all.at(p, cy, cx) > all.at(q, cy, cx));
        }
    }
}

TEST_CASE("blending identical patches reproduces them") {
    const auto layout = build_layout(128, 192, 64, 64, 0.5);
    const Grid canvas = fixtures::white_noise({3, 128, 192}, 5);
    std::vector<Grid> patches;
    for (std::size_t p = 0; p < layout.patch_count(); ++p) patches.push_back(extract(canvas, layout, p));
    for (auto mode : {BlendMode::uniform, BlendMode::gaussian_feather, BlendMode::hard}) {
        const Grid out = blend(patches, layout, build_masks(layout, mode));
        CHECK(max_abs_diff(out, canvas) < 1e-5);
    }
}

TEST_CASE("feathered transition slope is bounded by 1 / (2 sigma)") {
    for (double sigma : {4.0, 8.0}) {
        const auto layout = build_layout(1, 96, 1, 64, 0.5);
        const auto masks = build_masks(layout, BlendMode::gaussian_feather, sigma);
        const Grid w = canvas_weights(layout, masks);
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t x = 1; x < 96; ++x) {
                CHECK(std::fabs(w.at(p, 0, x) - w.at(p, 0, x - 1)) <= 1.0 / (2.0 * sigma));
            }
        }
    }
}

TEST_CASE("invalid sigma and patch lists") {
    const auto layout = build_layout(128, 128, 64, 64, 0.5);
    CHECK_THROWS_AS(build_masks(layout, BlendMode::gaussian_feather, 0.0), InvalidArgument);
    const auto masks = build_masks(layout, BlendMode::uniform);
    CHECK_THROWS_AS(blend(std::vector<Grid>(2, Grid(1, 64, 64)), layout, masks), InvalidArgument);
    CHECK_THROWS_AS(parse_blend_mode("median"), InvalidArgument);
}

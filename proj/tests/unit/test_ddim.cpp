#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tilediff/ddim.hpp"
#include "tilediff/fixtures.hpp"

using namespace tilediff;

namespace {

double dot(const Grid& a, const Grid& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

double angle(const Grid& a, const Grid& b) {
    return std::acos(std::clamp(dot(a, b) / std::sqrt(dot(a, a) * dot(b, b)), -1.0, 1.0));
}

// Denoiser that returns a fixed field regardless of input.
class FixedDenoiser final : public Denoiser {
public:
    explicit FixedDenoiser(Grid eps) : eps_(std::move(eps)) { caps_.model_name = "fixed"; }
    const Capabilities& capabilities() const override { return caps_; }
    Capabilities caps_;
    std::vector<int> seen;

protected:
    Grid predict_impl(const Grid&, int t, const GuidanceContext&) override {
        seen.push_back(t);
        return eps_;
    }

private:
    Grid eps_;
};

} // namespace

TEST_CASE("reverse step from 249 to the clean endpoint") {
    const auto s = Schedule::standard();
    const double ab = s.alpha_bar(249);
    const Grid z(Shape{1, 1, 1}, std::vector<float>{0.7f});
    const Grid e(Shape{1, 1, 1}, std::vector<float>{0.1f});
    const Grid out = ddim_reverse_step(z, e, 249, -1, s);
    CHECK(out[0] == doctest::Approx((0.7 - std::sqrt(1 - ab) * 0.1) / std::sqrt(ab)).epsilon(1e-6));
}

TEST_CASE("inversion step from the clean endpoint to 249") {
    const auto s = Schedule::standard();
    const double ab = s.alpha_bar(249);
    const Grid z(Shape{1, 1, 1}, std::vector<float>{1.0f});
    const Grid e(Shape{1, 1, 1}, std::vector<float>{0.5f});
    const Grid out = ddim_inversion_step(z, e, -1, 249, s);
    CHECK(out[0] == doctest::Approx(std::sqrt(ab) * 1.0 + std::sqrt(1 - ab) * 0.5).epsilon(1e-6));
}

TEST_CASE("inversion then reverse with frozen eps is the identity") {
    const auto s = Schedule::standard();
    for (int S : {4, 50}) {
        auto ts = equispaced_grid(s, S).timesteps();
        ts.push_back(-1);
        for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
            const int hi = ts[j];
            const int lo = ts[j + 1];
            const auto z = GridF64::converted_from(fixtures::white_noise({2, 8, 8}, j));
            const Grid e = fixtures::white_noise({2, 8, 8}, 100 + j);
            const auto back = ddim_reverse_step(ddim_inversion_step(z, e, lo, hi, s), e, hi, lo, s);
            double worst = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, std::abs(back[i] - z[i]));
            CHECK(worst < 1e-9);
        }
    }
}

TEST_CASE("invalid transitions are rejected") {
    const auto s = Schedule::standard();
    const Grid z(1, 1, 1);
    CHECK_THROWS_AS(ddim_reverse_step(z, z, 249, 249, s), InvalidArgument);
    CHECK_THROWS_AS(ddim_reverse_step(z, z, 249, -2, s), InvalidArgument);
    CHECK_THROWS_AS(ddim_inversion_step(z, z, -1, 1000, s), InvalidArgument);
    CHECK_THROWS_AS(ddim_reverse_step(z, Grid(1, 1, 2), 249, -1, s), InvalidArgument);
}

TEST_CASE("slerp of orthogonal unit vectors") {
    const Grid a(Shape{1, 1, 2}, std::vector<float>{1, 0});
    const Grid b(Shape{1, 1, 2}, std::vector<float>{0, 1});
    const Grid mid = slerp(a, b, 0.5);
    CHECK(mid[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(mid[1] == doctest::Approx(std::sqrt(0.5)));
    const Grid q = slerp(a, b, 0.95);
    CHECK(q[0] == doctest::Approx(std::cos(0.95 * std::numbers::pi / 2)));
    CHECK(q[1] == doctest::Approx(std::sin(0.95 * std::numbers::pi / 2)));
}

TEST_CASE("slerp of equal-norm vectors splits the angle and keeps the norm") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Grid a = fixtures::white_noise({4, 16, 16}, seed);
        Grid b = fixtures::white_noise({4, 16, 16}, seed + 50);
        // The angle split is exact only for equal norms.
        const double scale = std::sqrt(dot(a, a) / dot(b, b));
        for (float& v : b.values()) v = static_cast<float>(v * scale);
        const double omega = angle(a, b);
        CHECK(max_abs_diff(slerp(a, b, 0.0), a) < 1e-6);
        CHECK(max_abs_diff(slerp(a, b, 1.0), b) < 1e-5);
        for (double lambda : {0.3, 0.7, 0.95}) {
            const Grid r = slerp(a, b, lambda);
            CHECK(angle(a, r) == doctest::Approx(lambda * omega).epsilon(1e-4));
            CHECK(angle(r, b) == doctest::Approx((1 - lambda) * omega).epsilon(1e-3));
            CHECK(std::sqrt(dot(r, r)) == doctest::Approx(std::sqrt(dot(a, a))).epsilon(1e-5));
        }
    }
}

TEST_CASE("slerp falls back to lerp for parallel or zero vectors") {
    const Grid a(Shape{1, 1, 2}, std::vector<float>{1, 2});
    const Grid a2(Shape{1, 1, 2}, std::vector<float>{2, 4});
    const Grid zero(1, 1, 2);
    const Grid p = slerp(a, a2, 0.25);
    CHECK(p[0] == doctest::Approx(1.25));
    CHECK(p[1] == doctest::Approx(2.5));
    const Grid z = slerp(zero, a, 0.5);
    CHECK(z[0] == doctest::Approx(0.5));
    CHECK(z[1] == doctest::Approx(1.0));
    for (float v : z.values()) CHECK(std::isfinite(v));
}

TEST_CASE("noise injection") {
    const Grid e = fixtures::white_noise({1, 8, 8}, 3);
    CHECK(inject_noise(e, {0.0, {1, 0, 0, 0}}) == e);
    const Grid a = inject_noise(e, {0.95, {1, 0, 0, 0}});
    CHECK(a == inject_noise(e, {0.95, {1, 0, 0, 0}}));
    CHECK(a != inject_noise(e, {0.95, {1, 0, 0, 1}}));
    CHECK_THROWS_AS(inject_noise(e, {1.0, {}}), InvalidArgument);
    CHECK_THROWS_AS(inject_noise(e, {-0.1, {}}), InvalidArgument);
}

TEST_CASE("zero predictor refinement is the identity") {
    const auto s = Schedule::standard();
    ZeroDenoiser den;
    const Grid z0 = fixtures::smooth({4, 16, 16}, 2);
    for (int K : {249, 499, 749, 999}) {
        const auto grid = truncate_grid(equispaced_grid(s, 4), K);
        NfeCounter nfe;
        const Grid out = refine_latent(z0, den, {}, grid, s, {0.0, {}}, &nfe);
        CHECK(max_abs_diff(out, z0) < 1e-5);
        CHECK(nfe.reverse == static_cast<std::uint64_t>(grid.size()));
        CHECK(nfe.inversion == static_cast<std::uint64_t>(grid.size()));
    }
}

TEST_CASE("inversion queries the source timestep mapped onto accepted values") {
    const auto s = Schedule::standard();
    FixedDenoiser den(Grid(1, 2, 2, 0.1f));
    den.caps_.accepted_timesteps = {999, 749, 499, 249};
    den.caps_.min_timestep = 249;
    const auto grid = equispaced_grid(s, 4);
    partial_invert(Grid(1, 2, 2, 1.0f), den, {}, grid, s);
    // Sources are -1, 249, 499, 749; the clean endpoint becomes the smallest accepted value.
    CHECK(den.seen == std::vector<int>{249, 249, 499, 749});
}

TEST_CASE("inversion with a constant predictor matches chained closed forms") {
    const auto s = Schedule::standard();
    FixedDenoiser den(Grid(1, 1, 1, 0.3f));
    const auto grid = truncate_grid(equispaced_grid(s, 4), 499);
    const Grid out = partial_invert(Grid(1, 1, 1, 0.8f), den, {}, grid, s);
    double z = 0.8;
    int from = -1;
    for (int to : {249, 499}) {
        const double x0 = (z - std::sqrt(1 - s.alpha_bar(from)) * 0.3) / std::sqrt(s.alpha_bar(from));
        z = std::sqrt(s.alpha_bar(to)) * x0 + std::sqrt(1 - s.alpha_bar(to)) * 0.3;
        from = to;
    }
    CHECK(out[0] == doctest::Approx(z).epsilon(1e-6));
}

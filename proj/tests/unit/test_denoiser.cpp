#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tilediff/denoiser.hpp"
#include "tilediff/fixtures.hpp"

using namespace tilediff;

namespace {

Grid scalar(double v) { return Grid(Shape{1, 1, 1}, std::vector<float>{static_cast<float>(v)}); }

// E[z0 | z] for a scalar two-component prior by brute-force quadrature.
double quadrature_posterior(double z, double ab, double m1, double m2, double w1, double w2, double v) {
    double num = 0.0;
    double den = 0.0;
    const double step = 1e-3;
    for (double x = -12.0; x <= 12.0; x += step) {
        const double prior = w1 * std::exp(-(x - m1) * (x - m1) / (2 * v)) + w2 * std::exp(-(x - m2) * (x - m2) / (2 * v));
        const double r = z - std::sqrt(ab) * x;
        const double like = std::exp(-r * r / (2 * (1 - ab)));
        num += x * prior * like;
        den += prior * like;
    }
    return num / den;
}

} // namespace

TEST_CASE("query timestep mapping") {
    Capabilities any;
    CHECK(query_timestep(any, -1) == 0);
    CHECK(query_timestep(any, 300) == 300);
    Capabilities four;
    four.accepted_timesteps = {999, 749, 499, 249};
    CHECK(query_timestep(four, -1) == 249);
    CHECK(query_timestep(four, 249) == 249);
    CHECK(query_timestep(four, 250) == 499);
    CHECK_THROWS_AS(query_timestep(four, 1000), InvalidArgument);
    Capabilities floor;
    floor.min_timestep = 100;
    CHECK(query_timestep(floor, 20) == 100);
}

TEST_CASE("predict rejects timesteps instead of clamping") {
    GmmDenoiser den(GmmPrior({{scalar(0), 1, 1}}), Schedule::standard());
    CHECK_THROWS_AS(den.predict(scalar(0), -1, {}), InvalidArgument);
    CHECK_THROWS_AS(den.predict(scalar(0), 1000, {}), InvalidArgument);
    CHECK_THROWS_AS(den.predict(Grid(1, 1, 2), 10, {}), InvalidArgument);
}

TEST_CASE("single Gaussian posterior mean is the conjugate formula") {
    const double mu = 0.625; // exact in float
    const double v = 0.5;
    GmmPrior prior({{scalar(mu), 1.0, v}});
    for (double ab : {0.99, 0.5, 0.05}) {
        for (double z : {-1.0, 0.0, 2.0}) {
            const double gain = std::sqrt(ab) * v / (ab * v + 1 - ab);
            const double expected = mu + gain * (z - std::sqrt(ab) * mu);
            CHECK(prior.posterior_mean(scalar(z), ab)[0] == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("two-component posterior mean matches quadrature") {
    GmmPrior prior({{scalar(-1.5), 0.3, 0.2}, {scalar(2.0), 0.7, 0.2}});
    for (double ab : {0.9, 0.4}) {
        for (double z : {-2.0, -0.3, 0.2, 1.7}) {
            const double q = quadrature_posterior(z, ab, -1.5, 2.0, 0.3, 0.7, 0.2);
            CHECK(prior.posterior_mean(scalar(z), ab)[0] == doctest::Approx(q).epsilon(1e-5));
        }
    }
}

TEST_CASE("responsibilities sum to one and favour the nearer component") {
    const Shape s{1, 4, 4};
    GmmPrior prior({{Grid(s, -1.0f), 0.5, 0.1}, {Grid(s, 1.0f), 0.5, 0.1}});
    const auto r = prior.responsibilities(Grid(s, 0.8f), 0.95);
    REQUIRE(r.size() == 2);
    CHECK(r[0] + r[1] == doctest::Approx(1.0));
    CHECK(r[1] > 0.99);
}

TEST_CASE("gmm eps is consistent with the posterior mean") {
    const auto sched = Schedule::standard();
    const auto prior = fixtures::texture_prior({1, 4, 4}, 3, 0.3, 1.0, 5);
    GmmDenoiser den(prior, sched);
    const Grid z = fixtures::white_noise({1, 4, 4}, 11);
    for (int t : {0, 249, 999}) {
        const double ab = sched.alpha_bar(t);
        const Grid eps = den.predict(z, t, {});
        const auto x0 = prior.posterior_mean(z, ab);
        for (std::size_t i = 0; i < z.size(); ++i) {
            CHECK(eps[i] == doctest::Approx((z[i] - std::sqrt(ab) * x0[i]) / std::sqrt(1 - ab)).epsilon(1e-4));
        }
    }
}

TEST_CASE("counting decorator") {
    ZeroDenoiser zero;
    CountingDenoiser count(zero);
    count.predict(Grid(1, 2, 2), 10, {});
    count.predict(Grid(1, 2, 2), 20, {});
    CHECK(count.calls() == 2);
    count.reset();
    CHECK(count.calls() == 0);
    CHECK(count.capabilities().model_name == "zero");
}

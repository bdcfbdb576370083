#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tilediff/grid.hpp"
#include "tilediff/schedule.hpp"

namespace tilediff {

struct GuidanceContext {
    std::string prompt;
    float guidance_scale = 0.0f;
};

struct Capabilities {
    std::string model_name;
    std::vector<int> accepted_timesteps; // empty: every timestep accepted
    int min_timestep = 0;
    std::size_t channels = 0;            // 0: any
    std::size_t patch_height = 0;        // 0: any
    std::size_t patch_width = 0;         // 0: any
    bool concurrent_safe = false;

    bool accepts(int t) const noexcept;
};

/// Noise predictor eps(z, t, prompt, guidance).
///
/// predict() validates the timestep against capabilities() and throws
/// InvalidArgument for a rejected one; it never clamps. Callers that need a
/// timestep the backend does not accept must choose one explicitly (see
/// query_timestep()).
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual const Capabilities& capabilities() const = 0;

    Grid predict(const Grid& z, int t, const GuidanceContext& ctx);

protected:
    virtual Grid predict_impl(const Grid& z, int t, const GuidanceContext& ctx) = 0;
};

// Maps a desired query timestep (possibly -1 for the clean endpoint) onto the
// nearest timestep at or above it that the backend accepts.
int query_timestep(const Capabilities& caps, int desired);

class ZeroDenoiser final : public Denoiser {
public:
    ZeroDenoiser();
    const Capabilities& capabilities() const override { return caps_; }

protected:
    Grid predict_impl(const Grid& z, int t, const GuidanceContext& ctx) override;

private:
    Capabilities caps_;
};

/// Isotropic Gaussian mixture over clean latents of one fixed shape.
struct GmmComponent {
    Grid mean;
    double weight = 1.0;
    double variance = 1.0;
};

class GmmPrior {
public:
    explicit GmmPrior(std::vector<GmmComponent> components);

    const std::vector<GmmComponent>& components() const noexcept { return components_; }
    const Shape& shape() const noexcept { return components_.front().mean.shape(); }

    // E[z0 | z_t = z] under q(z_t | z0) = N(sqrt(ab) z0, (1 - ab) I).
    GridF64 posterior_mean(const Grid& z, double alpha_bar) const;

    // Component responsibilities p(k | z_t = z).
    std::vector<double> responsibilities(const Grid& z, double alpha_bar) const;

private:
    std::vector<GmmComponent> components_;
};

/// Exact minimum-MSE noise predictor for a GMM prior:
/// eps = (z - sqrt(ab) E[z0|z]) / sqrt(1 - ab). Prompt and guidance are ignored.
class GmmDenoiser final : public Denoiser {
public:
    GmmDenoiser(GmmPrior prior, Schedule schedule);

    const Capabilities& capabilities() const override { return caps_; }
    const GmmPrior& prior() const noexcept { return prior_; }

protected:
    Grid predict_impl(const Grid& z, int t, const GuidanceContext& ctx) override;

private:
    GmmPrior prior_;
    Schedule schedule_;
    Capabilities caps_;
};

// Decorator that counts predict() calls, including failed ones.
class CountingDenoiser final : public Denoiser {
public:
    explicit CountingDenoiser(Denoiser& inner) : inner_(inner) {}

    const Capabilities& capabilities() const override { return inner_.capabilities(); }
    std::uint64_t calls() const noexcept { return calls_.load(); }
    void reset() noexcept { calls_ = 0; }

protected:
    Grid predict_impl(const Grid& z, int t, const GuidanceContext& ctx) override;

private:
    Denoiser& inner_;
    std::atomic<std::uint64_t> calls_{0};
};

} // namespace tilediff

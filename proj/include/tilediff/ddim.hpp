#pragma once

#include <atomic>
#include <cstdint>

#include "tilediff/denoiser.hpp"
#include "tilediff/grid.hpp"
#include "tilediff/random.hpp"
#include "tilediff/schedule.hpp"

namespace tilediff {

// Denoiser evaluations split by phase. "reverse" is the step count reported
// per refinement; "inversion" covers the forward DDIM jumps.
struct NfeCounter {
    std::atomic<std::uint64_t> inversion{0};
    std::atomic<std::uint64_t> reverse{0};

    std::uint64_t total() const noexcept { return inversion.load() + reverse.load(); }
};

struct InjectionConfig {
    double lambda = 0.0; // weight of the random endpoint, in [0, 1)
    NoiseKey key;
};

/// Deterministic (eta = 0) DDIM update from t down to t_prev:
///   z' = sqrt(ab_prev) * (z - sqrt(1 - ab_t) eps) / sqrt(ab_t) + sqrt(1 - ab_prev) eps
/// with ab_{-1} = 1. Requires t > t_prev >= -1 and t in [0, T).
template <typename T>
BasicGrid<T> ddim_reverse_step(const BasicGrid<T>& z_t, const Grid& eps, int t, int t_prev, const Schedule& sched);

/// Inverse map of ddim_reverse_step for the same frozen eps, from t_prev up to t.
template <typename T>
BasicGrid<T> ddim_inversion_step(const BasicGrid<T>& z_prev, const Grid& eps, int t_prev, int t,
                                 const Schedule& sched);

// Spherical interpolation between the flattened grids; lambda weights `b`.
// Falls back to linear interpolation when the vectors are nearly parallel or
// either one is (numerically) zero.
Grid slerp(const Grid& a, const Grid& b, double lambda);

// slerp(eps_hat, N(0, I) drawn from cfg.key, cfg.lambda). lambda == 0 is the identity.
Grid inject_noise(const Grid& eps_hat, const InjectionConfig& cfg);

// Chains inversion steps -1 -> ... -> K along the ascending truncated grid.
// eps is evaluated on the source latent at the source timestep, mapped through
// query_timestep() so the clean endpoint becomes the backend's smallest
// accepted timestep.
GridF64 invert_to_depth(const GridF64& z0, Denoiser& den, const GuidanceContext& ctx, const StepGrid& grid,
                        const Schedule& sched, NfeCounter* nfe = nullptr);

// One reverse step with noise injection applied between prediction and update.
GridF64 reverse_step(const GridF64& z_t, Denoiser& den, const GuidanceContext& ctx, int t, int t_prev,
                     const Schedule& sched, const InjectionConfig& injection, NfeCounter* nfe = nullptr);

Grid partial_invert(const Grid& z0, Denoiser& den, const GuidanceContext& ctx, const StepGrid& grid,
                    const Schedule& sched, NfeCounter* nfe = nullptr);

// Partial inversion to the grid's highest timestep followed by the reverse walk
// to t = -1. Reverse step j draws its noise from injection.key with step = j.
Grid refine_latent(const Grid& z0_coarse, Denoiser& den, const GuidanceContext& ctx, const StepGrid& grid,
                   const Schedule& sched, const InjectionConfig& injection, NfeCounter* nfe = nullptr);

} // namespace tilediff

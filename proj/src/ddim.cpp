#include "tilediff/ddim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tilediff {

namespace {

constexpr double kParallelAngle = 1e-4;
constexpr double kTinyNorm = 1e-12;

void check_transition(int high, int low, const Schedule& sched, const char* what) {
    if (!(high > low && low >= -1 && high < sched.steps())) {
        throw InvalidArgument(std::string(what) + ": invalid timestep pair (" + std::to_string(high) + ", " +
                              std::to_string(low) + ")");
    }
}

// z_to = sqrt(ab_to) * (z - sqrt(1 - ab_from) eps) / sqrt(ab_from) + sqrt(1 - ab_to) eps
template <typename T>
BasicGrid<T> ddim_map(const BasicGrid<T>& z, const Grid& eps, double ab_from, double ab_to) {
    require_same_shape(z.shape(), eps.shape(), "ddim step");
    const double sig_from = std::sqrt(1.0 - ab_from);
    const double sig_to = std::sqrt(1.0 - ab_to);
    const double inv_root_from = 1.0 / std::sqrt(ab_from);
    const double root_to = std::sqrt(ab_to);
    BasicGrid<T> out(z.shape());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double e = eps[i];
        const double x0 = (static_cast<double>(z[i]) - sig_from * e) * inv_root_from;
        out[i] = static_cast<T>(root_to * x0 + sig_to * e);
    }
    return out;
}

} // namespace

template <typename T>
BasicGrid<T> ddim_reverse_step(const BasicGrid<T>& z_t, const Grid& eps, int t, int t_prev, const Schedule& sched) {
    check_transition(t, t_prev, sched, "ddim_reverse_step");
    return ddim_map(z_t, eps, sched.alpha_bar(t), sched.alpha_bar(t_prev));
}

template <typename T>
BasicGrid<T> ddim_inversion_step(const BasicGrid<T>& z_prev, const Grid& eps, int t_prev, int t,
                                 const Schedule& sched) {
    check_transition(t, t_prev, sched, "ddim_inversion_step");
    return ddim_map(z_prev, eps, sched.alpha_bar(t_prev), sched.alpha_bar(t));
}

template Grid ddim_reverse_step(const Grid&, const Grid&, int, int, const Schedule&);
template GridF64 ddim_reverse_step(const GridF64&, const Grid&, int, int, const Schedule&);
template Grid ddim_inversion_step(const Grid&, const Grid&, int, int, const Schedule&);
template GridF64 ddim_inversion_step(const GridF64&, const Grid&, int, int, const Schedule&);

Grid slerp(const Grid& a, const Grid& b, double lambda) {
    require_same_shape(a.shape(), b.shape(), "slerp");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);

    double wa = 1.0 - lambda;
    double wb = lambda;
    if (na >= kTinyNorm && nb >= kTinyNorm) {
        const double omega = std::acos(std::clamp(dot / (na * nb), -1.0, 1.0));
        if (omega >= kParallelAngle) {
            const double s = std::sin(omega);
            wa = std::sin((1.0 - lambda) * omega) / s;
            wb = std::sin(lambda * omega) / s;
        }
    }
    Grid out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = static_cast<float>(wa * a[i] + wb * b[i]);
    }
    return out;
}

Grid inject_noise(const Grid& eps_hat, const InjectionConfig& cfg) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda < 1.0)) {
        throw InvalidArgument("noise injection lambda must lie in [0, 1), got " + std::to_string(cfg.lambda));
    }
    if (cfg.lambda == 0.0) return eps_hat;
    Grid noise(eps_hat.shape());
    fill_standard_normal(cfg.key, noise.values());
    return slerp(eps_hat, noise, cfg.lambda);
}

GridF64 invert_to_depth(const GridF64& z0, Denoiser& den, const GuidanceContext& ctx, const StepGrid& grid,
                        const Schedule& sched, NfeCounter* nfe) {
    GridF64 z = z0;
    int source = -1;
    const auto& ts = grid.timesteps();
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        const int target = *it;
        const int query = query_timestep(den.capabilities(), source);
        const Grid eps = den.predict(Grid::converted_from(z), query, ctx);
        if (nfe) ++nfe->inversion;
        z = ddim_inversion_step(z, eps, source, target, sched);
        source = target;
    }
    return z;
}

GridF64 reverse_step(const GridF64& z_t, Denoiser& den, const GuidanceContext& ctx, int t, int t_prev,
                     const Schedule& sched, const InjectionConfig& injection, NfeCounter* nfe) {
    const Grid eps = den.predict(Grid::converted_from(z_t), t, ctx);
    if (nfe) ++nfe->reverse;
    return ddim_reverse_step(z_t, inject_noise(eps, injection), t, t_prev, sched);
}

Grid partial_invert(const Grid& z0, Denoiser& den, const GuidanceContext& ctx, const StepGrid& grid,
                    const Schedule& sched, NfeCounter* nfe) {
    return Grid::converted_from(invert_to_depth(GridF64::converted_from(z0), den, ctx, grid, sched, nfe));
}

Grid refine_latent(const Grid& z0_coarse, Denoiser& den, const GuidanceContext& ctx, const StepGrid& grid,
                   const Schedule& sched, const InjectionConfig& injection, NfeCounter* nfe) {
    GridF64 z = invert_to_depth(GridF64::converted_from(z0_coarse), den, ctx, grid, sched, nfe);
    const auto& ts = grid.timesteps();
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const int t_prev = j + 1 < ts.size() ? ts[j + 1] : -1;
        InjectionConfig step_cfg = injection;
        step_cfg.key.step = static_cast<std::uint32_t>(j);
        z = reverse_step(z, den, ctx, ts[j], t_prev, sched, step_cfg, nfe);
    }
    Grid out = Grid::converted_from(z);
    require_finite(out, "refine_latent");
    return out;
}

} // namespace tilediff

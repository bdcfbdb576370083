#include "tilediff/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tilediff {

bool Capabilities::accepts(int t) const noexcept {
    if (t < min_timestep || t < 0) return false;
    return accepted_timesteps.empty() ||
           std::find(accepted_timesteps.begin(), accepted_timesteps.end(), t) != accepted_timesteps.end();
}

Grid Denoiser::predict(const Grid& z, int t, const GuidanceContext& ctx) {
    const auto& caps = capabilities();
    if (!caps.accepts(t)) {
        throw InvalidArgument("denoiser '" + caps.model_name + "' rejects timestep " + std::to_string(t));
    }
    if ((caps.channels != 0 && caps.channels != z.channels()) ||
        (caps.patch_height != 0 && caps.patch_height != z.height()) ||
        (caps.patch_width != 0 && caps.patch_width != z.width())) {
        throw InvalidArgument("denoiser '" + caps.model_name + "' cannot take input of shape " +
                              to_string(z.shape()));
    }
    Grid eps = predict_impl(z, t, ctx);
    require_same_shape(eps.shape(), z.shape(), "denoiser output");
    require_finite(eps, "denoiser output");
    return eps;
}

int query_timestep(const Capabilities& caps, int desired) {
    const int floor = std::max({desired, 0, caps.min_timestep});
    if (caps.accepted_timesteps.empty()) return floor;
    int best = std::numeric_limits<int>::max();
    for (int t : caps.accepted_timesteps) {
        if (t >= floor) best = std::min(best, t);
    }
    if (best == std::numeric_limits<int>::max()) {
        throw InvalidArgument("denoiser '" + caps.model_name + "' accepts no timestep >= " + std::to_string(floor));
    }
    return best;
}

ZeroDenoiser::ZeroDenoiser() {
    caps_.model_name = "zero";
    caps_.concurrent_safe = true;
}

Grid ZeroDenoiser::predict_impl(const Grid& z, int, const GuidanceContext&) { return Grid(z.shape()); }

GmmPrior::GmmPrior(std::vector<GmmComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("GMM prior needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0) || !(c.variance > 0.0)) {
            throw InvalidArgument("GMM component weights and variances must be positive");
        }
        require_same_shape(c.mean.shape(), components_.front().mean.shape(), "GMM component mean");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidArgument("GMM weights must sum to 1, got " + std::to_string(total));
    }
}

std::vector<double> GmmPrior::responsibilities(const Grid& z, double alpha_bar) const {
    require_same_shape(z.shape(), shape(), "GMM input");
    const double root_ab = std::sqrt(alpha_bar);
    const double dims = static_cast<double>(z.size());
    std::vector<double> log_r(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto& comp = components_[k];
        const double var = alpha_bar * comp.variance + (1.0 - alpha_bar);
        double sq = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double d = static_cast<double>(z[i]) - root_ab * comp.mean[i];
            sq += d * d;
        }
        log_r[k] = std::log(comp.weight) - 0.5 * dims * std::log(2.0 * std::numbers::pi * var) - 0.5 * sq / var;
    }
    const double peak = *std::max_element(log_r.begin(), log_r.end());
    double norm = 0.0;
    for (double& v : log_r) {
        v = std::exp(v - peak);
        norm += v;
    }
    for (double& v : log_r) v /= norm;
    return log_r;
}

GridF64 GmmPrior::posterior_mean(const Grid& z, double alpha_bar) const {
    const auto resp = responsibilities(z, alpha_bar);
    const double root_ab = std::sqrt(alpha_bar);
    GridF64 mean(z.shape());
    for (std::size_t k = 0; k < components_.size(); ++k) {
        if (resp[k] == 0.0) continue;
        const auto& comp = components_[k];
        const double var = alpha_bar * comp.variance + (1.0 - alpha_bar);
        const double gain = root_ab * comp.variance / var;
        const double prior_pull = (1.0 - alpha_bar) / var;
        for (std::size_t i = 0; i < z.size(); ++i) {
            mean[i] += resp[k] * (gain * z[i] + prior_pull * comp.mean[i]);
        }
    }
    return mean;
}

GmmDenoiser::GmmDenoiser(GmmPrior prior, Schedule schedule)
    : prior_(std::move(prior)), schedule_(std::move(schedule)) {
    caps_.model_name = "gmm";
    caps_.channels = prior_.shape().channels;
    caps_.patch_height = prior_.shape().height;
    caps_.patch_width = prior_.shape().width;
    caps_.concurrent_safe = true;
}

Grid GmmDenoiser::predict_impl(const Grid& z, int t, const GuidanceContext&) {
    const double ab = schedule_.alpha_bar(t);
    const GridF64 x0 = prior_.posterior_mean(z, ab);
    const double root_ab = std::sqrt(ab);
    const double inv_sigma = 1.0 / std::sqrt(1.0 - ab);
    Grid eps(z.shape());
    for (std::size_t i = 0; i < z.size(); ++i) {
        eps[i] = static_cast<float>((static_cast<double>(z[i]) - root_ab * x0[i]) * inv_sigma);
    }
    return eps;
}

Grid CountingDenoiser::predict_impl(const Grid& z, int t, const GuidanceContext& ctx) {
    ++calls_;
    return inner_.predict(z, t, ctx);
}

} // namespace tilediff

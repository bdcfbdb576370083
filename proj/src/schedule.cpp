#include "tilediff/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tilediff/error.hpp"

namespace tilediff {

std::string_view to_string(BetaSchedule kind) {
    return kind == BetaSchedule::linear ? "linear" : "scaled_linear";
}

BetaSchedule parse_beta_schedule(std::string_view name) {
    if (name == "linear") return BetaSchedule::linear;
    if (name == "scaled_linear") return BetaSchedule::scaled_linear;
    throw InvalidArgument("unknown schedule kind '" + std::string(name) + "'");
}

Schedule Schedule::build(BetaSchedule kind, int steps, double beta_start, double beta_end) {
    if (steps < 1) throw InvalidArgument("schedule needs T >= 1, got " + std::to_string(steps));
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw InvalidArgument("schedule requires 0 < beta_start <= beta_end < 1");
    }
    Schedule s;
    s.kind_ = kind;
    s.beta_start_ = beta_start;
    s.beta_end_ = beta_end;
    s.beta_.resize(static_cast<std::size_t>(steps));
    s.alpha_bar_.resize(static_cast<std::size_t>(steps));

    const double lo = kind == BetaSchedule::linear ? beta_start : std::sqrt(beta_start);
    const double hi = kind == BetaSchedule::linear ? beta_end : std::sqrt(beta_end);
    double product = 1.0;
    for (int t = 0; t < steps; ++t) {
        const double frac = steps == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(steps - 1);
        const double v = lo + (hi - lo) * frac;
        const double beta = kind == BetaSchedule::linear ? v : v * v;
        s.beta_[t] = beta;
        product *= 1.0 - beta;
        s.alpha_bar_[t] = product;
    }
    return s;
}

Schedule Schedule::standard() {
    return build(BetaSchedule::scaled_linear, kDefaultSteps, kDefaultBetaStart, kDefaultBetaEnd);
}

double Schedule::alpha_bar(int t) const {
    if (t == -1) return 1.0;
    if (t < -1 || t >= steps()) {
        throw InvalidArgument("timestep " + std::to_string(t) + " outside [-1, " + std::to_string(steps()) + ")");
    }
    return alpha_bar_[static_cast<std::size_t>(t)];
}

StepGrid::StepGrid(std::vector<int> timesteps, int total_steps)
    : timesteps_(std::move(timesteps)), total_steps_(total_steps) {
    if (timesteps_.empty()) throw InvalidArgument("step grid must not be empty");
    for (std::size_t i = 0; i < timesteps_.size(); ++i) {
        const int t = timesteps_[i];
        if (t < 0 || t >= total_steps_) {
            throw InvalidArgument("grid timestep " + std::to_string(t) + " outside [0, " +
                                  std::to_string(total_steps_) + ")");
        }
        if (i > 0 && t >= timesteps_[i - 1]) throw InvalidArgument("grid timesteps must be strictly descending");
    }
}

bool StepGrid::contains(int t) const noexcept {
    return std::find(timesteps_.begin(), timesteps_.end(), t) != timesteps_.end();
}

StepGrid equispaced_grid(const Schedule& schedule, int steps) {
    const int total = schedule.steps();
    if (steps < 1 || steps > total) {
        throw InvalidArgument("step count " + std::to_string(steps) + " outside [1, " + std::to_string(total) + "]");
    }
    std::vector<int> ts(static_cast<std::size_t>(steps));
    for (int j = 0; j < steps; ++j) {
        const long long numerator = static_cast<long long>(steps - j) * total;
        ts[static_cast<std::size_t>(j)] = static_cast<int>(numerator / steps - 1);
    }
    return StepGrid(std::move(ts), total);
}

StepGrid truncate_grid(const StepGrid& grid, int depth) {
    if (!grid.contains(depth)) {
        throw InvalidArgument("inversion depth K=" + std::to_string(depth) + " is not on the step grid");
    }
    std::vector<int> suffix;
    for (int t : grid.timesteps()) {
        if (t <= depth) suffix.push_back(t);
    }
    return StepGrid(std::move(suffix), grid.total_steps());
}

} // namespace tilediff

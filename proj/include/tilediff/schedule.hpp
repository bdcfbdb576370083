#pragma once

#include <string_view>
#include <vector>

namespace tilediff {

enum class BetaSchedule { linear, scaled_linear };

std::string_view to_string(BetaSchedule kind);
BetaSchedule parse_beta_schedule(std::string_view name);

/// Cumulative signal-retention table of a discrete diffusion process.
///
/// alpha_bar(t) = prod_{s<=t} (1 - beta_s) for t in [0, T), and the
/// destination of the final reverse step, t = -1, is defined as exactly 1.
class Schedule {
public:
    static constexpr int kDefaultSteps = 1000;
    static constexpr double kDefaultBetaStart = 0.00085;
    static constexpr double kDefaultBetaEnd = 0.012;

    static Schedule build(BetaSchedule kind, int steps, double beta_start, double beta_end);

    // scaled_linear, 0.00085 -> 0.012 over 1000 steps.
    static Schedule standard();

    BetaSchedule kind() const noexcept { return kind_; }
    int steps() const noexcept { return static_cast<int>(alpha_bar_.size()); }
    double beta_start() const noexcept { return beta_start_; }
    double beta_end() const noexcept { return beta_end_; }

    // Valid for t in [-1, T).
    double alpha_bar(int t) const;

    const std::vector<double>& alpha_bars() const noexcept { return alpha_bar_; }
    const std::vector<double>& betas() const noexcept { return beta_; }

private:
    BetaSchedule kind_ = BetaSchedule::scaled_linear;
    double beta_start_ = 0.0;
    double beta_end_ = 0.0;
    std::vector<double> beta_;
    std::vector<double> alpha_bar_;
};

/// Strictly descending timestep grid used by a few-step sampler. After
/// truncate_grid() the highest entry is the inversion depth K: refinement
/// inverts up to K and then walks the grid back down to t = -1.
class StepGrid {
public:
    StepGrid(std::vector<int> timesteps, int total_steps);

    const std::vector<int>& timesteps() const noexcept { return timesteps_; }
    int size() const noexcept { return static_cast<int>(timesteps_.size()); }
    int highest() const noexcept { return timesteps_.front(); }
    int lowest() const noexcept { return timesteps_.back(); }
    int total_steps() const noexcept { return total_steps_; }

    bool contains(int t) const noexcept;

    friend bool operator==(const StepGrid&, const StepGrid&) = default;

private:
    std::vector<int> timesteps_;
    int total_steps_ = 0;
};

// timesteps[j] = ((S - j) * T) / S - 1 in integer arithmetic.
StepGrid equispaced_grid(const Schedule& schedule, int steps);

// Suffix of the grid at or below K. K must lie on the grid.
StepGrid truncate_grid(const StepGrid& grid, int depth);

} // namespace tilediff

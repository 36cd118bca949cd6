#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace rcs {

// alpha_k = delta / (sqrt(k+1) * ln(k+2))
struct SqrtLog {
    double delta = 1.0;
};

// alpha_k = N * kappa3 / (k+1)
struct QuadraticGrowth {
    std::int64_t N = 1;
    double kappa3 = 1.0;
};

// alpha_k = min(delta / sqrt(T+1), cap), constant over the run
struct FixedHorizon {
    double delta = 1.0;
    std::int64_t T = 1;
    std::optional<double> cap;
};

using StepSchedule = std::variant<SqrtLog, QuadraticGrowth, FixedHorizon>;

double sqrt_log_step(std::int64_t k, double delta);
double quadratic_growth_step(std::int64_t k, std::int64_t N, double kappa3);
double horizon_step(std::int64_t T, double delta, std::optional<double> cap = std::nullopt);

// Throws ScheduleError on nonpositive or non-finite parameters.
void validate(const StepSchedule& schedule);
double step_size(const StepSchedule& schedule, std::int64_t k);
std::string describe(const StepSchedule& schedule);

// Upper bound on sum_k alpha_k^2 for SqrtLog: 2 delta^2 / (ln 2)^2.
double sqrt_log_square_sum_bound(double delta);

struct SummabilityReport {
    double sum_alpha = 0.0;
    double sum_alpha_sq = 0.0;
    bool divergence_flag = false;  // the infinite sum of alpha_k diverges
};

SummabilityReport validate_summability(const StepSchedule& schedule, std::int64_t horizon);

}  // namespace rcs

#include "rcs/schedules.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double sqrt_log_step(std::int64_t k, double delta) {
    const double kk = static_cast<double>(k);
    return delta / (std::sqrt(kk + 1.0) * std::log(kk + 2.0));
}

double quadratic_growth_step(std::int64_t k, std::int64_t N, double kappa3) {
    return static_cast<double>(N) * kappa3 / (static_cast<double>(k) + 1.0);
}

double horizon_step(std::int64_t T, double delta, std::optional<double> cap) {
    if (cap && !(*cap > 0.0)) throw ScheduleError("step cap must be positive");
    const double alpha = delta / std::sqrt(static_cast<double>(T) + 1.0);
    return cap ? std::min(alpha, *cap) : alpha;
}

void validate(const StepSchedule& schedule) {
    std::visit(Overloaded{
                   [](const SqrtLog& s) {
                       if (!positive(s.delta)) throw ScheduleError("SqrtLog needs delta > 0");
                   },
                   [](const QuadraticGrowth& s) {
                       if (s.N < 1) throw ScheduleError("QuadraticGrowth needs N >= 1");
                       if (!positive(s.kappa3)) throw ScheduleError("QuadraticGrowth needs kappa3 > 0");
                   },
                   [](const FixedHorizon& s) {
                       if (!positive(s.delta)) throw ScheduleError("FixedHorizon needs delta > 0");
                       if (s.T < 1) throw ScheduleError("FixedHorizon needs T >= 1");
                       if (s.cap && !positive(*s.cap)) throw ScheduleError("step cap must be positive");
                   },
               },
               schedule);
}

double step_size(const StepSchedule& schedule, std::int64_t k) {
    return std::visit(Overloaded{
                          [k](const SqrtLog& s) { return sqrt_log_step(k, s.delta); },
                          [k](const QuadraticGrowth& s) { return quadratic_growth_step(k, s.N, s.kappa3); },
                          [](const FixedHorizon& s) { return horizon_step(s.T, s.delta, s.cap); },
                      },
                      schedule);
}

std::string describe(const StepSchedule& schedule) {
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&os](const SqrtLog& s) { os << "sqrtlog(delta=" << s.delta << ")"; },
                   [&os](const QuadraticGrowth& s) {
                       os << "qg(N=" << s.N << ",kappa3=" << s.kappa3 << ")";
                   },
                   [&os](const FixedHorizon& s) {
                       os << "fixed(delta=" << s.delta << ",T=" << s.T;
                       if (s.cap) os << ",cap=" << *s.cap;
                       os << ")";
                   },
               },
               schedule);
    return os.str();
}

double sqrt_log_square_sum_bound(double delta) {
    return 2.0 * delta * delta / (std::numbers::ln2 * std::numbers::ln2);
}

SummabilityReport validate_summability(const StepSchedule& schedule, std::int64_t horizon) {
    validate(schedule);
    SummabilityReport report;
    for (std::int64_t k = 0; k < horizon; ++k) {
        const double a = step_size(schedule, k);
        report.sum_alpha += a;
        report.sum_alpha_sq += a * a;
    }
    report.divergence_flag = !std::holds_alternative<FixedHorizon>(schedule);
    return report;
}

}  // namespace rcs

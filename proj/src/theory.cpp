#include "rcs/theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rcs/errors.hpp"

namespace rcs {

TheoryBounds theory_bounds(const TheoryInputs& in) {
    if (!(in.lambda > 0.0)) throw LambdaError("lambda must be positive");
    if (in.lambda * in.rho >= 1.0) throw LambdaError("theory bounds need lambda * rho < 1");
    if (in.N < 1) throw ConfigError("N must be positive");
    if (in.L1 < 0.0 || in.L2 < 0.0 || in.abar < 0.0 || in.dist0 < 0.0 || in.xstar_norm < 0.0 ||
        in.B2 < 0.0 || !(in.delta > 0.0)) {
        throw ConfigError("theory inputs must be nonnegative (delta positive)");
    }
    TheoryBounds tb;
    tb.in = in;
    const double N = static_cast<double>(in.N);
    const double L1sq = in.L1 * in.L1;
    const double L2sq = in.L2 * in.L2;
    const double xs2 = in.xstar_norm * in.xstar_norm;

    const double base = in.dist0 * in.dist0 + (4.0 * L1sq * xs2 + 2.0 * L2sq) * in.abar / N;
    tb.B1 = base * std::exp(1.0 + 4.0 * L1sq * in.abar / N);
    tb.saturated = !std::isfinite(tb.B1);
    tb.C1 = 28.0 * L1sq * tb.B1 + 16.0 * L1sq * xs2 + 2.0 * L2sq;
    tb.C2 = (2.0 * L1sq * in.B2 + L2sq) / in.lambda;
    tb.B2 = in.B2;
    return tb;
}

double TheoryBounds::convex_envelope(std::int64_t k) const {
    const double kk = static_cast<double>(k);
    const double ln2sq = std::numbers::ln2 * std::numbers::ln2;
    const double N = static_cast<double>(in.N);
    return std::log(kk + 2.0) * (N * in.dist0 * in.dist0 / (2.0 * in.delta) + C1 * in.delta / ln2sq) /
           std::sqrt(kk + 1.0);
}

double TheoryBounds::weakly_convex_envelope(double envelope_gap0, std::int64_t T) const {
    const double N = static_cast<double>(in.N);
    return (4.0 * N * envelope_gap0 / in.delta + 4.0 * C2 * in.delta) /
           ((1.0 - in.lambda * in.rho) * std::sqrt(static_cast<double>(T) + 1.0));
}

double TheoryBounds::quadratic_growth_envelope(std::int64_t k) const {
    if (!in.kappa3) return std::numeric_limits<double>::quiet_NaN();
    const double k3 = *in.kappa3;
    return static_cast<double>(in.N) * C1 * k3 * k3 / (static_cast<double>(k) + 1.0);
}

}  // namespace rcs

#pragma once

#include <cstdint>
#include <optional>

namespace rcs {

struct TheoryInputs {
    double L1 = 0.0;
    double L2 = 0.0;
    double rho = 0.0;
    double lambda = 1.0;
    std::int64_t N = 1;
    double abar = 0.0;        // bound on sum of squared steps
    double dist0 = 0.0;       // |x0 - x*| or a proxy
    double xstar_norm = 0.0;
    double B2 = 0.0;
    double delta = 1.0;
    std::int64_t T = 1;
    std::optional<double> kappa2;
    std::optional<double> kappa3;
};

struct TheoryBounds {
    TheoryInputs in;
    double B1 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double B2 = 0.0;
    // B1 overflowed double range; the envelopes built on it are +infinity.
    bool saturated = false;

    // Gap envelope for the weighted average under SqrtLog steps.
    double convex_envelope(std::int64_t k) const;
    // Bound on the expected min squared envelope gradient over a FixedHorizon run of length T.
    double weakly_convex_envelope(double envelope_gap0, std::int64_t T) const;
    // Bound on (k+1)-scaled squared distance is N C1 kappa3^2; this returns N C1 kappa3^2 / (k+1).
    double quadratic_growth_envelope(std::int64_t k) const;
};

// Throws LambdaError when lambda * rho >= 1.
TheoryBounds theory_bounds(const TheoryInputs& in);

}  // namespace rcs

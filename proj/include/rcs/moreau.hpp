#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rcs/oracle.hpp"

namespace rcs {

struct MoreauConfig {
    double lambda = 1.0;
    std::optional<double> rho;  // defaults to the problem's modulus
    std::int64_t inner_budget = 5000;
    double inner_tolerance = 1e-10;
    bool allow_dual = true;  // use the problem's dual certificate when it has one
};

// lambda = 1/(2 rho) for weakly convex problems, 1 for convex ones.
MoreauConfig default_moreau_config(const CompositeProblem& problem);

struct ProxResult {
    Vector y;
    double envelope_value = 0.0;
    Vector envelope_gradient;       // (x - y) / lambda
    double certified_gap = 0.0;     // inner objective at y minus a proven lower bound
    double gradient_error = 0.0;    // bound on |envelope_gradient - true gradient|
    double lower_bound = 0.0;
    std::int64_t inner_iterations = 0;
    std::string method;             // "dual" or "primal"
};

// Throws LambdaError unless lambda > 0 and lambda * rho < 1.
void check_lambda(double lambda, double rho);

ProxResult prox_estimate(const CompositeProblem& problem, const Vector& x, const MoreauConfig& cfg);

struct EnvelopeGradientNorm {
    double norm = 0.0;
    double error_bar = 0.0;
    double certified_gap = 0.0;
};

EnvelopeGradientNorm envelope_gradient_norm(const CompositeProblem& problem, const Vector& x,
                                            const MoreauConfig& cfg);

}  // namespace rcs

#include "rcs/moreau.hpp"

#include <cmath>
#include <limits>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

struct InnerProblem {
    const CompositeProblem& f;
    const Vector& x;
    double lambda;
    double mu;  // strong convexity of y -> f(y) + |y - x|^2 / (2 lambda)

    double value(const Vector& y) const { return f.objective(y) + (y - x).squaredNorm() / (2.0 * lambda); }
};

struct InnerResult {
    Vector y;
    double upper = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    std::int64_t iterations = 0;
};

Vector project(const Vector& u, const Vector& lo, const Vector& hi) { return u.cwiseMax(lo).cwiseMin(hi); }

// Projected accelerated ascent on the concave dual with backtracking and
// function-value restarts. Every dual value is a lower bound on the inner
// minimum; every y(u) is a primal candidate.
InnerResult solve_dual(const InnerProblem& P, const ProxDualModel& dual, std::int64_t budget, double tol) {
    InnerResult res;
    res.y = P.x;
    res.upper = P.value(P.x);

    Vector u = project(dual.initial_point(), dual.lower(), dual.upper());
    Vector v = u, grad_v, y_v, grad_new, y_new;
    double g_v = dual.evaluate(v, grad_v, y_v);
    if (!std::isfinite(g_v)) {
        // Fall back to the box midpoint, which is always a valid dual point here.
        u = 0.5 * (dual.lower() + dual.upper());
        v = u;
        g_v = dual.evaluate(v, grad_v, y_v);
    }
    double g_u = g_v;
    if (std::isfinite(g_v)) {
        res.lower = g_v;
        const double pv = P.value(y_v);
        if (pv < res.upper) {
            res.upper = pv;
            res.y = y_v;
        }
    }
    double L = 1.0;
    double t = 1.0;

    for (std::int64_t it = 0; it < budget; ++it) {
        res.iterations = it + 1;
        if (res.upper - res.lower <= tol) break;

        Vector u_new;
        double g_new = -std::numeric_limits<double>::infinity();
        for (int bt = 0; bt < 60; ++bt) {
            u_new = project(v + grad_v / L, dual.lower(), dual.upper());
            g_new = dual.evaluate(u_new, grad_new, y_new);
            const Vector step = u_new - v;
            if (std::isfinite(g_new) && g_new >= g_v + grad_v.dot(step) - 0.5 * L * step.squaredNorm()) break;
            L *= 2.0;
        }
        if (!std::isfinite(g_new)) break;

        res.lower = std::max(res.lower, g_new);
        const double pv = P.value(y_new);
        if (pv < res.upper) {
            res.upper = pv;
            res.y = y_new;
        }

        if (g_new < g_u) {
            t = 1.0;
            v = u_new;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            v = u_new + ((t - 1.0) / t_next) * (u_new - u);
            v = project(v, dual.lower(), dual.upper());
            t = t_next;
        }
        u = u_new;
        g_u = g_new;
        g_v = dual.evaluate(v, grad_v, y_v);
        if (!std::isfinite(g_v)) {
            v = u;
            g_v = dual.evaluate(v, grad_v, y_v);
            t = 1.0;
        }
        L *= 0.9;
    }
    return res;
}

// Subgradient method with steps 2/(mu (t+2)). The weighted sum of the strongly
// convex minorants phi(y_t) + <g_t, z - y_t> + mu/2 |z - y_t|^2 (weights t+1)
// is minimized in closed form to give the lower bound.
InnerResult solve_primal(const InnerProblem& P, std::int64_t budget, double tol) {
    const Index d = P.x.size();
    InnerResult res;
    res.y = P.x;
    res.upper = P.value(P.x);

    Vector y = P.x;
    Vector g_sum = Vector::Zero(d), y_sum = Vector::Zero(d);
    double w_sum = 0.0, phi_sum = 0.0, gy_sum = 0.0, yy_sum = 0.0;
    const std::int64_t check_every = 25;

    for (std::int64_t t = 0; t < budget; ++t) {
        res.iterations = t + 1;
        const Vector g = P.f.subgradient(y) + (y - P.x) / P.lambda;
        const double phi = P.value(y);
        if (phi < res.upper) {
            res.upper = phi;
            res.y = y;
        }
        const double w = static_cast<double>(t + 1);
        w_sum += w;
        phi_sum += w * phi;
        gy_sum += w * g.dot(y);
        yy_sum += w * y.squaredNorm();
        g_sum += w * g;
        y_sum += w * y;

        if ((t + 1) % check_every == 0 || t + 1 == budget) {
            const Vector g_bar = g_sum / w_sum;
            const Vector y_bar = y_sum / w_sum;
            const double lb = phi_sum / w_sum - gy_sum / w_sum + 0.5 * P.mu * yy_sum / w_sum -
                              (g_bar - P.mu * y_bar).squaredNorm() / (2.0 * P.mu);
            res.lower = std::max(res.lower, lb);
            const double pa = P.value(y_bar);
            if (pa < res.upper) {
                res.upper = pa;
                res.y = y_bar;
            }
            if (res.upper - res.lower <= tol) break;
        }
        y -= (2.0 / (P.mu * static_cast<double>(t + 2))) * g;
        if (!y.allFinite()) break;
    }
    return res;
}

}  // namespace

MoreauConfig default_moreau_config(const CompositeProblem& problem) {
    MoreauConfig cfg;
    const double rho = problem.weak_convexity_modulus().rho;
    cfg.rho = rho;
    cfg.lambda = rho > 0.0 ? 1.0 / (2.0 * rho) : 1.0;
    return cfg;
}

void check_lambda(double lambda, double rho) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw LambdaError("lambda must be positive");
    if (!(rho >= 0.0)) throw LambdaError("rho must be nonnegative");
    if (rho > 0.0 && lambda * rho >= 1.0) {
        throw LambdaError("lambda must satisfy lambda < 1/rho (lambda*rho = " + std::to_string(lambda * rho) + ")");
    }
}

ProxResult prox_estimate(const CompositeProblem& problem, const Vector& x, const MoreauConfig& cfg) {
    if (x.size() != problem.dim()) throw DimensionError("prox point has the wrong dimension");
    const double rho = cfg.rho.value_or(problem.weak_convexity_modulus().rho);
    check_lambda(cfg.lambda, rho);
    if (cfg.inner_budget < 1) throw ConfigError("inner_budget must be positive");

    const InnerProblem P{problem, x, cfg.lambda, 1.0 / cfg.lambda - rho};
    InnerResult inner;
    ProxResult out;
    std::unique_ptr<ProxDualModel> dual;
    if (cfg.allow_dual) dual = problem.prox_dual(x, cfg.lambda);
    if (dual) {
        inner = solve_dual(P, *dual, cfg.inner_budget, cfg.inner_tolerance);
        out.method = "dual";
    } else {
        inner = solve_primal(P, cfg.inner_budget, cfg.inner_tolerance);
        out.method = "primal";
    }

    out.y = inner.y;
    out.envelope_value = inner.upper;
    out.lower_bound = inner.lower;
    out.certified_gap = std::max(0.0, inner.upper - inner.lower);
    out.envelope_gradient = (x - out.y) / cfg.lambda;
    out.gradient_error = std::sqrt(2.0 * out.certified_gap / P.mu) / cfg.lambda;
    out.inner_iterations = inner.iterations;
    return out;
}

EnvelopeGradientNorm envelope_gradient_norm(const CompositeProblem& problem, const Vector& x,
                                            const MoreauConfig& cfg) {
    const ProxResult r = prox_estimate(problem, x, cfg);
    return {r.envelope_gradient.norm(), r.gradient_error, r.certified_gap};
}

}  // namespace rcs

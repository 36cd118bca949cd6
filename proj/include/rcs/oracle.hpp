#pragma once

#include <memory>
#include <string>

#include "rcs/partition.hpp"
#include "rcs/types.hpp"

namespace rcs {

// Iterate plus the cached inner residual that makes a block step cost O(n*d_i).
struct ResidualState {
    Vector x;
    Vector s;
};

enum class ModulusProvenance { Convex, C1, C2 };

struct WeakConvexityInfo {
    double rho = 0.0;
    ModulusProvenance provenance = ModulusProvenance::Convex;
    // Relative tolerance of the spectral estimate the modulus was built from.
    double tolerance = 0.0;
};

struct LinearBoundConstants {
    double L1 = 0.0;
    double L2 = 0.0;
};

// Concave dual of the proximal subproblem min_y f(y) + |y - x|^2 / (2 lambda),
// posed over a box. Problems that admit one get sharp gap certificates.
class ProxDualModel {
public:
    virtual ~ProxDualModel() = default;
    virtual Index dim() const = 0;
    virtual const Vector& lower() const = 0;
    virtual const Vector& upper() const = 0;
    virtual Vector initial_point() const = 0;
    // Dual value at u; fills the gradient and the primal point y(u).
    // Returns -infinity where the dual is undefined.
    virtual double evaluate(const Vector& u, Vector& grad, Vector& y) const = 0;
};

// f(x) = h(Phi(x)). The outer subgradient zeta covers the data-fit part of h;
// the separable regularizer's selection is applied inside block_subgradient
// from the block of x itself.
class CompositeProblem {
public:
    virtual ~CompositeProblem() = default;

    virtual std::string family() const = 0;
    virtual Index dim() const = 0;
    virtual Index num_residuals() const = 0;

    virtual double objective(const Vector& x) const = 0;
    virtual double objective(const ResidualState& state) const = 0;

    virtual ResidualState init_state(const Vector& x) const = 0;
    virtual void outer_subgradient(const ResidualState& state, Vector& zeta) const = 0;
    virtual void block_subgradient(const ResidualState& state, const Vector& zeta, Block block,
                                   Eigen::Ref<Vector> out) const = 0;
    virtual void state_update(ResidualState& state, Block block,
                              const Eigen::Ref<const Vector>& x_new) const = 0;

    virtual WeakConvexityInfo weak_convexity_modulus() const = 0;
    virtual LinearBoundConstants linear_bound_constants() const = 0;

    virtual std::unique_ptr<ProxDualModel> prox_dual(const Vector& x, double lambda) const;

    Vector outer_subgradient(const ResidualState& state) const;
    Vector block_subgradient(const ResidualState& state, const Vector& zeta, Block block) const;
    // Full selected subgradient at x, assembled block by block from a fresh state.
    Vector subgradient(const Vector& x) const;

protected:
    void check_dim(const Vector& x) const;
};

}  // namespace rcs

#pragma once

#include <variant>

#include "rcs/linalg.hpp"
#include "rcs/oracle.hpp"

namespace rcs {

struct L1Loss {};

// phi(z) = |z| - z^2/(2 p1) for |z| <= p1, p1/2 otherwise
struct McpLoss {
    double p1 = 1.0;
};

using MLoss = std::variant<L1Loss, McpLoss>;

double mcp_value(double z, double p1);
// Selection sign(z) - z/p1 inside the curved region, 0 on the flat part.
double mcp_derivative(double z, double p1);

// (1/n) sum_i loss(a_i^T x - b_i) + p2 |x|_1, residual s = Ax - b.
class MEstimatorProblem final : public CompositeProblem {
public:
    MEstimatorProblem(Matrix A, Vector b, double p2, MLoss loss = L1Loss{});

    std::string family() const override;
    Index dim() const override { return A_.cols(); }
    Index num_residuals() const override { return A_.rows(); }

    double objective(const Vector& x) const override;
    double objective(const ResidualState& state) const override;
    ResidualState init_state(const Vector& x) const override;
    void outer_subgradient(const ResidualState& state, Vector& zeta) const override;
    void block_subgradient(const ResidualState& state, const Vector& zeta, Block block,
                           Eigen::Ref<Vector> out) const override;
    void state_update(ResidualState& state, Block block,
                      const Eigen::Ref<const Vector>& x_new) const override;
    WeakConvexityInfo weak_convexity_modulus() const override;
    LinearBoundConstants linear_bound_constants() const override;
    std::unique_ptr<ProxDualModel> prox_dual(const Vector& x, double lambda) const override;

    using CompositeProblem::block_subgradient;
    using CompositeProblem::outer_subgradient;

    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    double p2() const { return p2_; }
    const MLoss& loss() const { return loss_; }
    bool is_mcp() const { return std::holds_alternative<McpLoss>(loss_); }
    const SpectralEstimate& sigma_max() const { return sigma_; }

private:
    double loss_sum(const Vector& residual) const;

    Matrix A_;
    Vector b_;
    double p2_;
    MLoss loss_;
    SpectralEstimate sigma_;
};

// (1/n) sum_i max(0, 1 - b_i a_i^T x) + (p/2)|x|^2, residual s = 1 - A~x.
class SvmProblem final : public CompositeProblem {
public:
    SvmProblem(Matrix A, Vector labels, double p);

    std::string family() const override { return "svm"; }
    Index dim() const override { return At_.cols(); }
    Index num_residuals() const override { return At_.rows(); }

    double objective(const Vector& x) const override;
    double objective(const ResidualState& state) const override;
    ResidualState init_state(const Vector& x) const override;
    void outer_subgradient(const ResidualState& state, Vector& zeta) const override;
    void block_subgradient(const ResidualState& state, const Vector& zeta, Block block,
                           Eigen::Ref<Vector> out) const override;
    void state_update(ResidualState& state, Block block,
                      const Eigen::Ref<const Vector>& x_new) const override;
    WeakConvexityInfo weak_convexity_modulus() const override;
    LinearBoundConstants linear_bound_constants() const override;
    std::unique_ptr<ProxDualModel> prox_dual(const Vector& x, double lambda) const override;

    using CompositeProblem::block_subgradient;
    using CompositeProblem::outer_subgradient;

    // Rows scaled by their labels.
    const Matrix& A_tilde() const { return At_; }
    const Vector& labels() const { return labels_; }
    double p() const { return p_; }
    const SpectralEstimate& sigma_max() const { return sigma_; }

private:
    Matrix At_;
    Vector labels_;
    double p_;
    SpectralEstimate sigma_;
};

// (1/n) sum_i |(a_i^T x)^2 - b_sq_i|, residual s = Ax.
class PhaseRetrievalProblem final : public CompositeProblem {
public:
    PhaseRetrievalProblem(Matrix A, Vector b_sq);

    std::string family() const override { return "pr"; }
    Index dim() const override { return A_.cols(); }
    Index num_residuals() const override { return A_.rows(); }

    double objective(const Vector& x) const override;
    double objective(const ResidualState& state) const override;
    ResidualState init_state(const Vector& x) const override;
    void outer_subgradient(const ResidualState& state, Vector& zeta) const override;
    void block_subgradient(const ResidualState& state, const Vector& zeta, Block block,
                           Eigen::Ref<Vector> out) const override;
    void state_update(ResidualState& state, Block block,
                      const Eigen::Ref<const Vector>& x_new) const override;
    WeakConvexityInfo weak_convexity_modulus() const override;
    LinearBoundConstants linear_bound_constants() const override;
    std::unique_ptr<ProxDualModel> prox_dual(const Vector& x, double lambda) const override;

    using CompositeProblem::block_subgradient;
    using CompositeProblem::outer_subgradient;

    const Matrix& A() const { return A_; }
    const Vector& b_sq() const { return b_sq_; }
    const SpectralEstimate& sigma_max() const { return sigma_; }

private:
    Matrix A_;
    Vector b_sq_;
    SpectralEstimate sigma_;
};

}  // namespace rcs

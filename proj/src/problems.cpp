#include "rcs/problems.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <string>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_data(const Matrix& A, const Vector& b, const char* what) {
    if (A.rows() < 1 || A.cols() < 1) throw DimensionError(std::string(what) + ": empty matrix");
    if (b.size() != A.rows()) {
        throw DimensionError(std::string(what) + ": vector length " + std::to_string(b.size()) +
                             " does not match " + std::to_string(A.rows()) + " rows");
    }
    if (!A.allFinite() || !b.allFinite()) throw DimensionError(std::string(what) + ": non-finite data");
}

Vector sign_of(const Vector& v) { return v.unaryExpr([](double t) { return sign(t); }); }

Vector box(Index n, double value) { return Vector::Constant(n, value); }

// Dual of the L1 M-estimator prox: variables (u, v) in [-1,1]^n x [-1,1]^d,
// c = A^T u / n + p2 v and y = x - lambda c.
class L1ProxDual final : public ProxDualModel {
public:
    L1ProxDual(const MEstimatorProblem& p, const Vector& x, double lambda)
        : prob_(p), x_(x), lambda_(lambda), n_(p.A().rows()), d_(p.A().cols()),
          m_(p.p2() > 0.0 ? d_ : 0), lo_(box(n_ + m_, -1.0)), hi_(box(n_ + m_, 1.0)) {}

    Index dim() const override { return n_ + m_; }
    const Vector& lower() const override { return lo_; }
    const Vector& upper() const override { return hi_; }

    Vector initial_point() const override {
        Vector w(dim());
        w.head(n_) = sign_of(prob_.A() * x_ - prob_.b());
        if (m_ > 0) w.tail(m_) = sign_of(x_);
        return w;
    }

    double evaluate(const Vector& w, Vector& grad, Vector& y) const override {
        const double n = static_cast<double>(n_);
        Vector c = prob_.A().transpose() * w.head(n_) / n;
        if (m_ > 0) c += prob_.p2() * w.tail(m_);
        y = x_ - lambda_ * c;
        const Vector r = prob_.A() * y - prob_.b();
        grad.resize(dim());
        grad.head(n_) = r / n;
        if (m_ > 0) grad.tail(m_) = prob_.p2() * y;
        const double diff = (y - x_).squaredNorm() / (2.0 * lambda_);
        return grad.dot(w) + diff;
    }

private:
    const MEstimatorProblem& prob_;
    Vector x_;
    double lambda_;
    Index n_, d_, m_;
    Vector lo_, hi_;
};

// Dual of the SVM prox: u in [0,1]^n, y = (x/lambda + A~^T u / n) / (p + 1/lambda).
class SvmProxDual final : public ProxDualModel {
public:
    SvmProxDual(const SvmProblem& p, const Vector& x, double lambda)
        : prob_(p), x_(x), lambda_(lambda), lo_(box(p.num_residuals(), 0.0)),
          hi_(box(p.num_residuals(), 1.0)) {}

    Index dim() const override { return prob_.num_residuals(); }
    const Vector& lower() const override { return lo_; }
    const Vector& upper() const override { return hi_; }

    Vector initial_point() const override {
        const Vector s = Vector::Ones(dim()) - prob_.A_tilde() * x_;
        return s.unaryExpr([](double t) { return t > 0.0 ? 1.0 : 0.0; });
    }

    double evaluate(const Vector& u, Vector& grad, Vector& y) const override {
        const double n = static_cast<double>(dim());
        y = (x_ / lambda_ + prob_.A_tilde().transpose() * u / n) / (prob_.p() + 1.0 / lambda_);
        grad = (Vector::Ones(dim()) - prob_.A_tilde() * y) / n;
        return grad.dot(u) + 0.5 * prob_.p() * y.squaredNorm() +
               (y - x_).squaredNorm() / (2.0 * lambda_);
    }

private:
    const SvmProblem& prob_;
    Vector x_;
    double lambda_;
    Vector lo_, hi_;
};

// Dual of the phase-retrieval prox: u in [-1,1]^n,
// K(u) = A^T diag(u) A / n + I/(2 lambda), y = K^{-1} x / (2 lambda).
class PrProxDual final : public ProxDualModel {
public:
    PrProxDual(const PhaseRetrievalProblem& p, const Vector& x, double lambda)
        : prob_(p), x_(x), lambda_(lambda), lo_(box(p.num_residuals(), -1.0)),
          hi_(box(p.num_residuals(), 1.0)) {}

    Index dim() const override { return prob_.num_residuals(); }
    const Vector& lower() const override { return lo_; }
    const Vector& upper() const override { return hi_; }

    Vector initial_point() const override {
        const Vector s = prob_.A() * x_;
        return sign_of(s.cwiseAbs2() - prob_.b_sq());
    }

    double evaluate(const Vector& u, Vector& grad, Vector& y) const override {
        const Matrix& A = prob_.A();
        const double n = static_cast<double>(dim());
        Matrix K = A.transpose() * (u.asDiagonal() * A) / n;
        K.diagonal().array() += 1.0 / (2.0 * lambda_);
        Eigen::LLT<Matrix> llt(K);
        if (llt.info() != Eigen::Success) return kNegInf;
        y = llt.solve(x_ / (2.0 * lambda_));
        grad = ((A * y).cwiseAbs2() - prob_.b_sq()) / n;
        return grad.dot(u) + (y - x_).squaredNorm() / (2.0 * lambda_);
    }

private:
    const PhaseRetrievalProblem& prob_;
    Vector x_;
    double lambda_;
    Vector lo_, hi_;
};

}  // namespace

double mcp_value(double z, double p1) {
    const double a = std::abs(z);
    return a <= p1 ? a - z * z / (2.0 * p1) : 0.5 * p1;
}

double mcp_derivative(double z, double p1) {
    return std::abs(z) <= p1 ? sign(z) - z / p1 : 0.0;
}

// ---------------------------------------------------------------- M-estimator

MEstimatorProblem::MEstimatorProblem(Matrix A, Vector b, double p2, MLoss loss)
    : A_(std::move(A)), b_(std::move(b)), p2_(p2), loss_(loss) {
    check_data(A_, b_, "m-estimator");
    if (!(p2_ >= 0.0) || !std::isfinite(p2_)) throw ConfigError("penalty p2 must be finite and >= 0");
    if (const auto* m = std::get_if<McpLoss>(&loss_); m && !(m->p1 > 0.0 && std::isfinite(m->p1))) {
        throw ConfigError("MCP parameter p1 must be positive");
    }
    sigma_ = largest_singular_value(A_);
}

std::string MEstimatorProblem::family() const { return is_mcp() ? "mestimator-mcp" : "mestimator-l1"; }

double MEstimatorProblem::loss_sum(const Vector& r) const {
    if (const auto* m = std::get_if<McpLoss>(&loss_)) {
        double acc = 0.0;
        for (Index i = 0; i < r.size(); ++i) acc += mcp_value(r[i], m->p1);
        return acc;
    }
    return r.lpNorm<1>();
}

double MEstimatorProblem::objective(const Vector& x) const {
    check_dim(x);
    const Vector r = A_ * x - b_;
    return loss_sum(r) / static_cast<double>(A_.rows()) + p2_ * x.lpNorm<1>();
}

double MEstimatorProblem::objective(const ResidualState& state) const {
    return loss_sum(state.s) / static_cast<double>(A_.rows()) + p2_ * state.x.lpNorm<1>();
}

ResidualState MEstimatorProblem::init_state(const Vector& x) const {
    check_dim(x);
    return {x, A_ * x - b_};
}

void MEstimatorProblem::outer_subgradient(const ResidualState& state, Vector& zeta) const {
    const double inv_n = 1.0 / static_cast<double>(A_.rows());
    zeta.resize(A_.rows());
    if (const auto* m = std::get_if<McpLoss>(&loss_)) {
        for (Index i = 0; i < zeta.size(); ++i) zeta[i] = inv_n * mcp_derivative(state.s[i], m->p1);
    } else {
        for (Index i = 0; i < zeta.size(); ++i) zeta[i] = inv_n * sign(state.s[i]);
    }
}

void MEstimatorProblem::block_subgradient(const ResidualState& state, const Vector& zeta, Block block,
                                          Eigen::Ref<Vector> out) const {
    out.noalias() = A_.middleCols(block.begin, block.size).transpose() * zeta;
    if (p2_ != 0.0) {
        for (Index j = 0; j < block.size; ++j) out[j] += p2_ * sign(state.x[block.begin + j]);
    }
}

void MEstimatorProblem::state_update(ResidualState& state, Block block,
                                     const Eigen::Ref<const Vector>& x_new) const {
    const Vector delta = x_new - state.x.segment(block.begin, block.size);
    state.s.noalias() += A_.middleCols(block.begin, block.size) * delta;
    state.x.segment(block.begin, block.size) = x_new;
}

WeakConvexityInfo MEstimatorProblem::weak_convexity_modulus() const {
    if (const auto* m = std::get_if<McpLoss>(&loss_)) {
        const double s = sigma_.value;
        return {s * s / (static_cast<double>(A_.rows()) * m->p1), ModulusProvenance::C2, sigma_.tolerance};
    }
    return {0.0, ModulusProvenance::Convex, 0.0};
}

LinearBoundConstants MEstimatorProblem::linear_bound_constants() const {
    const double n = static_cast<double>(A_.rows());
    const double d = static_cast<double>(A_.cols());
    return {0.0, sigma_.value / std::sqrt(n) + p2_ * std::sqrt(d)};
}

std::unique_ptr<ProxDualModel> MEstimatorProblem::prox_dual(const Vector& x, double lambda) const {
    if (is_mcp()) return nullptr;
    return std::make_unique<L1ProxDual>(*this, x, lambda);
}

// ------------------------------------------------------------------------ SVM

SvmProblem::SvmProblem(Matrix A, Vector labels, double p) : labels_(std::move(labels)), p_(p) {
    check_data(A, labels_, "svm");
    for (Index i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != 1.0 && labels_[i] != -1.0) {
            throw ConfigError("svm label at row " + std::to_string(i) + " is not +-1");
        }
    }
    if (!(p_ > 0.0) || !std::isfinite(p_)) throw ConfigError("svm regularization p must be positive");
    At_ = labels_.asDiagonal() * A;
    sigma_ = largest_singular_value(At_);
}

double SvmProblem::objective(const Vector& x) const {
    check_dim(x);
    const Vector s = Vector::Ones(At_.rows()) - At_ * x;
    return s.cwiseMax(0.0).sum() / static_cast<double>(At_.rows()) + 0.5 * p_ * x.squaredNorm();
}

double SvmProblem::objective(const ResidualState& state) const {
    return state.s.cwiseMax(0.0).sum() / static_cast<double>(At_.rows()) +
           0.5 * p_ * state.x.squaredNorm();
}

ResidualState SvmProblem::init_state(const Vector& x) const {
    check_dim(x);
    return {x, Vector::Ones(At_.rows()) - At_ * x};
}

void SvmProblem::outer_subgradient(const ResidualState& state, Vector& zeta) const {
    const double inv_n = 1.0 / static_cast<double>(At_.rows());
    zeta.resize(At_.rows());
    for (Index i = 0; i < zeta.size(); ++i) zeta[i] = state.s[i] > 0.0 ? inv_n : 0.0;
}

void SvmProblem::block_subgradient(const ResidualState& state, const Vector& zeta, Block block,
                                   Eigen::Ref<Vector> out) const {
    out.noalias() = -(At_.middleCols(block.begin, block.size).transpose() * zeta);
    out += p_ * state.x.segment(block.begin, block.size);
}

void SvmProblem::state_update(ResidualState& state, Block block,
                              const Eigen::Ref<const Vector>& x_new) const {
    // s = 1 - A~x, so the correction enters with the opposite sign.
    const Vector delta = state.x.segment(block.begin, block.size) - x_new;
    state.s.noalias() += At_.middleCols(block.begin, block.size) * delta;
    state.x.segment(block.begin, block.size) = x_new;
}

WeakConvexityInfo SvmProblem::weak_convexity_modulus() const {
    return {0.0, ModulusProvenance::Convex, 0.0};
}

LinearBoundConstants SvmProblem::linear_bound_constants() const {
    return {p_, sigma_.value / std::sqrt(static_cast<double>(At_.rows()))};
}

std::unique_ptr<ProxDualModel> SvmProblem::prox_dual(const Vector& x, double lambda) const {
    return std::make_unique<SvmProxDual>(*this, x, lambda);
}

// ------------------------------------------------------------ phase retrieval

PhaseRetrievalProblem::PhaseRetrievalProblem(Matrix A, Vector b_sq)
    : A_(std::move(A)), b_sq_(std::move(b_sq)) {
    check_data(A_, b_sq_, "phase retrieval");
    sigma_ = largest_singular_value(A_);
}

double PhaseRetrievalProblem::objective(const Vector& x) const {
    check_dim(x);
    const Vector s = A_ * x;
    return (s.cwiseAbs2() - b_sq_).lpNorm<1>() / static_cast<double>(A_.rows());
}

double PhaseRetrievalProblem::objective(const ResidualState& state) const {
    return (state.s.cwiseAbs2() - b_sq_).lpNorm<1>() / static_cast<double>(A_.rows());
}

ResidualState PhaseRetrievalProblem::init_state(const Vector& x) const {
    check_dim(x);
    return {x, A_ * x};
}

void PhaseRetrievalProblem::outer_subgradient(const ResidualState& state, Vector& zeta) const {
    const double scale = 2.0 / static_cast<double>(A_.rows());
    zeta.resize(A_.rows());
    for (Index i = 0; i < zeta.size(); ++i) {
        const double si = state.s[i];
        zeta[i] = scale * si * sign(si * si - b_sq_[i]);
    }
}

void PhaseRetrievalProblem::block_subgradient(const ResidualState&, const Vector& zeta, Block block,
                                              Eigen::Ref<Vector> out) const {
    out.noalias() = A_.middleCols(block.begin, block.size).transpose() * zeta;
}

void PhaseRetrievalProblem::state_update(ResidualState& state, Block block,
                                         const Eigen::Ref<const Vector>& x_new) const {
    const Vector delta = x_new - state.x.segment(block.begin, block.size);
    state.s.noalias() += A_.middleCols(block.begin, block.size) * delta;
    state.x.segment(block.begin, block.size) = x_new;
}

WeakConvexityInfo PhaseRetrievalProblem::weak_convexity_modulus() const {
    const double s = sigma_.value;
    return {2.0 * s * s / static_cast<double>(A_.rows()), ModulusProvenance::C1, sigma_.tolerance};
}

LinearBoundConstants PhaseRetrievalProblem::linear_bound_constants() const {
    const double s = sigma_.value;
    return {2.0 * s * s / static_cast<double>(A_.rows()), 0.0};
}

std::unique_ptr<ProxDualModel> PhaseRetrievalProblem::prox_dual(const Vector& x, double lambda) const {
    return std::make_unique<PrProxDual>(*this, x, lambda);
}

}  // namespace rcs

#include "rcs/linalg.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

// Deterministic start with no special alignment to coordinate axes.
Vector start_vector(Index d) {
    Vector v(d);
    for (Index j = 0; j < d; ++j) v[j] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(j));
    return v.normalized();
}

}  // namespace

SpectralEstimate largest_singular_value(const Matrix& A, int max_iter, double tol) {
    SpectralEstimate est;
    est.tolerance = tol;
    if (A.size() == 0) return est;
    Vector v = start_vector(A.cols());
    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector w = A.transpose() * (A * v);
        const double next = v.dot(w);
        const double norm = w.norm();
        est.iterations = it;
        if (norm == 0.0) {
            lambda = 0.0;
            est.converged = true;
            break;
        }
        v = w / norm;
        if (std::abs(next - lambda) <= tol * std::abs(next)) {
            lambda = next;
            est.converged = true;
            break;
        }
        lambda = next;
    }
    est.value = std::sqrt(std::max(lambda, 0.0));
    return est;
}

SpectralEstimate smallest_eigenvalue_spd(const Matrix& Q, int max_iter, double tol) {
    SpectralEstimate est;
    est.tolerance = tol;
    Eigen::LLT<Matrix> llt(Q);
    if (llt.info() != Eigen::Success) throw NotApplicableError("matrix is not positive definite");
    Vector v = start_vector(Q.cols());
    double mu = 0.0;  // largest eigenvalue of Q^{-1}
    for (int it = 1; it <= max_iter; ++it) {
        Vector w = llt.solve(v);
        const double next = v.dot(w);
        est.iterations = it;
        v = w.normalized();
        if (std::abs(next - mu) <= tol * std::abs(next)) {
            mu = next;
            est.converged = true;
            break;
        }
        mu = next;
    }
    if (!(mu > 0.0) || !std::isfinite(mu)) throw NotApplicableError("matrix is singular");
    est.value = 1.0 / mu;
    return est;
}

}  // namespace rcs

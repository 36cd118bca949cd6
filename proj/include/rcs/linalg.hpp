#pragma once

#include "rcs/types.hpp"

namespace rcs {

struct SpectralEstimate {
    double value = 0.0;
    int iterations = 0;
    double tolerance = 0.0;
    bool converged = false;
};

// sigma_max(A) by power iteration on A^T A.
SpectralEstimate largest_singular_value(const Matrix& A, int max_iter = 500, double tol = 1e-6);

// Smallest eigenvalue of a symmetric positive definite Q by inverse power
// iteration. Throws NotApplicableError when Q is not numerically positive definite.
SpectralEstimate smallest_eigenvalue_spd(const Matrix& Q, int max_iter = 500, double tol = 1e-6);

}  // namespace rcs

#include "oracles.hpp"

#include <Eigen/SVD>
#include <limits>

namespace rcs::testing {

double dense_sigma_max(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

double exact_box_min_norm(const Vector& c, const Matrix& M) {
    const Index m = M.cols();
    double best = std::numeric_limits<double>::infinity();
    // Each coordinate is free (0), at -1 (1) or at +1 (2).
    Index combos = 1;
    for (Index j = 0; j < m; ++j) combos *= 3;
    for (Index code = 0; code < combos; ++code) {
        std::vector<Index> free_idx;
        Vector xi = Vector::Zero(m);
        Index t = code;
        for (Index j = 0; j < m; ++j, t /= 3) {
            const Index state = t % 3;
            if (state == 0) free_idx.push_back(j);
            xi[j] = state == 1 ? -1.0 : (state == 2 ? 1.0 : 0.0);
        }
        if (!free_idx.empty()) {
            Matrix F(M.rows(), static_cast<Index>(free_idx.size()));
            for (std::size_t k = 0; k < free_idx.size(); ++k) F.col(static_cast<Index>(k)) = M.col(free_idx[k]);
            const Vector rhs = -(c + M * xi);
            const Vector z = F.completeOrthogonalDecomposition().solve(rhs);
            bool feasible = true;
            for (std::size_t k = 0; k < free_idx.size(); ++k) {
                if (std::abs(z[static_cast<Index>(k)]) > 1.0) feasible = false;
                xi[free_idx[k]] = z[static_cast<Index>(k)];
            }
            if (!feasible) continue;
        }
        best = std::min(best, (c + M * xi).norm());
    }
    return best;
}

}  // namespace rcs::testing

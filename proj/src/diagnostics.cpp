#include "rcs/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "rcs/errors.hpp"
#include "rcs/linalg.hpp"

namespace rcs {

KinkSplit split_indices(const PhaseRetrievalProblem& problem, const Vector& x, double tol) {
    const Vector s = problem.A() * x;
    KinkSplit out;
    for (Index i = 0; i < s.size(); ++i) {
        const double q = s[i] * s[i] - problem.b_sq()[i];
        if (std::abs(q) <= tol) {
            out.kink.push_back(i);
        } else if (q > 0.0) {
            out.above.push_back(i);
        } else {
            out.below.push_back(i);
        }
    }
    return out;
}

double min_norm_subgradient_pr(const PhaseRetrievalProblem& problem, const Vector& x, double kink_tol) {
    if (x.size() != problem.dim()) throw DimensionError("point has the wrong dimension");
    const Matrix& A = problem.A();
    const double scale = 2.0 / static_cast<double>(A.rows());
    const Vector s = A * x;
    const KinkSplit split = split_indices(problem, x, kink_tol);

    Vector c = Vector::Zero(A.cols());
    for (Index i : split.above) c += scale * s[i] * A.row(i).transpose();
    for (Index i : split.below) c -= scale * s[i] * A.row(i).transpose();
    if (split.kink.empty()) return c.norm();

    const Index m = static_cast<Index>(split.kink.size());
    Matrix M(A.cols(), m);
    for (Index j = 0; j < m; ++j) M.col(j) = scale * s[split.kink[j]] * A.row(split.kink[j]).transpose();

    const double sigma = largest_singular_value(M).value;
    if (sigma == 0.0) return c.norm();
    const double step = 1.0 / (2.0 * sigma * sigma * (1.0 + 1e-6));
    Vector xi = Vector::Zero(m);
    double best = c.norm();
    for (int it = 0; it < 1000; ++it) {
        const Vector r = c + M * xi;
        best = std::min(best, r.norm());
        xi = (xi - step * 2.0 * (M.transpose() * r)).cwiseMax(-1.0).cwiseMin(1.0);
    }
    return std::min(best, (c + M * xi).norm());
}

double critical_set_bound_pr(const PhaseRetrievalProblem& problem) {
    const Matrix& A = problem.A();
    const Matrix Q = A.transpose() * A;
    SpectralEstimate lam;
    try {
        lam = smallest_eigenvalue_spd(Q, 2000, 1e-12);
    } catch (const NotApplicableError&) {
        throw NotApplicableError("A is not of full column rank; the critical-set bound does not apply");
    }
    // sigma_min(Q^T Q) = lambda_min(Q)^2 for symmetric positive definite Q.
    const double smin_qq = lam.value * lam.value;
    if (!(smin_qq > 1e-10)) {
        throw NotApplicableError("A is numerically rank deficient; the critical-set bound does not apply");
    }
    double acc = 0.0;
    for (Index i = 0; i < A.rows(); ++i) acc += A.row(i).norm() * std::sqrt(std::abs(problem.b_sq()[i]));
    return 2.0 * acc / std::sqrt(smin_qq);
}

SubregularityReport subregularity_probe(const CompositeProblem& problem,
                                        const std::vector<Vector>& reference_points,
                                        const std::vector<Vector>& samples, ResidualKind kind,
                                        const MoreauConfig& cfg) {
    if (reference_points.empty()) throw ConfigError("subregularity probe needs reference points");
    const auto* pr = dynamic_cast<const PhaseRetrievalProblem*>(&problem);
    if (kind == ResidualKind::MinNormSubgradient && pr == nullptr) {
        throw NotApplicableError("minimum-norm subgradient is only available for phase retrieval");
    }
    SubregularityReport report;
    for (const Vector& x : samples) {
        SubregularityRecord rec;
        rec.dist_to_reference = std::numeric_limits<double>::infinity();
        for (const Vector& ref : reference_points) {
            rec.dist_to_reference = std::min(rec.dist_to_reference, (x - ref).norm());
        }
        switch (kind) {
            case ResidualKind::MinNormSubgradient:
                rec.residual = min_norm_subgradient_pr(*pr, x);
                break;
            case ResidualKind::SelectedSubgradient:
                rec.residual = problem.subgradient(x).norm();
                break;
            case ResidualKind::EnvelopeGradient:
                rec.residual = envelope_gradient_norm(problem, x, cfg).norm;
                break;
        }
        if (rec.dist_to_reference == 0.0) {
            rec.ratio = 0.0;
        } else if (rec.residual == 0.0) {
            rec.ratio = std::numeric_limits<double>::infinity();
        } else {
            rec.ratio = rec.dist_to_reference / rec.residual;
        }
        report.sup_ratio = std::max(report.sup_ratio, rec.ratio);
        report.records.push_back(rec);
    }
    return report;
}

}  // namespace rcs

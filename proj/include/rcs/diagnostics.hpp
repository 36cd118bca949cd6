#pragma once

#include <vector>

#include "rcs/moreau.hpp"
#include "rcs/problems.hpp"

namespace rcs {

// Index split at x: |(a_i^T x)^2 - b_sq_i| <= tol goes to the kink set.
struct KinkSplit {
    std::vector<Index> kink;      // I1
    std::vector<Index> above;     // I2, (a_i^T x)^2 > b_sq_i
    std::vector<Index> below;     // I3
};

KinkSplit split_indices(const PhaseRetrievalProblem& problem, const Vector& x, double tol = 1e-9);

// Upper bound on dist(0, subdifferential of f at x) for phase retrieval:
// min over xi in [-1,1]^{|I1|} of |c + M xi| by projected gradient.
double min_norm_subgradient_pr(const PhaseRetrievalProblem& problem, const Vector& x,
                               double kink_tol = 1e-9);

// B2 = 2 sum_i |a_i| |b_i| / sqrt(sigma_min(Q^T Q)), Q = A^T A, with |b_i| = sqrt(|b_sq_i|).
double critical_set_bound_pr(const PhaseRetrievalProblem& problem);

enum class ResidualKind { MinNormSubgradient, SelectedSubgradient, EnvelopeGradient };

struct SubregularityRecord {
    double dist_to_reference = 0.0;
    double residual = 0.0;
    double ratio = 0.0;
};

struct SubregularityReport {
    std::vector<SubregularityRecord> records;
    double sup_ratio = 0.0;  // empirical kappa_1 estimate
};

// MinNormSubgradient requires a PhaseRetrievalProblem; EnvelopeGradient uses cfg.
SubregularityReport subregularity_probe(const CompositeProblem& problem,
                                        const std::vector<Vector>& reference_points,
                                        const std::vector<Vector>& samples, ResidualKind kind,
                                        const MoreauConfig& cfg = {});

}  // namespace rcs

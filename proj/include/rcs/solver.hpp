#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcs/oracle.hpp"
#include "rcs/partition.hpp"
#include "rcs/schedules.hpp"

namespace rcs {

struct IterationRecord {
    std::int64_t k = 0;
    std::int64_t block = 0;  // -1 on the terminal record at k = T
    double alpha = 0.0;
    double f = 0.0;
    double step_norm = 0.0;
    std::optional<double> env_grad;
    std::optional<double> env_gap;
};

// Weighted (by alpha_j) and plain running means of x^0..x^k, kept lazily so
// that an RCS step costs O(d_i) here as well.
class RunningAverages {
public:
    explicit RunningAverages(Index d = 0);

    // Registers the current iterate with weight alpha.
    void advance(double alpha);
    // Must be called with the iterate before a block of it is overwritten.
    void commit(Block block, const Vector& x);

    std::int64_t count() const { return count_; }
    double weight() const { return W_; }
    Vector weighted(const Vector& x) const;
    Vector plain(const Vector& x) const;

private:
    Vector wsum_, wmark_, psum_;
    std::vector<std::int64_t> pmark_;
    double W_ = 0.0;
    std::int64_t count_ = 0;
};

// What an observer sees at a record point, before x^k is updated.
struct IterateView {
    std::int64_t k;
    const Vector& x;
    const RunningAverages& averages;
    Vector weighted_average() const { return averages.weighted(x); }
    Vector plain_average() const { return averages.plain(x); }
};

using Observer = std::function<void(const IterateView&, IterationRecord&)>;

struct SolverConfig {
    StepSchedule schedule = SqrtLog{1.0};
    std::int64_t total_iterations = 0;
    std::uint64_t seed = 0;
    std::int64_t record_every = 1;
    std::int64_t epoch_size = 0;  // 0 means "use the block count"
    Observer observer;            // optional, called at record points
};

struct SolverTrace {
    std::vector<IterationRecord> records;
    Vector final_x;
    std::optional<Vector> weighted_average;
    std::optional<Vector> plain_average;
    double initial_objective = 0.0;
    double final_objective = 0.0;  // recomputed from scratch
    double wall_time = 0.0;
    std::int64_t workspace_bytes_per_iter = 0;
    std::int64_t iterations = 0;
    std::int64_t epoch_size = 1;
    std::vector<std::string> warnings;
};

SolverTrace rcs_run(const CompositeProblem& problem, const BlockPartition& partition,
                    const SolverConfig& config, const Vector& x0);
SolverTrace subgrad_run(const CompositeProblem& problem, const SolverConfig& config, const Vector& x0);

// Averages over x^0..x^{T-1}; throw when the run made no iterations.
Vector weighted_average_iterate(const SolverTrace& trace);
Vector plain_average_iterate(const SolverTrace& trace);

std::int64_t workspace_bytes(Index n, Index max_block);

}  // namespace rcs

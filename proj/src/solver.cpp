#include "rcs/solver.hpp"

#include <chrono>
#include <cmath>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

RunningAverages::RunningAverages(Index d)
    : wsum_(Vector::Zero(d)), wmark_(Vector::Zero(d)), psum_(Vector::Zero(d)),
      pmark_(static_cast<std::size_t>(d), 0) {}

void RunningAverages::advance(double alpha) {
    W_ += alpha;
    ++count_;
}

void RunningAverages::commit(Block block, const Vector& x) {
    for (Index c = block.begin; c < block.end(); ++c) {
        wsum_[c] += x[c] * (W_ - wmark_[c]);
        wmark_[c] = W_;
        psum_[c] += x[c] * static_cast<double>(count_ - pmark_[c]);
        pmark_[c] = count_;
    }
}

Vector RunningAverages::weighted(const Vector& x) const {
    Vector out(x.size());
    for (Index c = 0; c < x.size(); ++c) out[c] = (wsum_[c] + x[c] * (W_ - wmark_[c])) / W_;
    return out;
}

Vector RunningAverages::plain(const Vector& x) const {
    Vector out(x.size());
    const double n = static_cast<double>(count_);
    for (Index c = 0; c < x.size(); ++c) {
        out[c] = (psum_[c] + x[c] * static_cast<double>(count_ - pmark_[c])) / n;
    }
    return out;
}

std::int64_t workspace_bytes(Index n, Index max_block) {
    return static_cast<std::int64_t>(sizeof(double)) * (n + max_block);
}

namespace {

void check_config(const CompositeProblem& problem, const BlockPartition& partition,
                  const SolverConfig& config, const Vector& x0) {
    if (x0.size() != problem.dim()) {
        throw DimensionError("x0 has length " + std::to_string(x0.size()) + ", problem has d=" +
                             std::to_string(problem.dim()));
    }
    if (!x0.allFinite()) throw DimensionError("x0 has non-finite entries");
    if (partition.dim() != problem.dim()) throw DimensionError("partition dimension mismatch");
    if (config.total_iterations < 0) throw ConfigError("total_iterations must be >= 0");
    if (config.record_every < 1) throw ConfigError("record_every must be >= 1");
    if (config.epoch_size < 0) throw ConfigError("epoch_size must be >= 0");
    validate(config.schedule);
    if (const auto* fh = std::get_if<FixedHorizon>(&config.schedule)) {
        if (config.total_iterations > 0 && fh->T != config.total_iterations) {
            throw ScheduleError("FixedHorizon T=" + std::to_string(fh->T) +
                                " does not match the run length " +
                                std::to_string(config.total_iterations));
        }
    }
}

}  // namespace

SolverTrace rcs_run(const CompositeProblem& problem, const BlockPartition& partition,
                    const SolverConfig& config, const Vector& x0) {
    check_config(problem, partition, config, x0);
    const auto t_start = std::chrono::steady_clock::now();

    const Index N = partition.count();
    const std::int64_t T = config.total_iterations;
    const std::int64_t resync_every = config.record_every * 100;

    SolverTrace trace;
    trace.iterations = T;
    trace.epoch_size = config.epoch_size > 0 ? config.epoch_size : N;
    trace.workspace_bytes_per_iter = workspace_bytes(problem.num_residuals(), partition.max_block_size());

    if (const auto* fh = std::get_if<FixedHorizon>(&config.schedule); fh && !fh->cap) {
        const auto wc = problem.weak_convexity_modulus();
        if (wc.rho > 0.0 && problem.linear_bound_constants().L1 > 0.0) {
            trace.warnings.emplace_back(
                "FixedHorizon without a step cap on a weakly convex problem with L1 > 0; running uncapped");
        }
    }

    Rng rng(config.seed);
    ResidualState state = problem.init_state(x0);
    RunningAverages averages(problem.dim());
    Vector zeta(problem.num_residuals());
    Vector rbuf(partition.max_block_size());
    Vector xbuf(partition.max_block_size());
    trace.initial_objective = problem.objective(state);

    for (std::int64_t k = 0; k < T; ++k) {
        const Index i = static_cast<Index>(uniform_block_index(rng, static_cast<std::uint64_t>(N)));
        const Block blk = partition.block(i);
        const double alpha = step_size(config.schedule, k);
        averages.advance(alpha);

        problem.outer_subgradient(state, zeta);
        auto r = rbuf.head(blk.size);
        problem.block_subgradient(state, zeta, blk, r);
        if (!r.allFinite()) throw DivergedError(k);

        if (k % config.record_every == 0) {
            IterationRecord rec;
            rec.k = k;
            rec.block = i;
            rec.alpha = alpha;
            rec.f = problem.objective(state);
            rec.step_norm = alpha * r.norm();
            if (!std::isfinite(rec.f)) throw DivergedError(k);
            if (config.observer) config.observer(IterateView{k, state.x, averages}, rec);
            trace.records.push_back(rec);
        }

        averages.commit(blk, state.x);
        auto xnew = xbuf.head(blk.size);
        xnew = state.x.segment(blk.begin, blk.size) - alpha * r;
        if (!xnew.allFinite()) throw DivergedError(k);
        problem.state_update(state, blk, xnew);

        if ((k + 1) % resync_every == 0) state = problem.init_state(state.x);
    }

    trace.final_x = state.x;
    trace.final_objective = problem.objective(state.x);
    if (!std::isfinite(trace.final_objective)) throw DivergedError(T);
    if (T > 0) {
        IterationRecord last;
        last.k = T;
        last.block = -1;
        last.f = problem.objective(state);
        if (config.observer) config.observer(IterateView{T, state.x, averages}, last);
        trace.records.push_back(last);
        trace.weighted_average = averages.weighted(state.x);
        trace.plain_average = averages.plain(state.x);
    }
    trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return trace;
}

SolverTrace subgrad_run(const CompositeProblem& problem, const SolverConfig& config, const Vector& x0) {
    // A single block covering all coordinates: every step is a full subgradient step.
    SolverConfig cfg = config;
    cfg.epoch_size = 1;
    return rcs_run(problem, BlockPartition(problem.dim(), 1), cfg, x0);
}

Vector weighted_average_iterate(const SolverTrace& trace) {
    if (!trace.weighted_average) throw ConfigError("trace has no iterations to average");
    return *trace.weighted_average;
}

Vector plain_average_iterate(const SolverTrace& trace) {
    if (!trace.plain_average) throw ConfigError("trace has no iterations to average");
    return *trace.plain_average;
}

}  // namespace rcs

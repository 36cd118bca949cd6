#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include "rcs/app.hpp"
#include "rcs/diagnostics.hpp"
#include "rcs/errors.hpp"
#include "rcs/moreau.hpp"
#include "rcs/problems.hpp"
#include "rcs/rng.hpp"

namespace rcs::app {

namespace {

struct BestTracker {
    const CompositeProblem& problem;
    double f = std::numeric_limits<double>::infinity();
    Vector x;

    void consider(const Vector& cand, double value) {
        if (value < f) {
            f = value;
            x = cand;
        }
    }
    void consider(const Vector& cand) { consider(cand, problem.objective(cand)); }
};

void track_run(BestTracker& best, const CompositeProblem& problem, const StepSchedule& schedule,
               std::int64_t budget, const Vector& x0) {
    SolverConfig cfg;
    cfg.schedule = schedule;
    cfg.total_iterations = budget;
    cfg.record_every = std::max<std::int64_t>(1, budget / 2000);
    cfg.observer = [&best](const IterateView& view, IterationRecord& rec) {
        if (rec.f < best.f) best.consider(view.x, rec.f);
    };
    const SolverTrace trace = subgrad_run(problem, cfg, x0);
    best.consider(trace.final_x);
    if (trace.weighted_average) best.consider(*trace.weighted_average);
}

}  // namespace

ReferenceSolution compute_reference(const CompositeProblem& problem, bool convex, const ReferenceOptions& opt) {
    if (opt.budget < 1) throw ConfigError("reference budget must be positive");
    if (opt.starts < 1) throw ConfigError("reference needs at least one start");
    BestTracker best{problem, std::numeric_limits<double>::infinity(), Vector()};
    for (int s = 0; s < opt.starts; ++s) {
        Vector x0 = Vector::Zero(problem.dim());
        if (s > 0) {
            Rng rng(opt.seed + static_cast<std::uint64_t>(s));
            for (Index j = 0; j < x0.size(); ++j) x0[j] = rng.normal();
        }
        best.consider(x0);
        track_run(best, problem, SqrtLog{opt.delta}, opt.budget, x0);
    }
    const bool tail = convex && opt.kappa3.has_value();
    if (tail) track_run(best, problem, QuadraticGrowth{1, *opt.kappa3}, opt.budget, Vector(best.x));

    ReferenceSolution ref;
    ref.f_star = best.f;
    ref.x_ref = best.x;
    ref.provenance = {
        {"method", tail ? "subgrad-sqrtlog+qg-tail" : "subgrad-sqrtlog"},
        {"iterations", opt.budget},
        {"seed_count", opt.starts},
        {"delta", opt.delta},
        {"kappa3", opt.kappa3 ? json(*opt.kappa3) : json(nullptr)},
        {"seed", opt.seed},
    };
    return ref;
}

bool ExperimentResult::any_diverged() const {
    return std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.diverged; });
}

std::size_t sweep_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RCS_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
    }
    return n;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const LoadedProblem& loaded) {
    const CompositeProblem& problem = *loaded.problem;
    const SolverSpec& s = cfg.solver;
    if (s.method != "rcs" && s.method != "subgrad") throw ConfigError("method must be rcs or subgrad");
    if (s.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (s.seeds.empty()) throw ConfigError("no seeds given");
    if (cfg.diag.env_every < 0) throw ConfigError("env-every must be >= 0");

    ExperimentResult result;
    result.family = loaded.family;
    const std::int64_t d = problem.dim();
    result.N = s.method == "subgrad" ? 1 : (s.blocks > 0 ? s.blocks : d);
    const BlockPartition partition(d, result.N);
    result.total_iterations = s.epochs * result.N;

    MoreauConfig mcfg = default_moreau_config(problem);
    if (cfg.diag.lambda) mcfg.lambda = *cfg.diag.lambda;
    mcfg.inner_budget = cfg.diag.inner_budget;
    if (cfg.diag.env_every > 0) check_lambda(mcfg.lambda, *mcfg.rho);

    SolverConfig base;
    base.schedule = make_schedule(s, result.N, result.total_iterations);
    base.total_iterations = result.total_iterations;
    base.record_every = s.record_every > 0 ? s.record_every : result.N;
    const Vector x0 = initial_point(problem, loaded.family, s);

    result.runs.resize(s.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t idx = next++; idx < s.seeds.size(); idx = next++) {
            RunResult& rr = result.runs[idx];
            rr.seed = s.seeds[idx];
            SolverConfig sc = base;
            sc.seed = rr.seed;
            if (cfg.diag.env_every > 0) {
                auto count = std::make_shared<std::int64_t>(0);
                sc.observer = [&problem, mcfg, count, every = cfg.diag.env_every,
                               T = result.total_iterations](const IterateView& view, IterationRecord& rec) {
                    if ((*count)++ % every != 0 && view.k != T) return;
                    const EnvelopeGradientNorm e = envelope_gradient_norm(problem, view.x, mcfg);
                    rec.env_grad = e.norm;
                    rec.env_gap = e.certified_gap;
                };
            }
            try {
                rr.trace = rcs_run(problem, partition, sc, x0);
            } catch (const DivergedError& e) {
                rr.diverged = true;
                rr.diverged_at = e.iteration();
                rr.error = e.what();
            } catch (const std::exception& e) {
                rr.error = e.what();
            }
        }
    };
    const std::size_t nthreads = std::min(sweep_threads(), s.seeds.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (const RunResult& rr : result.runs) {
        if (!rr.error.empty() && !rr.diverged) throw Error("seed " + std::to_string(rr.seed) + ": " + rr.error);
    }
    return result;
}

json diagnose(const CompositeProblem& problem, const std::string& family, const DiagnoseOptions& opt) {
    MoreauConfig mcfg = default_moreau_config(problem);
    if (opt.lambda) mcfg.lambda = *opt.lambda;
    mcfg.inner_budget = opt.inner_budget;
    const double rho = problem.weak_convexity_modulus().rho;
    check_lambda(mcfg.lambda, rho);

    const auto* pr = dynamic_cast<const PhaseRetrievalProblem*>(&problem);
    json out = {{"family", family}, {"lambda", mcfg.lambda}, {"rho", rho}};

    std::optional<double> B2;
    if (pr) {
        try {
            B2 = critical_set_bound_pr(*pr);
            out["B2"] = *B2;
        } catch (const NotApplicableError& e) {
            out["B2"] = nullptr;
            out["B2_error"] = e.what();
        }
    }

    json points = json::array();
    for (std::size_t i = 0; i < opt.points.size(); ++i) {
        const Vector& x = opt.points[i];
        const ProxResult prox = prox_estimate(problem, x, mcfg);
        json p = {
            {"label", i < opt.labels.size() ? opt.labels[i] : "point" + std::to_string(i)},
            {"f", problem.objective(x)},
            {"norm_x", x.norm()},
            {"envelope_value", prox.envelope_value},
            {"env_grad", prox.envelope_gradient.norm()},
            {"env_grad_error", prox.gradient_error},
            {"certified_gap", prox.certified_gap},
            {"inner_method", prox.method},
        };
        if (pr) {
            p["min_norm_subgradient"] = min_norm_subgradient_pr(*pr, x);
            if (B2) p["within_2B2"] = x.norm() <= 2.0 * *B2;
        }
        points.push_back(p);
    }
    out["points"] = points;

    if (opt.reference && opt.subregularity_samples > 0) {
        std::vector<Vector> refs{opt.reference->x_ref};
        if (pr) refs.push_back(-opt.reference->x_ref);
        const double radius = (pr && B2 && *B2 > 0.0) ? 10.0 * *B2 : std::max(1.0, opt.reference->x_ref.norm());
        Rng rng(opt.seed);
        std::vector<Vector> samples;
        for (int k = 0; k < opt.subregularity_samples; ++k) {
            Vector dir(problem.dim());
            for (Index j = 0; j < dir.size(); ++j) dir[j] = rng.normal();
            const Vector center = pr ? Vector::Zero(problem.dim()) : opt.reference->x_ref;
            samples.push_back(center + radius * rng.uniform01() * dir.normalized());
        }
        const ResidualKind kind = pr ? ResidualKind::MinNormSubgradient : ResidualKind::EnvelopeGradient;
        const SubregularityReport rep = subregularity_probe(problem, refs, samples, kind, mcfg);
        json recs = json::array();
        for (const auto& r : rep.records) {
            recs.push_back({{"dist", r.dist_to_reference}, {"residual", r.residual}, {"ratio", r.ratio}});
        }
        out["subregularity"] = {
            {"residual", pr ? "min_norm_subgradient" : "envelope_gradient"},
            {"sup_ratio", rep.sup_ratio},
            {"records", recs},
        };
    }
    return out;
}

}  // namespace rcs::app

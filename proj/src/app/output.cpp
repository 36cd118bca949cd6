#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "rcs/app.hpp"
#include "rcs/errors.hpp"

namespace rcs::app {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vec_from_json(const json& j) {
    const auto vals = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

}  // namespace

void write_trace_csv(std::ostream& os, const SolverTrace& trace, std::int64_t epoch_size,
                     std::optional<double> f_star) {
    os << "k,epoch,block,alpha,f,gap,step_norm,env_grad,env_gap\n";
    for (const IterationRecord& r : trace.records) {
        const bool terminal = r.block < 0;
        os << r.k << ',' << num(static_cast<double>(r.k) / static_cast<double>(epoch_size)) << ',';
        if (!terminal) os << r.block;
        os << ',';
        if (!terminal) os << num(r.alpha);
        os << ',' << num(r.f) << ',';
        if (f_star) os << num(r.f - *f_star);
        os << ',';
        if (!terminal) os << num(r.step_norm);
        os << ',';
        if (r.env_grad) os << num(*r.env_grad);
        os << ',';
        if (r.env_gap) os << num(*r.env_gap);
        os << '\n';
    }
}

std::string per_seed_path(const std::string& path, std::uint64_t seed, bool sweep) {
    if (!sweep || path.empty()) return path;
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / p.stem();
    out += ".seed" + std::to_string(seed);
    out += p.extension();
    return out.string();
}

json run_summary(const ExperimentConfig& cfg, const ExperimentResult& result, const LoadedProblem& loaded,
                 const std::optional<ReferenceSolution>& reference) {
    const CompositeProblem& problem = *loaded.problem;
    const auto wc = problem.weak_convexity_modulus();
    const auto lb = problem.linear_bound_constants();
    json runs = json::array();
    double sum_f = 0.0, sum_gap = 0.0, min_f = 0.0, max_f = 0.0;
    std::size_t ok = 0, diverged = 0;
    for (const RunResult& rr : result.runs) {
        json r = {{"seed", rr.seed}, {"status", rr.diverged ? "diverged" : "ok"}};
        if (rr.diverged) {
            ++diverged;
            r["diverged_at"] = rr.diverged_at;
            r["message"] = rr.error;
            runs.push_back(r);
            continue;
        }
        const SolverTrace& t = rr.trace;
        r["diverged_at"] = nullptr;
        r["initial_objective"] = t.initial_objective;
        r["final_objective"] = t.final_objective;
        r["final_gap"] = reference ? json(t.final_objective - reference->f_star) : json(nullptr);
        r["wall_time"] = t.wall_time;
        r["workspace_bytes_per_iter"] = t.workspace_bytes_per_iter;
        r["iterations"] = t.iterations;
        r["records"] = t.records.size();
        json env = json::array();
        for (const IterationRecord& rec : t.records) {
            if (rec.env_grad) env.push_back({{"k", rec.k}, {"env_grad", *rec.env_grad}, {"env_gap", *rec.env_gap}});
        }
        r["env_grad_trace"] = env;
        r["final_x"] = vec_json(t.final_x);
        r["warnings"] = t.warnings;
        runs.push_back(r);

        if (ok == 0) min_f = max_f = t.final_objective;
        min_f = std::min(min_f, t.final_objective);
        max_f = std::max(max_f, t.final_objective);
        sum_f += t.final_objective;
        if (reference) sum_gap += t.final_objective - reference->f_star;
        ++ok;
    }
    json agg = {{"completed_runs", ok}, {"diverged_runs", diverged}};
    if (ok > 0) {
        agg["mean_final_objective"] = sum_f / static_cast<double>(ok);
        agg["min_final_objective"] = min_f;
        agg["max_final_objective"] = max_f;
        agg["mean_final_gap"] = reference ? json(sum_gap / static_cast<double>(ok)) : json(nullptr);
    }
    return {
        {"schema_version", 1},
        {"command", "run"},
        {"config", to_json(cfg)},
        {"problem",
         {{"family", loaded.family},
          {"n", problem.num_residuals()},
          {"d", problem.dim()},
          {"N", result.N},
          {"rho", wc.rho},
          {"L1", lb.L1},
          {"L2", lb.L2}}},
        {"reference", reference ? json{{"f_star", reference->f_star}, {"provenance", reference->provenance}}
                                : json(nullptr)},
        {"epochs", cfg.solver.epochs},
        {"total_iterations", result.total_iterations},
        {"runs", runs},
        {"aggregate", agg},
    };
}

json reference_to_json(const ReferenceSolution& ref) {
    return {{"f_star", ref.f_star}, {"x_ref", vec_json(ref.x_ref)}, {"provenance", ref.provenance}};
}

ReferenceSolution reference_from_json(const json& j) {
    ReferenceSolution ref;
    try {
        ref.f_star = j.at("f_star").get<double>();
        ref.x_ref = vec_from_json(j.at("x_ref"));
        ref.provenance = j.value("provenance", json::object());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("reference file: ") + e.what());
    }
    return ref;
}

ReferenceSolution read_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return reference_from_json(j);
}

}  // namespace rcs::app

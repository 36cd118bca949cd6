#include <algorithm>
#include <charconv>

#include "rcs/app.hpp"
#include "rcs/errors.hpp"
#include "rcs/problems.hpp"
#include "rcs/rng.hpp"

namespace rcs::app {

namespace {

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

template <class T>
void read_val(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

template <class T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    auto parse = [&](std::string_view s) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw ConfigError("bad seed range '" + text + "' (expected N or A..B)");
        }
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) return {parse(text)};
    const std::uint64_t a = parse(std::string_view(text).substr(0, dots));
    const std::uint64_t b = parse(std::string_view(text).substr(dots + 2));
    if (b < a) throw ConfigError("seed range '" + text + "' is empty");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
    return out;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("problem")) {
            const json& p = j["problem"];
            read_val(p, "data", cfg.problem.data);
            read_val(p, "family", cfg.problem.family);
            read_val(p, "loss", cfg.problem.loss);
            read_val(p, "p", cfg.problem.p);
            read_val(p, "p1", cfg.problem.p1);
            read_val(p, "p2", cfg.problem.p2);
        }
        if (j.contains("solver")) {
            const json& s = j["solver"];
            read_val(s, "method", cfg.solver.method);
            read_val(s, "blocks", cfg.solver.blocks);
            read_val(s, "schedule", cfg.solver.schedule);
            read_opt(s, "delta", cfg.solver.delta);
            read_opt(s, "kappa3", cfg.solver.kappa3);
            read_opt(s, "cap", cfg.solver.cap);
            read_val(s, "epochs", cfg.solver.epochs);
            if (s.contains("seeds")) {
                if (s["seeds"].is_string()) {
                    cfg.solver.seeds = parse_seed_range(s["seeds"].get<std::string>());
                } else {
                    cfg.solver.seeds = s["seeds"].get<std::vector<std::uint64_t>>();
                }
            }
            if (s.contains("seed")) cfg.solver.seeds = {s["seed"].get<std::uint64_t>()};
            read_val(s, "record_every", cfg.solver.record_every);
            read_val(s, "init", cfg.solver.init);
            read_val(s, "init_scale", cfg.solver.init_scale);
            read_val(s, "init_seed", cfg.solver.init_seed);
        }
        if (j.contains("diagnostics")) {
            const json& d = j["diagnostics"];
            read_opt(d, "lambda", cfg.diag.lambda);
            read_val(d, "env_every", cfg.diag.env_every);
            read_val(d, "inner_budget", cfg.diag.inner_budget);
        }
        if (j.contains("output")) {
            const json& o = j["output"];
            read_val(o, "csv", cfg.output.csv);
            read_val(o, "summary", cfg.output.summary);
            read_val(o, "reference", cfg.output.reference);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    return {
        {"problem",
         {{"data", cfg.problem.data},
          {"family", cfg.problem.family},
          {"loss", cfg.problem.loss},
          {"p", cfg.problem.p},
          {"p1", cfg.problem.p1},
          {"p2", cfg.problem.p2}}},
        {"solver",
         {{"method", cfg.solver.method},
          {"blocks", cfg.solver.blocks},
          {"schedule", cfg.solver.schedule},
          {"delta", opt_json(cfg.solver.delta)},
          {"kappa3", opt_json(cfg.solver.kappa3)},
          {"cap", opt_json(cfg.solver.cap)},
          {"epochs", cfg.solver.epochs},
          {"seeds", cfg.solver.seeds},
          {"record_every", cfg.solver.record_every},
          {"init", cfg.solver.init},
          {"init_scale", cfg.solver.init_scale},
          {"init_seed", cfg.solver.init_seed}}},
        {"diagnostics",
         {{"lambda", opt_json(cfg.diag.lambda)},
          {"env_every", cfg.diag.env_every},
          {"inner_budget", cfg.diag.inner_budget}}},
        {"output",
         {{"csv", cfg.output.csv}, {"summary", cfg.output.summary}, {"reference", cfg.output.reference}}},
    };
}

std::unique_ptr<CompositeProblem> make_problem(const Dataset& data, const std::string& family,
                                               const ProblemSpec& spec) {
    if (family == "mestimator") {
        if (spec.loss == "l1") return std::make_unique<MEstimatorProblem>(data.A, data.b, spec.p2, L1Loss{});
        if (spec.loss == "mcp") {
            return std::make_unique<MEstimatorProblem>(data.A, data.b, spec.p2, McpLoss{spec.p1});
        }
        throw ConfigError("unknown loss '" + spec.loss + "' (expected l1 or mcp)");
    }
    if (family == "svm") return std::make_unique<SvmProblem>(data.A, data.b, spec.p);
    if (family == "pr") return std::make_unique<PhaseRetrievalProblem>(data.A, data.b);
    throw ConfigError("unknown problem family '" + family + "' (expected mestimator, svm or pr)");
}

bool is_convex_family(const std::string& family, const ProblemSpec& spec) {
    return family == "svm" || (family == "mestimator" && spec.loss == "l1");
}

LoadedProblem load_problem(const ProblemSpec& spec) {
    if (spec.data.empty()) throw ConfigError("no dataset given (--data)");
    LoadedProblem out;
    out.data = read_dataset(spec.data);
    out.family = spec.family.empty() ? out.data.family : spec.family;
    if (out.family.empty()) throw ConfigError("dataset has no family; pass --family");
    out.problem = make_problem(out.data, out.family, spec);
    return out;
}

Vector initial_point(const CompositeProblem& problem, const std::string& family, const SolverSpec& spec) {
    std::string init = spec.init;
    // x = 0 is a stationary point of the phase-retrieval objective.
    if (init == "auto") init = family == "pr" ? "random" : "zero";
    if (init == "zero") return Vector::Zero(problem.dim());
    if (init == "random") {
        Rng rng(spec.init_seed);
        Vector x(problem.dim());
        for (Index j = 0; j < x.size(); ++j) x[j] = spec.init_scale * rng.normal();
        return x;
    }
    throw ConfigError("unknown init '" + spec.init + "' (expected zero, random or auto)");
}

StepSchedule make_schedule(const SolverSpec& spec, std::int64_t N, std::int64_t total_iterations) {
    if (spec.schedule == "sqrtlog") {
        if (!spec.delta) throw ConfigError("sqrtlog schedule needs --delta");
        return SqrtLog{*spec.delta};
    }
    if (spec.schedule == "qg") {
        if (!spec.kappa3) throw ConfigError("qg schedule needs --kappa3");
        return QuadraticGrowth{N, *spec.kappa3};
    }
    if (spec.schedule == "fixed") {
        if (!spec.delta) throw ConfigError("fixed schedule needs --delta");
        return FixedHorizon{*spec.delta, std::max<std::int64_t>(total_iterations, 1), spec.cap};
    }
    throw ConfigError("unknown schedule '" + spec.schedule + "' (expected sqrtlog, qg or fixed)");
}

}  // namespace rcs::app

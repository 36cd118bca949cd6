#include <doctest.h>

#include <sstream>

#include "rcs/app.hpp"
#include "rcs/errors.hpp"
#include "rcs/problems.hpp"
#include "rcs/rng.hpp"

using namespace rcs;
using namespace rcs::app;

namespace {

LoadedProblem svm_problem(Index n, Index d, std::uint64_t seed) {
    SvmGenConfig g;
    g.n = n;
    g.d = d;
    g.seed = seed;
    const SvmData sd = generate_svm_data(g);
    LoadedProblem lp;
    lp.data = Dataset{"svm", sd.A, sd.labels, std::nullopt, {}};
    lp.family = "svm";
    ProblemSpec spec;
    lp.problem = make_problem(lp.data, "svm", spec);
    return lp;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("seed ranges") {
    CHECK(parse_seed_range("7") == std::vector<std::uint64_t>{7});
    CHECK(parse_seed_range("2..5") == std::vector<std::uint64_t>{2, 3, 4, 5});
    CHECK_THROWS_AS(parse_seed_range("5..2"), ConfigError);
    CHECK_THROWS_AS(parse_seed_range("x"), ConfigError);
    CHECK_THROWS_AS(parse_seed_range(""), ConfigError);
}

TEST_CASE("config json round trip") {
    ExperimentConfig cfg;
    cfg.problem.data = "a.rcsd";
    cfg.problem.loss = "mcp";
    cfg.solver.schedule = "fixed";
    cfg.solver.delta = 0.7;
    cfg.solver.cap = 0.01;
    cfg.solver.epochs = 12;
    cfg.solver.seeds = {3, 4};
    cfg.diag.lambda = 0.25;
    cfg.diag.env_every = 2;
    const ExperimentConfig back = config_from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(back.solver.cap == 0.01);
    CHECK_FALSE(back.solver.kappa3.has_value());
}

TEST_CASE("problem construction and schedules") {
    const auto lp = svm_problem(10, 4, 1);
    CHECK(lp.problem->family() == "svm");
    ProblemSpec spec;
    CHECK(is_convex_family("svm", spec));
    CHECK(is_convex_family("mestimator", spec));
    spec.loss = "mcp";
    CHECK_FALSE(is_convex_family("mestimator", spec));
    CHECK_FALSE(is_convex_family("pr", spec));
    CHECK_THROWS_AS(make_problem(lp.data, "lasso", spec), ConfigError);
    spec.loss = "huber";
    CHECK_THROWS_AS(make_problem(lp.data, "mestimator", spec), ConfigError);

    SolverSpec s;
    CHECK_THROWS_AS(make_schedule(s, 4, 10), ConfigError);
    s.delta = 2.0;
    CHECK(std::holds_alternative<SqrtLog>(make_schedule(s, 4, 10)));
    s.schedule = "fixed";
    CHECK(std::get<FixedHorizon>(make_schedule(s, 4, 10)).T == 10);
    s.schedule = "qg";
    CHECK_THROWS_AS(make_schedule(s, 4, 10), ConfigError);
    s.kappa3 = 3.0;
    CHECK(std::get<QuadraticGrowth>(make_schedule(s, 4, 10)).N == 4);
}

TEST_CASE("initial points") {
    const auto lp = svm_problem(10, 4, 1);
    SolverSpec s;
    CHECK(initial_point(*lp.problem, "svm", s).isZero(0.0));
    CHECK_FALSE(initial_point(*lp.problem, "pr", s).isZero(0.0));
    s.init = "random";
    s.init_scale = 0.0;
    CHECK(initial_point(*lp.problem, "svm", s).isZero(0.0));
    s.init = "bogus";
    CHECK_THROWS_AS(initial_point(*lp.problem, "svm", s), ConfigError);
}

TEST_CASE("experiments are reproducible across thread counts") {
    const auto lp = svm_problem(30, 6, 2);
    ExperimentConfig cfg;
    cfg.solver.delta = 1.0;
    cfg.solver.epochs = 50;
    cfg.solver.seeds = {0, 1, 2, 3};
    cfg.diag.env_every = 10;
    const ExperimentResult a = run_experiment(cfg, lp);
    CHECK(a.N == 6);
    CHECK(a.total_iterations == 300);
    CHECK_FALSE(a.any_diverged());
    cfg.solver.seeds = {2};
    const ExperimentResult b = run_experiment(cfg, lp);
    CHECK(a.runs[2].trace.final_x == b.runs[0].trace.final_x);

    std::ostringstream csv;
    write_trace_csv(csv, a.runs[0].trace, a.N, 0.1);
    const auto lines = lines_of(csv.str());
    CHECK(lines.front() == "k,epoch,block,alpha,f,gap,step_norm,env_grad,env_gap");
    CHECK(lines.size() == 1 + 51);
    CHECK(lines[1].rfind("0,0,", 0) == 0);
    CHECK(lines.back().rfind("300,50,,,", 0) == 0);
    // Probes run on every 10th record and at the final iterate.
    int probed = 0;
    for (const auto& r : a.runs[0].trace.records) probed += r.env_grad.has_value();
    CHECK(probed == 6);

    const json summary = run_summary(cfg, a, lp, std::nullopt);
    CHECK(summary["schema_version"] == 1);
    CHECK(summary["runs"].size() == 4);
    CHECK(summary["aggregate"]["completed_runs"] == 4);
    CHECK(summary["reference"].is_null());
    CHECK(summary["problem"]["N"] == 6);
}

TEST_CASE("divergence is reported per run") {
    LoadedProblem lp;
    Rng rng(5);
    Matrix A(20, 4);
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
    lp.data = Dataset{"pr", A, Vector::Ones(20), std::nullopt, {}};
    lp.family = "pr";
    lp.problem = make_problem(lp.data, "pr", ProblemSpec{});
    ExperimentConfig cfg;
    cfg.solver.delta = 1e8;
    cfg.solver.epochs = 500;
    cfg.solver.seeds = {0, 1};
    const ExperimentResult r = run_experiment(cfg, lp);
    CHECK(r.any_diverged());
    CHECK(r.runs[0].diverged_at >= 0);
    const json summary = run_summary(cfg, r, lp, std::nullopt);
    CHECK(summary["runs"][0]["status"] == "diverged");
    CHECK(summary["aggregate"]["diverged_runs"] == 2);
}

TEST_CASE("invalid lambda for probes is rejected") {
    LoadedProblem lp;
    Rng rng(6);
    Matrix A(20, 4);
    for (Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
    lp.data = Dataset{"pr", A, Vector::Ones(20), std::nullopt, {}};
    lp.family = "pr";
    lp.problem = make_problem(lp.data, "pr", ProblemSpec{});
    ExperimentConfig cfg;
    cfg.solver.delta = 0.1;
    cfg.solver.epochs = 5;
    cfg.diag.env_every = 1;
    cfg.diag.lambda = 2.0 / lp.problem->weak_convexity_modulus().rho;
    CHECK_THROWS_AS(run_experiment(cfg, lp), LambdaError);
}

TEST_CASE("references") {
    const MEstimatorProblem absx(Matrix::Ones(1, 1), Vector::Constant(1, 2.0), 0.0);
    ReferenceOptions opt;
    opt.budget = 20000;
    opt.starts = 3;
    const ReferenceSolution ref = compute_reference(absx, true, opt);
    CHECK(ref.f_star <= 1e-2);
    CHECK(std::abs(ref.x_ref[0] - 2.0) <= 1e-2);
    const ReferenceSolution back = reference_from_json(reference_to_json(ref));
    CHECK(back.f_star == ref.f_star);
    CHECK(back.x_ref == ref.x_ref);
    CHECK(back.provenance == ref.provenance);
    CHECK_THROWS_AS(reference_from_json(json::object()), ConfigError);
}

TEST_CASE("per-seed output paths") {
    CHECK(per_seed_path("out/trace.csv", 3, true) == "out/trace.seed3.csv");
    CHECK(per_seed_path("out/trace.csv", 3, false) == "out/trace.csv");
    CHECK(per_seed_path("", 3, true).empty());
}

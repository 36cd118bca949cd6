#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/data_io.hpp"
#include "rcs/oracle.hpp"
#include "rcs/solver.hpp"

namespace rcs::app {

using nlohmann::json;

struct ProblemSpec {
    std::string data;           // container path
    std::string family;         // empty: take it from the sidecar
    std::string loss = "l1";    // m-estimator loss: "l1" or "mcp"
    double p = 0.1;             // svm regularization
    double p1 = 1.0;            // mcp parameter
    double p2 = 0.01;           // m-estimator l1 penalty
};

struct SolverSpec {
    std::string method = "rcs";     // "rcs" or "subgrad"
    std::int64_t blocks = 0;        // 0 means N = d
    std::string schedule = "sqrtlog";  // "sqrtlog", "qg", "fixed"
    std::optional<double> delta;
    std::optional<double> kappa3;
    std::optional<double> cap;
    std::int64_t epochs = 0;
    std::vector<std::uint64_t> seeds{0};
    std::int64_t record_every = 0;  // iterations; 0 means once per epoch
    std::string init = "auto";      // "zero", "random" or "auto" (random for phase retrieval)
    double init_scale = 1.0;
    std::uint64_t init_seed = 12345;
};

struct DiagSpec {
    std::optional<double> lambda;
    std::int64_t env_every = 0;  // probe every k-th record; 0 disables probing
    std::int64_t inner_budget = 5000;
};

struct OutputSpec {
    std::string csv;
    std::string summary;
    std::string reference;  // reference JSON to read (gap columns)
};

struct ExperimentConfig {
    ProblemSpec problem;
    SolverSpec solver;
    DiagSpec diag;
    OutputSpec output;
};

ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& cfg);
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

struct LoadedProblem {
    Dataset data;
    std::string family;
    std::unique_ptr<CompositeProblem> problem;
};

LoadedProblem load_problem(const ProblemSpec& spec);
std::unique_ptr<CompositeProblem> make_problem(const Dataset& data, const std::string& family,
                                               const ProblemSpec& spec);
bool is_convex_family(const std::string& family, const ProblemSpec& spec);

struct ReferenceSolution {
    double f_star = 0.0;
    Vector x_ref;
    json provenance;
};

struct ReferenceOptions {
    std::int64_t budget = 100000;
    int starts = 5;
    double delta = 1.0;
    std::optional<double> kappa3;
    std::uint64_t seed = 0;
};

// Full subgradient runs with SqrtLog steps from several starts, plus a
// QuadraticGrowth tail for convex problems when kappa3 is given.
ReferenceSolution compute_reference(const CompositeProblem& problem, bool convex, const ReferenceOptions& opt);
json reference_to_json(const ReferenceSolution& ref);
ReferenceSolution reference_from_json(const json& j);
ReferenceSolution read_reference(const std::string& path);

Vector initial_point(const CompositeProblem& problem, const std::string& family, const SolverSpec& spec);
StepSchedule make_schedule(const SolverSpec& spec, std::int64_t N, std::int64_t total_iterations);

struct RunResult {
    std::uint64_t seed = 0;
    SolverTrace trace;
    bool diverged = false;
    std::int64_t diverged_at = -1;
    std::string error;
};

struct ExperimentResult {
    std::vector<RunResult> runs;
    std::int64_t N = 1;
    std::int64_t total_iterations = 0;
    std::string family;
    bool any_diverged() const;
};

// Runs every seed; seeds execute in parallel up to the RCS_THREADS cap.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const LoadedProblem& loaded);
std::size_t sweep_threads();

void write_trace_csv(std::ostream& os, const SolverTrace& trace, std::int64_t epoch_size,
                     std::optional<double> f_star);
json run_summary(const ExperimentConfig& cfg, const ExperimentResult& result, const LoadedProblem& loaded,
                 const std::optional<ReferenceSolution>& reference);
std::string per_seed_path(const std::string& path, std::uint64_t seed, bool sweep);

struct DiagnoseOptions {
    std::optional<double> lambda;
    std::int64_t inner_budget = 5000;
    std::vector<Vector> points;
    std::vector<std::string> labels;
    std::optional<ReferenceSolution> reference;
    int subregularity_samples = 0;
    std::uint64_t seed = 0;
};

json diagnose(const CompositeProblem& problem, const std::string& family, const DiagnoseOptions& opt);

}  // namespace rcs::app

// rcs: dataset generation, reference optima, solver runs and diagnostics.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rcs/app.hpp"
#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

using namespace rcs;
using namespace rcs::app;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;

void write_json(const std::string& path, const json& j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot write " + path);
    os << j.dump(2) << '\n';
}

std::vector<Vector> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Vector> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ParseError("bad number '" + cell + "' in " + path, lineno);
            }
        }
        pts.emplace_back(Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size())));
    }
    return pts;
}

struct ProblemFlags {
    ProblemSpec spec;
    CLI::Option* data = nullptr;
    CLI::Option* family = nullptr;
    CLI::Option* loss = nullptr;
    CLI::Option* p = nullptr;
    CLI::Option* p1 = nullptr;
    CLI::Option* p2 = nullptr;

    void add(CLI::App* sub) {
        data = sub->add_option("--data", spec.data, "Dataset container path");
        family = sub->add_option("--family", spec.family, "Problem family: mestimator, svm, pr");
        loss = sub->add_option("--loss", spec.loss, "M-estimator loss: l1 or mcp");
        p = sub->add_option("--p", spec.p, "SVM regularization");
        p1 = sub->add_option("--p1", spec.p1, "MCP parameter");
        p2 = sub->add_option("--p2", spec.p2, "M-estimator l1 penalty");
    }

    void apply(ProblemSpec& out) const {
        if (data->count()) out.data = spec.data;
        if (family->count()) out.family = spec.family;
        if (loss->count()) out.loss = spec.loss;
        if (p->count()) out.p = spec.p;
        if (p1->count()) out.p1 = spec.p1;
        if (p2->count()) out.p2 = spec.p2;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized coordinate subgradient toolkit"};
    app.require_subcommand(1);

    // ------------------------------------------------------------ datagen
    auto* datagen = app.add_subcommand("datagen", "Generate a synthetic dataset");
    datagen->require_subcommand(1);
    std::string out_path;
    bool force = false;
    std::uint64_t seed = 0;
    double pfail = 0.0;

    MEstimatorGenConfig mcfg;
    auto* gen_m = datagen->add_subcommand("mestimator", "Sparse regression with gross outliers");
    gen_m->add_option("--n", mcfg.n, "Rows")->required();
    gen_m->add_option("--d", mcfg.d, "Columns")->required();
    gen_m->add_option("--s", mcfg.s, "Nonzeros in x*")->required();
    gen_m->add_option("--pfail", pfail, "Outlier fraction")->required();

    Index pr_d = 0, pr_m = 1;
    std::optional<std::uint64_t> design_seed;
    std::string truth_pgm;
    bool clip = false;
    auto* gen_pr = datagen->add_subcommand("pr", "Phase retrieval with a Hadamard design");
    gen_pr->add_option("--d", pr_d, "Signal length (power of two)")->required();
    gen_pr->add_option("--m", pr_m, "Number of sign patterns")->required();
    gen_pr->add_option("--pfail", pfail, "Outlier fraction")->required();
    gen_pr->add_option("--design-seed", design_seed, "Seed for the sign patterns (default: --seed)");
    gen_pr->add_option("--truth", truth_pgm, "Plain PGM image used as x*");
    gen_pr->add_flag("--clip-outliers", clip, "Floor negative outlier values at 0");

    SvmGenConfig scfg;
    auto* gen_svm = datagen->add_subcommand("svm", "Linearly separable classification data");
    gen_svm->add_option("--n", scfg.n, "Rows")->required();
    gen_svm->add_option("--d", scfg.d, "Columns")->required();

    for (auto* sub : {gen_m, gen_pr, gen_svm}) {
        sub->add_option("--seed", seed, "Generator seed");
        sub->add_option("--out", out_path, "Output container path")->required();
        sub->add_flag("--force", force, "Overwrite existing files");
    }

    // ---------------------------------------------------------- reference
    auto* reference = app.add_subcommand("reference", "Estimate f* by long full-subgradient runs");
    ProblemFlags ref_problem;
    ref_problem.add(reference);
    ReferenceOptions ref_opt;
    std::string ref_out;
    reference->add_option("--budget", ref_opt.budget, "Iterations per start");
    reference->add_option("--starts", ref_opt.starts, "Number of starting points");
    reference->add_option("--delta", ref_opt.delta, "SqrtLog delta");
    reference->add_option("--kappa3", ref_opt.kappa3, "Quadratic-growth constant for the convex tail");
    reference->add_option("--seed", ref_opt.seed, "Seed for random starts");
    reference->add_option("--out", ref_out, "Reference JSON path (default stdout)");

    // ---------------------------------------------------------------- run
    auto* run = app.add_subcommand("run", "Run RCS or the full subgradient method");
    ProblemFlags run_problem;
    run_problem.add(run);
    std::string config_path, seeds_text;
    SolverSpec sflags;
    DiagSpec dflags;
    OutputSpec oflags;
    std::uint64_t single_seed = 0;
    run->add_option("--config", config_path, "JSON config; flags override it");
    auto* o_method = run->add_option("--method", sflags.method, "rcs or subgrad");
    auto* o_blocks = run->add_option("--blocks", sflags.blocks, "Block count N (default d)");
    auto* o_sched = run->add_option("--schedule", sflags.schedule, "sqrtlog, qg or fixed");
    auto* o_delta = run->add_option("--delta", sflags.delta, "Step scale delta");
    auto* o_k3 = run->add_option("--kappa3", sflags.kappa3, "Quadratic-growth constant");
    auto* o_cap = run->add_option("--cap", sflags.cap, "Step cap for the fixed schedule");
    auto* o_epochs = run->add_option("--epochs", sflags.epochs, "Epochs (N iterations each)");
    auto* o_seed = run->add_option("--seed", single_seed, "Sampling seed");
    auto* o_seeds = run->add_option("--seeds", seeds_text, "Seed sweep A..B, run in parallel");
    auto* o_rec = run->add_option("--record-every", sflags.record_every, "Record spacing in iterations");
    auto* o_init = run->add_option("--init", sflags.init, "zero, random or auto");
    auto* o_iscale = run->add_option("--init-scale", sflags.init_scale, "Std of the random start");
    auto* o_iseed = run->add_option("--init-seed", sflags.init_seed, "Seed of the random start");
    auto* o_lambda = run->add_option("--lambda", dflags.lambda, "Moreau parameter (default 1/(2 rho))");
    auto* o_env = run->add_option("--env-every", dflags.env_every, "Probe envelope gradient every k-th record");
    auto* o_inner = run->add_option("--inner-budget", dflags.inner_budget, "Inner prox iterations");
    auto* o_csv = run->add_option("--csv", oflags.csv, "Trace CSV path");
    auto* o_summary = run->add_option("--summary", oflags.summary, "Summary JSON path");
    auto* o_ref = run->add_option("--reference", oflags.reference, "Reference JSON (enables gap columns)");

    // ----------------------------------------------------------- diagnose
    auto* diag = app.add_subcommand("diagnose", "Envelope gradients, B2 and subregularity ratios");
    ProblemFlags diag_problem;
    diag_problem.add(diag);
    std::string diag_summary, diag_points, diag_ref, diag_out;
    DiagnoseOptions dopt;
    diag->add_option("--summary", diag_summary, "Run summary whose final iterates are probed");
    diag->add_option("--points", diag_points, "CSV file, one point per line");
    diag->add_option("--reference", diag_ref, "Reference JSON for subregularity ratios");
    diag->add_option("--lambda", dopt.lambda, "Moreau parameter (default 1/(2 rho))");
    diag->add_option("--inner-budget", dopt.inner_budget, "Inner prox iterations");
    diag->add_option("--subregularity", dopt.subregularity_samples, "Number of subregularity samples");
    diag->add_option("--seed", dopt.seed, "Seed for subregularity samples");
    diag->add_option("--out", diag_out, "Diagnostics JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (datagen->parsed()) {
            Dataset ds;
            if (gen_m->parsed()) {
                mcfg.p_fail = pfail;
                mcfg.seed = seed;
                MEstimatorData m = generate_mestimator_data(mcfg);
                ds = {"mestimator", std::move(m.A), std::move(m.b), std::move(m.x_star),
                      {{"generator", "mestimator"}, {"n", mcfg.n}, {"d", mcfg.d}, {"s", mcfg.s},
                       {"p_fail", pfail}, {"seed", seed}, {"outliers", m.outliers}}};
            } else if (gen_pr->parsed()) {
                const HadamardDesign design = HadamardDesign::make(pr_d, pr_m, design_seed.value_or(seed));
                Vector x_star(pr_d);
                if (!truth_pgm.empty()) {
                    const GrayImage img = read_pgm(truth_pgm);
                    if (img.pixels.size() != pr_d) {
                        throw ConfigError("truth image has " + std::to_string(img.pixels.size()) +
                                          " pixels, expected d=" + std::to_string(pr_d));
                    }
                    x_star = img.pixels;
                } else {
                    // Truth draws come after the outlier stream's seed space.
                    Rng rng(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
                    for (Index j = 0; j < pr_d; ++j) x_star[j] = rng.normal();
                }
                PhaseRetrievalData p = generate_pr_data(design, x_star, pfail, seed, clip);
                ds = {"pr", std::move(p.A), std::move(p.b_sq), x_star,
                      {{"generator", "pr"}, {"d", pr_d}, {"m", pr_m}, {"p_fail", pfail}, {"seed", seed},
                       {"design_seed", design.seed}, {"clip_outliers", clip},
                       {"truth", truth_pgm.empty() ? json("gaussian") : json(truth_pgm)},
                       {"outliers", p.outliers}}};
            } else {
                scfg.seed = seed;
                SvmData s = generate_svm_data(scfg);
                ds = {"svm", std::move(s.A), std::move(s.labels), std::move(s.w_star),
                      {{"generator", "svm"}, {"n", scfg.n}, {"d", scfg.d}, {"seed", seed}}};
            }
            write_dataset(out_path, ds, force);
            std::cerr << "wrote " << out_path << " (n=" << ds.A.rows() << ", d=" << ds.A.cols() << ")\n";
            return kExitOk;
        }

        if (reference->parsed()) {
            ProblemSpec spec;
            ref_problem.apply(spec);
            const LoadedProblem lp = load_problem(spec);
            const ReferenceSolution ref =
                compute_reference(*lp.problem, is_convex_family(lp.family, spec), ref_opt);
            write_json(ref_out, reference_to_json(ref));
            return kExitOk;
        }

        if (run->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw IoError("cannot open " + config_path);
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw ConfigError(config_path + ": " + e.what());
                }
                cfg = config_from_json(j);
            }
            run_problem.apply(cfg.problem);
            SolverSpec& s = cfg.solver;
            if (o_method->count()) s.method = sflags.method;
            if (o_blocks->count()) s.blocks = sflags.blocks;
            if (o_sched->count()) s.schedule = sflags.schedule;
            if (o_delta->count()) s.delta = sflags.delta;
            if (o_k3->count()) s.kappa3 = sflags.kappa3;
            if (o_cap->count()) s.cap = sflags.cap;
            if (o_epochs->count()) s.epochs = sflags.epochs;
            if (o_seed->count()) s.seeds = {single_seed};
            if (o_seeds->count()) s.seeds = parse_seed_range(seeds_text);
            if (o_rec->count()) s.record_every = sflags.record_every;
            if (o_init->count()) s.init = sflags.init;
            if (o_iscale->count()) s.init_scale = sflags.init_scale;
            if (o_iseed->count()) s.init_seed = sflags.init_seed;
            if (o_lambda->count()) cfg.diag.lambda = dflags.lambda;
            if (o_env->count()) cfg.diag.env_every = dflags.env_every;
            if (o_inner->count()) cfg.diag.inner_budget = dflags.inner_budget;
            if (o_csv->count()) cfg.output.csv = oflags.csv;
            if (o_summary->count()) cfg.output.summary = oflags.summary;
            if (o_ref->count()) cfg.output.reference = oflags.reference;

            const LoadedProblem lp = load_problem(cfg.problem);
            std::optional<ReferenceSolution> ref;
            if (!cfg.output.reference.empty()) ref = read_reference(cfg.output.reference);

            const ExperimentResult result = run_experiment(cfg, lp);
            const bool sweep = result.runs.size() > 1;
            if (!cfg.output.csv.empty()) {
                for (const RunResult& rr : result.runs) {
                    if (rr.diverged) continue;
                    const std::string path = per_seed_path(cfg.output.csv, rr.seed, sweep);
                    std::ofstream os(path, std::ios::trunc);
                    if (!os) throw IoError("cannot write " + path);
                    write_trace_csv(os, rr.trace, rr.trace.epoch_size,
                                    ref ? std::optional<double>(ref->f_star) : std::nullopt);
                }
            }
            const json summary = run_summary(cfg, result, lp, ref);
            if (!cfg.output.summary.empty() || cfg.output.csv.empty()) write_json(cfg.output.summary, summary);
            for (const RunResult& rr : result.runs) {
                for (const auto& w : rr.trace.warnings) std::cerr << "warning (seed " << rr.seed << "): " << w << '\n';
                if (rr.diverged) std::cerr << "seed " << rr.seed << ": " << rr.error << '\n';
            }
            return result.any_diverged() ? kExitDiverged : kExitOk;
        }

        if (diag->parsed()) {
            ProblemSpec spec;
            if (!diag_summary.empty()) {
                std::ifstream in(diag_summary);
                if (!in) throw IoError("cannot open " + diag_summary);
                json j;
                in >> j;
                spec = config_from_json(j.at("config")).problem;
                for (const auto& r : j.at("runs")) {
                    if (!r.contains("final_x")) continue;
                    const auto v = r["final_x"].get<std::vector<double>>();
                    dopt.points.emplace_back(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
                    dopt.labels.push_back("final_x seed " + std::to_string(r["seed"].get<std::uint64_t>()));
                }
            }
            diag_problem.apply(spec);
            const LoadedProblem lp = load_problem(spec);
            if (!diag_points.empty()) {
                for (Vector& v : read_points_csv(diag_points)) {
                    dopt.labels.push_back(diag_points + ":" + std::to_string(dopt.points.size()));
                    dopt.points.push_back(std::move(v));
                }
            }
            if (!diag_ref.empty()) dopt.reference = read_reference(diag_ref);
            write_json(diag_out, diagnose(*lp.problem, lp.family, dopt));
            return kExitOk;
        }
    } catch (const DivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}

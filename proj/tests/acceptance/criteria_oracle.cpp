#include <cmath>
#include <cstring>
#include <functional>
#include <memory>

#include "acceptance.hpp"
#include "oracles.hpp"
#include "rcs/partition.hpp"
#include "rcs/schedules.hpp"
#include "rcs/solver.hpp"

namespace acceptance {

using namespace rcs;

namespace {

struct Family {
    const char* name;
    std::function<std::unique_ptr<CompositeProblem>(Rng&, Index, Index)> make;
    std::function<Vector(const CompositeProblem&, const Vector&)> dense;
};

template <class P>
Vector dense_of(const CompositeProblem& p, const Vector& x) {
    return testing::dense_subgradient(static_cast<const P&>(p), x);
}

const std::vector<Family>& families() {
    static const std::vector<Family> fams = {
        {"mestimator-l1",
         [](Rng& r, Index n, Index d) {
             return std::make_unique<MEstimatorProblem>(testing::random_mestimator(r, n, d, false));
         },
         dense_of<MEstimatorProblem>},
        {"mestimator-mcp",
         [](Rng& r, Index n, Index d) {
             return std::make_unique<MEstimatorProblem>(testing::random_mestimator(r, n, d, true));
         },
         dense_of<MEstimatorProblem>},
        {"svm", [](Rng& r, Index n, Index d) { return std::make_unique<SvmProblem>(testing::random_svm(r, n, d)); },
         dense_of<SvmProblem>},
        {"pr",
         [](Rng& r, Index n, Index d) { return std::make_unique<PhaseRetrievalProblem>(testing::random_pr(r, n, d)); },
         dense_of<PhaseRetrievalProblem>},
    };
    return fams;
}

Index draw(Rng& rng, Index lo, Index hi) { return lo + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1))); }

bool same_trace(const SolverTrace& a, const SolverTrace& b) {
    if (a.records.size() != b.records.size()) return false;
    auto eq = [](double u, double v) { return std::memcmp(&u, &v, sizeof u) == 0; };
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto &p = a.records[i], &q = b.records[i];
        if (p.k != q.k || p.block != q.block || !eq(p.alpha, q.alpha) || !eq(p.f, q.f) || !eq(p.step_norm, q.step_norm))
            return false;
    }
    return std::memcmp(a.final_x.data(), b.final_x.data(), sizeof(double) * a.final_x.size()) == 0;
}

}  // namespace

Outcome criterion_oracle_equivalence() {
    Rng rng(101);
    double worst = 0.0;
    for (const Family& fam : families()) {
        for (int t = 0; t < 100; ++t) {
            const Index n = draw(rng, 1, 50), d = draw(rng, 1, 50);
            const auto p = fam.make(rng, n, d);
            const BlockPartition part(d, draw(rng, 1, d));
            const Vector x = testing::random_vector(rng, d);
            const ResidualState st = p->init_state(x);
            const Vector zeta = p->outer_subgradient(st);
            std::vector<Vector> blocks;
            for (Index i = 0; i < part.count(); ++i) blocks.push_back(p->block_subgradient(st, zeta, part.block(i)));
            const Vector agg = aggregate_blocks(blocks, part);
            const Vector ref = fam.dense(*p, x);
            worst = std::max(worst, (agg - ref).norm() / std::max(ref.norm(), 1e-300));
        }
    }
    return verdict(worst <= 1e-10, fmt("400 instances, worst relative error %.2e (tol 1e-10)", worst));
}

Outcome criterion_n1_reduction() {
    Rng rng(102);
    int identical = 0;
    for (const Family& fam : families()) {
        const auto p = fam.make(rng, 40, 25);
        const Vector x0 = testing::random_vector(rng, 25);
        SolverConfig cfg;
        cfg.schedule = SqrtLog{0.5};
        cfg.total_iterations = 1000;
        cfg.seed = 17;
        identical += same_trace(rcs_run(*p, BlockPartition(25, 1), cfg, x0), subgrad_run(*p, cfg, x0));
    }
    return verdict(identical == 4, fmt("%d/4 families bit-identical over 1000 iterations", identical));
}

Outcome criterion_residual_fidelity() {
    Rng rng(103);
    double worst = 0.0;
    for (const Family& fam : families()) {
        const Index d = 30;
        const auto p = fam.make(rng, 45, d);
        const BlockPartition part(d, 7);
        Vector x = testing::random_vector(rng, d);
        ResidualState st = p->init_state(x);
        for (int k = 0; k < 1000; ++k) {
            const Block b = part.block(static_cast<Index>(uniform_block_index(rng, part.count())));
            const Vector xb = testing::random_vector(rng, b.size);
            p->state_update(st, b, xb);
        }
        const ResidualState fresh = p->init_state(st.x);
        worst = std::max(worst, (st.s - fresh.s).norm() / std::max(fresh.s.norm(), 1e-300));
    }
    return verdict(worst <= 1e-8, fmt("worst relative drift after 1000 updates %.2e (tol 1e-8)", worst));
}

Outcome criterion_weak_convexity() {
    Rng rng(104);
    double worst = -INFINITY;
    for (const Family& fam : families()) {
        const auto p = fam.make(rng, 30, 10);
        const double rho = p->weak_convexity_modulus().rho;
        for (int t = 0; t < 200; ++t) {
            const double scale = std::pow(10.0, -1.0 + 2.0 * rng.uniform01());
            const Vector x = testing::random_vector(rng, 10, scale);
            const Vector y = testing::random_vector(rng, 10, scale);
            const Vector nu = p->subgradient(x);
            const double slack = p->objective(x) + nu.dot(y - x) - 0.5 * rho * (x - y).squaredNorm() - p->objective(y);
            worst = std::max(worst, slack);
        }
    }
    return verdict(worst <= 1e-8, fmt("800 triples, largest violation %.2e (tol 1e-8)", worst));
}

Outcome criterion_linear_bound() {
    Rng rng(105);
    double worst = -INFINITY;
    for (const Family& fam : families()) {
        const auto p = fam.make(rng, 30, 12);
        const auto c = p->linear_bound_constants();
        const BlockPartition part(12, 4);
        for (int t = 0; t < 200; ++t) {
            Vector x = testing::random_vector(rng, 12);
            x *= 1e3 * rng.uniform01() / x.norm();
            const ResidualState st = p->init_state(x);
            const Vector zeta = p->outer_subgradient(st);
            const double bound = c.L1 * x.norm() + c.L2;
            worst = std::max(worst, p->subgradient(x).norm() - bound);
            for (Index i = 0; i < part.count(); ++i) {
                worst = std::max(worst, p->block_subgradient(st, zeta, part.block(i)).norm() - bound);
            }
        }
    }
    return verdict(worst <= 1e-8, fmt("800 points with |x| <= 1e3, largest excess %.2e (tol 1e-8)", worst));
}

Outcome criterion_schedules() {
    bool ok = true;
    std::string detail;
    for (double delta : {0.1, 1.0, 7.5}) {
        double sum = 0.0;
        for (std::int64_t k = 0; k < 1000000; ++k) {
            const double a = sqrt_log_step(k, delta);
            sum += a * a;
        }
        const double bound = sqrt_log_square_sum_bound(delta);
        ok = ok && sum <= bound;
        detail += fmt("delta=%g: sum %.4f <= %.4f; ", delta, sum, bound);
    }
    const std::vector<StepSchedule> all = {SqrtLog{2.0}, QuadraticGrowth{8, 3.0}, FixedHorizon{1.0, 1000, std::nullopt},
                                           FixedHorizon{5.0, 1000, 0.05}};
    bool shape = true;
    for (const StepSchedule& s : all) {
        double prev = INFINITY;
        for (std::int64_t k = 0; k <= 1000; ++k) {
            const double a = step_size(s, k);
            shape = shape && a > 0.0 && std::isfinite(a) && a <= prev;
            prev = a;
        }
        for (std::int64_t k = 1000; k < 1000000000; k *= 7) {
            if (std::holds_alternative<FixedHorizon>(s)) break;
            const double a = step_size(s, k);
            shape = shape && a > 0.0 && a <= prev;
            prev = a;
        }
    }
    detail += shape ? "all variants positive and nonincreasing" : "positivity/monotonicity violated";
    return verdict(ok && shape, detail);
}

}  // namespace acceptance

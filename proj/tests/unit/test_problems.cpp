#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "rcs/errors.hpp"
#include "rcs/problems.hpp"

using namespace rcs;
using rcs::testing::dense_subgradient;

namespace {

Matrix eye(Index d) { return Matrix::Identity(d, d); }

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

template <class P>
void check_aggregation(const P& p, const Vector& x, Index N) {
    const BlockPartition part(p.dim(), N);
    const ResidualState st = p.init_state(x);
    const Vector zeta = p.outer_subgradient(st);
    std::vector<Vector> blocks;
    for (Index i = 0; i < N; ++i) blocks.push_back(p.block_subgradient(st, zeta, part.block(i)));
    const Vector agg = aggregate_blocks(blocks, part);
    const Vector dense = dense_subgradient(p, x);
    CHECK((agg - dense).norm() <= 1e-10 * std::max(1.0, dense.norm()));
}

template <class P>
void check_residual_after_updates(const P& p, Rng& rng, const std::function<Vector(const Vector&)>& truth) {
    const Index d = p.dim();
    const BlockPartition part(d, std::max<Index>(1, d / 3));
    ResidualState st = p.init_state(testing::random_vector(rng, d));
    for (int t = 0; t < 1000; ++t) {
        const Block b = part.block(static_cast<Index>(rng.uniform_index(part.count())));
        p.state_update(st, b, testing::random_vector(rng, b.size));
    }
    const Vector fresh = truth(st.x);
    CHECK((st.s - fresh).lpNorm<Eigen::Infinity>() <= 1e-8 * std::max(1.0, fresh.lpNorm<Eigen::Infinity>()));
}

}  // namespace

TEST_CASE("objective examples") {
    const PhaseRetrievalProblem pr(eye(2), vec({1, 1}));
    CHECK(pr.objective(vec({2, 0})) == 2.0);

    Matrix a(1, 2);
    a << 1, 0;
    const SvmProblem svm(a, vec({1}), 2.0);
    CHECK(svm.objective(vec({1, 0})) == 1.0);

    const MEstimatorProblem m(eye(1), vec({0}), 1.0);
    CHECK(m.objective(vec({0})) == 0.0);
    CHECK_THROWS_AS(m.objective(vec({0, 1})), DimensionError);
}

TEST_CASE("MCP loss values and selection") {
    CHECK(mcp_value(0.5, 1.0) == doctest::Approx(0.375));
    CHECK(mcp_value(3.0, 1.0) == 0.5);
    CHECK(mcp_value(-1.0, 1.0) == 0.5);
    CHECK(mcp_derivative(1.0, 1.0) == 0.0);  // boundary of the flat region
    CHECK(mcp_derivative(0.0, 1.0) == 0.0);
    CHECK(mcp_derivative(-0.5, 1.0) == doctest::Approx(-0.5));
    CHECK(mcp_derivative(2.0, 1.0) == 0.0);

    const MEstimatorProblem m(eye(1), vec({0}), 0.0, McpLoss{0.7});
    const ResidualState st = m.init_state(vec({0.7}));
    CHECK(m.outer_subgradient(st)[0] == 0.0);
}

TEST_CASE("outer subgradient selections") {
    const PhaseRetrievalProblem pr(eye(2), vec({1, 1}));
    const Vector z = pr.outer_subgradient(pr.init_state(vec({2, 0})));
    CHECK(z[0] == 2.0);
    CHECK(z[1] == 0.0);

    Matrix a = Matrix::Zero(3, 1);
    a << 1, 0.5, 2;
    const SvmProblem svm(a, vec({1, 1, 1}), 1.0);
    // x = 1 gives s = (0, 0.5, -1).
    const ResidualState st = svm.init_state(vec({1}));
    CHECK(st.s[0] == 0.0);
    CHECK(st.s[1] == 0.5);
    CHECK(st.s[2] == -1.0);
    const Vector zs = svm.outer_subgradient(st);
    CHECK(zs[0] == 0.0);
    CHECK(zs[1] == doctest::Approx(1.0 / 3.0));
    CHECK(zs[2] == 0.0);
}

TEST_CASE("block subgradient examples") {
    const MEstimatorProblem m(eye(2), vec({0, 0}), 0.5);
    const ResidualState st = m.init_state(vec({1, -2}));
    const Vector r = m.block_subgradient(st, m.outer_subgradient(st), Block{0, 1});
    CHECK(r.size() == 1);
    CHECK(r[0] == 1.0);

    Rng rng(3);
    const SvmProblem svm = testing::random_svm(rng, 12, 7);
    const Vector x = testing::random_vector(rng, 7);
    const ResidualState ss = svm.init_state(x);
    const Vector full = svm.block_subgradient(ss, svm.outer_subgradient(ss), Block{0, 7});
    CHECK((full - dense_subgradient(svm, x)).norm() <= 1e-12);

    const PhaseRetrievalProblem pr = testing::random_pr(rng, 16, 6);
    const ResidualState sp = pr.init_state(Vector::Zero(6));
    const BlockPartition part(6, 3);
    for (Index i = 0; i < 3; ++i) CHECK(pr.block_subgradient(sp, pr.outer_subgradient(sp), part.block(i)).isZero(0.0));
}

TEST_CASE("oracle equivalence on random instances") {
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const Index n = 1 + static_cast<Index>(rng.uniform_index(50));
        const Index d = 1 + static_cast<Index>(rng.uniform_index(50));
        const Index N = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(d)));
        const Vector x = testing::random_vector(rng, d);
        check_aggregation(testing::random_mestimator(rng, n, d, false), x, N);
        check_aggregation(testing::random_mestimator(rng, n, d, true), x, N);
        check_aggregation(testing::random_svm(rng, n, d), x, N);
        check_aggregation(testing::random_pr(rng, n, d), x, N);
    }
}

TEST_CASE("state updates keep the residual consistent") {
    Rng rng(17);
    const MEstimatorProblem m = testing::random_mestimator(rng, 20, 50, false);
    check_residual_after_updates(m, rng, [&](const Vector& x) { return Vector(m.A() * x - m.b()); });
    const SvmProblem svm = testing::random_svm(rng, 20, 50);
    check_residual_after_updates(svm, rng, [&](const Vector& x) {
        return Vector(Vector::Ones(20) - svm.A_tilde() * x);
    });
    const PhaseRetrievalProblem pr = testing::random_pr(rng, 20, 50);
    check_residual_after_updates(pr, rng, [&](const Vector& x) { return Vector(pr.A() * x); });

    ResidualState st = m.init_state(testing::random_vector(rng, 50));
    const Vector before = st.s;
    m.state_update(st, Block{3, 4}, st.x.segment(3, 4));
    CHECK(st.s == before);
}

TEST_CASE("single updates match recomputation to 1e-10") {
    Rng rng(19);
    const MEstimatorProblem m = testing::random_mestimator(rng, 20, 50, false);
    ResidualState st = m.init_state(testing::random_vector(rng, 50));
    m.state_update(st, Block{10, 5}, testing::random_vector(rng, 5));
    CHECK((st.s - (m.A() * st.x - m.b())).lpNorm<Eigen::Infinity>() <= 1e-10);

    const SvmProblem svm = testing::random_svm(rng, 20, 50);
    ResidualState ss = svm.init_state(testing::random_vector(rng, 50));
    svm.state_update(ss, Block{40, 10}, testing::random_vector(rng, 10));
    CHECK((ss.s - (Vector::Ones(20) - svm.A_tilde() * ss.x)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("weak convexity moduli") {
    Rng rng(23);
    CHECK(testing::random_svm(rng, 5, 3).weak_convexity_modulus().rho == 0.0);
    CHECK(testing::random_mestimator(rng, 5, 3, false).weak_convexity_modulus().rho == 0.0);

    const PhaseRetrievalProblem pr(eye(4), Vector::Ones(4));
    const auto wc = pr.weak_convexity_modulus();
    CHECK(wc.rho == doctest::Approx(2.0 / 4.0).epsilon(1e-6));
    CHECK(wc.provenance == ModulusProvenance::C1);

    const MEstimatorProblem mcp = testing::random_mestimator(rng, 30, 10, true);
    const double s = testing::dense_sigma_max(mcp.A());
    const double p1 = std::get<McpLoss>(mcp.loss()).p1;
    CHECK(mcp.weak_convexity_modulus().rho == doctest::Approx(s * s / (30.0 * p1)).epsilon(1e-5));
    CHECK(mcp.weak_convexity_modulus().provenance == ModulusProvenance::C2);
}

TEST_CASE("power iteration agrees with a dense SVD") {
    Rng rng(29);
    for (int t = 0; t < 10; ++t) {
        const Matrix A = testing::random_matrix(rng, 40, 25);
        CHECK(largest_singular_value(A).value == doctest::Approx(testing::dense_sigma_max(A)).epsilon(1e-5));
    }
    CHECK(largest_singular_value(Matrix::Zero(3, 2)).value == 0.0);
}

TEST_CASE("linear bound constants") {
    Rng rng(31);
    CHECK(testing::random_mestimator(rng, 10, 4, false).linear_bound_constants().L1 == 0.0);
    const auto pr = PhaseRetrievalProblem(eye(2), vec({1, 1})).linear_bound_constants();
    CHECK(pr.L1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pr.L2 == 0.0);
    Matrix a = testing::random_matrix(rng, 10, 4);
    CHECK(SvmProblem(a, testing::random_labels(rng, 10), 0.1).linear_bound_constants().L1 == 0.1);
}

namespace {

template <class P>
void check_weak_convexity(const P& p, Rng& rng, double scale) {
    const double rho = p.weak_convexity_modulus().rho;
    for (int t = 0; t < 200; ++t) {
        const Vector x = testing::random_vector(rng, p.dim(), scale);
        const Vector y = testing::random_vector(rng, p.dim(), scale);
        const Vector nu = p.subgradient(x);
        const double lhs = p.objective(y);
        const double rhs = p.objective(x) + nu.dot(y - x) - 0.5 * rho * (x - y).squaredNorm();
        CHECK(lhs >= rhs - 1e-8);
    }
}

template <class P>
void check_linear_bound(const P& p, Rng& rng) {
    const auto c = p.linear_bound_constants();
    for (int t = 0; t < 200; ++t) {
        Vector x = testing::random_vector(rng, p.dim());
        x *= 1000.0 * rng.uniform01() / x.norm();
        CHECK(p.subgradient(x).norm() <= c.L1 * x.norm() + c.L2 + 1e-8);
    }
}

}  // namespace

TEST_CASE("weak convexity inequality holds with the reported modulus") {
    Rng rng(37);
    for (double scale : {0.1, 1.0, 3.0}) {
        check_weak_convexity(testing::random_mestimator(rng, 30, 12, false), rng, scale);
        check_weak_convexity(testing::random_mestimator(rng, 30, 12, true), rng, scale);
        check_weak_convexity(testing::random_svm(rng, 30, 12), rng, scale);
        check_weak_convexity(testing::random_pr(rng, 30, 12), rng, scale);
    }
}

TEST_CASE("linearly bounded subgradients") {
    Rng rng(41);
    check_linear_bound(testing::random_mestimator(rng, 30, 12, false), rng);
    check_linear_bound(testing::random_mestimator(rng, 30, 12, true), rng);
    check_linear_bound(testing::random_svm(rng, 30, 12), rng);
    check_linear_bound(testing::random_pr(rng, 30, 12), rng);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(MEstimatorProblem(eye(2), vec({1}), 0.1), DimensionError);
    CHECK_THROWS_AS(MEstimatorProblem(eye(2), vec({1, 1}), -0.1), ConfigError);
    CHECK_THROWS_AS(MEstimatorProblem(eye(2), vec({1, 1}), 0.1, McpLoss{0.0}), ConfigError);
    CHECK_THROWS_AS(SvmProblem(eye(2), vec({1, 0}), 0.1), ConfigError);
    CHECK_THROWS_AS(SvmProblem(eye(2), vec({1, -1}), 0.0), ConfigError);
    Matrix bad = eye(2);
    bad(0, 0) = NAN;
    CHECK_THROWS_AS(PhaseRetrievalProblem(bad, vec({1, 1})), DimensionError);
}

TEST_CASE("SVM stores label-scaled rows") {
    Matrix a(2, 2);
    a << 1, 2, 3, 4;
    const SvmProblem svm(a, vec({1, -1}), 0.5);
    CHECK(svm.A_tilde()(0, 1) == 2.0);
    CHECK(svm.A_tilde()(1, 0) == -3.0);
}

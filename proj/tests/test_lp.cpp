#include <random>
#include <sstream>

#include "doctest.h"
#include "dmo/lp.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace dmo::lp;

namespace {

// min -3x - 2y  s.t.  x + y <= 4,  0 <= x <= 2,  y >= 0
Problem two_var_example() {
    Problem p;
    const auto x = p.add_variable(0.0, 2.0, -3.0, "x");
    const auto y = p.add_variable(0.0, kInf, -2.0, "y");
    p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 4.0);
    return p;
}

// Same polygon with y boxed so the vertex oracle (finite bounds) applies; y <= 4 is implied.
Problem two_var_example_boxed() {
    Problem p;
    const auto x = p.add_variable(0.0, 2.0, -3.0, "x");
    const auto y = p.add_variable(0.0, 4.0, -2.0, "y");
    p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 4.0);
    return p;
}

}  // namespace

TEST_CASE("vertex enumeration oracle on the worked example") {
    // Vertices (0,0) (2,0) (2,2) (0,4): objectives 0, -6, -10, -8.
    const auto best = dmo::oracle::enumerate_vertices(two_var_example_boxed());
    REQUIRE(best.has_value());
    CHECK(*best == doctest::Approx(-10.0));
}

TEST_CASE("solve: two-variable example") {
    const Problem p = two_var_example();
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[0] == doctest::Approx(2.0));
    CHECK(s.primal[1] == doctest::Approx(2.0));
    CHECK(s.objective == doctest::Approx(-10.0));
    // Relaxing x + y <= 4 by one unit buys one more y at -2.
    CHECK(s.duals[0] == doctest::Approx(-2.0));
    CHECK(s.reduced_costs[0] == doctest::Approx(-1.0));

    const KktReport k = check_kkt(p, s, 1e-9);
    CHECK(k.passed);
    CHECK(k.primal_violation <= 1e-9);
    CHECK(k.dual_violation <= 1e-9);
    CHECK(k.complementarity_violation <= 1e-9);
    CHECK(k.duality_gap <= 1e-9);
}

TEST_CASE("solve: single binding lower constraint") {
    Problem p;
    const auto x = p.add_variable(0.0, kInf, 1.0, "x");
    p.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 5.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[0] == doctest::Approx(5.0));
    CHECK(s.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("solve: contradictory rows are infeasible") {
    Problem p;
    const auto x = p.add_variable(-kInf, kInf, 0.0, "x");
    p.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 2.0);
    p.add_constraint({{x, 1.0}}, Relation::LessEqual, 1.0);
    const Solution s = solve(p);
    CHECK(s.status == Status::Infeasible);
    CHECK(s.infeasibility > 1e-9);
}

TEST_CASE("solve: ray without blocking bound is unbounded") {
    Problem p;
    p.add_variable(0.0, kInf, -1.0, "x");
    CHECK(solve(p).status == Status::Unbounded);
}

TEST_CASE("solve: free variables and equality rows") {
    // min x + 2y, x + y = 3, x - y = 1, both free -> x = 2, y = 1
    Problem p;
    const auto x = p.add_variable(-kInf, kInf, 1.0);
    const auto y = p.add_variable(-kInf, kInf, 2.0);
    p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::Equal, 3.0);
    p.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::Equal, 1.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[0] == doctest::Approx(2.0));
    CHECK(s.primal[1] == doctest::Approx(1.0));
    // y = (c_B B^-1): 1 = y1 + y2, 2 = y1 - y2
    CHECK(s.duals[0] == doctest::Approx(1.5));
    CHECK(s.duals[1] == doctest::Approx(-0.5));
}

TEST_CASE("solve: upper-bounded variable starts at upper bound") {
    Problem p;
    const auto x = p.add_variable(-kInf, 3.0, -1.0);
    p.add_constraint({{x, 1.0}}, Relation::LessEqual, 10.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal[0] == doctest::Approx(3.0));
    CHECK(s.reduced_costs[0] == doctest::Approx(-1.0));
}

TEST_CASE("solve: rejects malformed problems") {
    Problem p;
    p.add_variable(2.0, 1.0, 0.0);
    CHECK_THROWS_AS(solve(p), std::invalid_argument);

    Problem q;
    const auto x = q.add_variable(0.0, 1.0, 0.0);
    q.add_constraint({{x, 1.0}}, Relation::Equal, kInf);
    CHECK_THROWS_AS(solve(q), std::invalid_argument);

    SolverOptions bad;
    bad.tol_feas = 0.0;
    CHECK_THROWS_AS(solve(two_var_example(), bad), std::invalid_argument);
}

TEST_CASE("solve: iteration limit is reported, never optimal") {
    SolverOptions opt;
    opt.max_iterations = 1;
    const Solution s = solve(two_var_example(), opt);
    CHECK(s.status == Status::IterationLimit);
}

TEST_CASE("solve: degenerate cycling example terminates") {
    // Beale's classic cycling instance for Dantzig pricing.
    Problem p;
    const auto x1 = p.add_variable(0.0, kInf, -0.75);
    const auto x2 = p.add_variable(0.0, kInf, 150.0);
    const auto x3 = p.add_variable(0.0, kInf, -0.02);
    const auto x4 = p.add_variable(0.0, kInf, 6.0);
    p.add_constraint({{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, Relation::LessEqual, 0.0);
    p.add_constraint({{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, Relation::LessEqual, 0.0);
    p.add_constraint({{x3, 1.0}}, Relation::LessEqual, 1.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(-0.05));
    CHECK(check_kkt(p, s).passed);
}

TEST_CASE("solve: deterministic") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Problem p = dmo::testing::random_lp(rng);
        const Solution a = solve(p);
        const Solution b = solve(p);
        CHECK(a.status == b.status);
        CHECK(a.primal == b.primal);
        CHECK(a.duals == b.duals);
    }
}

TEST_CASE("solve: matches vertex enumeration on random small LPs") {
    std::mt19937_64 rng(20240611);
    int optimal = 0;
    int infeasible = 0;
    for (int i = 0; i < 150; ++i) {
        const Problem p = dmo::testing::random_lp(rng);
        const auto oracle = dmo::oracle::enumerate_vertices(p);
        const Solution s = solve(p);
        if (!oracle) {
            CHECK(s.status == Status::Infeasible);
            ++infeasible;
            continue;
        }
        REQUIRE(s.status == Status::Optimal);
        CHECK(std::abs(s.objective - *oracle) <= 1e-7);
        const KktReport k = check_kkt(p, s, 1e-9);
        CHECK(k.passed);
        CHECK(k.duality_gap <= 1e-9 * (1.0 + std::abs(s.objective)));
        ++optimal;
    }
    CHECK(optimal >= 100);
    MESSAGE("optimal " << optimal << ", infeasible " << infeasible);
}

TEST_CASE("check_kkt: detects an injected primal error") {
    const Problem p = two_var_example();
    Solution s = solve(p);
    s.primal[0] += 1e-3;
    const KktReport k = check_kkt(p, s, 1e-9);
    CHECK_FALSE(k.passed);
    CHECK(k.primal_violation == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("check_kkt: zero problem has zero gap") {
    Problem p;
    p.add_variable(0.0, 1.0, 0.0);
    p.add_variable(0.0, 1.0, 0.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    const KktReport k = check_kkt(p, s);
    CHECK(k.duality_gap == 0.0);
    CHECK(k.passed);
}

TEST_CASE("trace writes phase dumps") {
    std::ostringstream trace;
    SolverOptions opt;
    opt.trace = &trace;
    Problem p;
    const auto x = p.add_variable(0.0, kInf, 1.0);
    p.add_constraint({{x, 1.0}}, Relation::Equal, 2.0);
    REQUIRE(solve(p, opt).status == Status::Optimal);
    CHECK(trace.str().find("phase 1") != std::string::npos);
    CHECK(trace.str().find("phase 2") != std::string::npos);
}

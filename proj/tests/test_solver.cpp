#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "stegopt/solver.hpp"

using namespace stegopt;

namespace {

MilpProblem make_problem(std::size_t nvars) {
    MilpProblem p;
    p.objective.assign(nvars, 0.0);
    p.lower.assign(nvars, 0.0);
    p.upper.assign(nvars, 1.0);
    p.is_binary.assign(nvars, 0);
    return p;
}

// Exhaustive oracle for all-binary problems: walks the 2^k assignments.
struct BinaryOracle {
    bool feasible = false;
    double objective = 0;
    std::vector<double> values;
};

BinaryOracle enumerate_binary(const MilpProblem& p) {
    const std::size_t k = p.num_vars();
    BinaryOracle best;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<double> v(k);
        bool in_bounds = true;
        for (std::size_t j = 0; j < k; ++j) {
            v[j] = (mask >> j) & 1;
            if (v[j] < p.lower[j] - 1e-12 || v[j] > p.upper[j] + 1e-12) in_bounds = false;
        }
        if (!in_bounds) continue;
        bool ok = true;
        for (std::size_t r = 0; r < p.ineq_rows.size() && ok; ++r) {
            double lhs = 0;
            for (std::size_t j = 0; j < k; ++j) lhs += p.ineq_rows[r][j] * v[j];
            ok = lhs <= p.ineq_rhs[r] + 1e-9;
        }
        for (std::size_t r = 0; r < p.eq_rows.size() && ok; ++r) {
            double lhs = 0;
            for (std::size_t j = 0; j < k; ++j) lhs += p.eq_rows[r][j] * v[j];
            ok = std::abs(lhs - p.eq_rhs[r]) <= 1e-9;
        }
        if (!ok) continue;
        double obj = 0;
        for (std::size_t j = 0; j < k; ++j) obj += p.objective[j] * v[j];
        if (!best.feasible || obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.values = v;
        }
    }
    return best;
}

bool satisfies(const MilpProblem& p, const std::vector<double>& v, double tol) {
    for (std::size_t r = 0; r < p.ineq_rows.size(); ++r) {
        double lhs = 0;
        for (std::size_t j = 0; j < p.num_vars(); ++j) lhs += p.ineq_rows[r][j] * v[j];
        if (lhs > p.ineq_rhs[r] + tol) return false;
    }
    for (std::size_t r = 0; r < p.eq_rows.size(); ++r) {
        double lhs = 0;
        for (std::size_t j = 0; j < p.num_vars(); ++j) lhs += p.eq_rows[r][j] * v[j];
        if (std::abs(lhs - p.eq_rhs[r]) > tol) return false;
    }
    for (std::size_t j = 0; j < p.num_vars(); ++j)
        if (v[j] < p.lower[j] - tol || v[j] > p.upper[j] + tol) return false;
    return true;
}

}  // namespace

TEST_CASE("solve_lp handles the toy cases") {
    SUBCASE("maximize a single bounded variable") {
        MilpProblem p = make_problem(1);
        p.objective = {-1.0};
        p.ineq_rows = {{1.0}};
        p.ineq_rhs = {1.0};
        const auto s = solve_lp(p);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.values[0] == doctest::Approx(1.0));
        CHECK(s.objective == doctest::Approx(-1.0));
    }
    SUBCASE("covering pair") {
        MilpProblem p = make_problem(2);
        p.objective = {1.0, 1.0};
        p.ineq_rows = {{-1.0, -1.0}};
        p.ineq_rhs = {-1.0};
        const auto s = solve_lp(p);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.objective == doctest::Approx(1.0));
    }
    SUBCASE("contradictory constraints are infeasible") {
        MilpProblem p = make_problem(1);
        p.ineq_rows = {{1.0}, {-1.0}};
        p.ineq_rhs = {0.0, -1.0};  // v <= 0 and v >= 1
        CHECK(solve_lp(p).status == SolveStatus::Infeasible);
    }
    SUBCASE("upper bounds engage without explicit rows") {
        MilpProblem p = make_problem(2);
        p.objective = {-1.0, -0.5};
        p.ineq_rows = {{1.0, 1.0}};
        p.ineq_rhs = {1.5};
        const auto s = solve_lp(p);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.values[0] == doctest::Approx(1.0));
        CHECK(s.values[1] == doctest::Approx(0.5));
        CHECK(s.objective == doctest::Approx(-1.25));
    }
    SUBCASE("equality rows route through phase 1") {
        MilpProblem p = make_problem(3);
        p.objective = {1.0, 2.0, 3.0};
        p.eq_rows = {{1.0, 1.0, 1.0}};
        p.eq_rhs = {2.0};
        const auto s = solve_lp(p);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.objective == doctest::Approx(3.0));  // x0 = x1 = 1
    }
}

TEST_CASE("solve_milp matches exhaustive enumeration on a 12-item knapsack") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> value(1, 20), weight(1, 12);
    MilpProblem p = make_problem(12);
    p.is_binary.assign(12, 1);
    std::vector<double> w(12);
    for (std::size_t j = 0; j < 12; ++j) {
        p.objective[j] = -value(rng);  // maximize value
        w[j] = weight(rng);
    }
    p.ineq_rows = {w};
    p.ineq_rhs = {30.0};
    const auto s = solve_milp(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    const auto oracle = enumerate_binary(p);
    REQUIRE(oracle.feasible);
    CHECK(s.objective == doctest::Approx(oracle.objective));
    CHECK(satisfies(p, s.values, 1e-7));
}

TEST_CASE("integral relaxations do not branch") {
    // assignment-style one-hot system, totally unimodular
    MilpProblem p = make_problem(4);
    p.is_binary.assign(4, 1);
    p.objective = {3.0, 1.0, 2.0, 4.0};
    p.eq_rows = {{1.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 1.0}};
    p.eq_rhs = {1.0, 1.0};
    std::vector<NodeRecord> trace;
    const auto s = solve_milp(p, {}, &trace);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(trace.size() == 1);  // root only
}

TEST_CASE("contradictory one-hot system is infeasible") {
    MilpProblem p = make_problem(2);
    p.is_binary.assign(2, 1);
    p.eq_rows = {{1.0, 1.0}, {1.0, 1.0}};
    p.eq_rhs = {1.0, 0.0};
    CHECK(solve_milp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("solve_milp equals enumeration on random binary programs") {
    std::mt19937 rng(20260810);
    std::uniform_int_distribution<int> k_dist(3, 12), rows_dist(1, 20), coef(-5, 5), rhs(-4, 10),
        obj(-10, 10);
    int feasible_seen = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = k_dist(rng);
        MilpProblem p = make_problem(k);
        p.is_binary.assign(k, 1);
        for (std::size_t j = 0; j < k; ++j) p.objective[j] = obj(rng);
        const int rows = rows_dist(rng);
        for (int r = 0; r < rows; ++r) {
            std::vector<double> row(k);
            for (std::size_t j = 0; j < k; ++j) row[j] = coef(rng);
            p.ineq_rows.push_back(std::move(row));
            p.ineq_rhs.push_back(rhs(rng));
        }
        const auto oracle = enumerate_binary(p);
        std::vector<NodeRecord> trace;
        const auto s = solve_milp(p, {}, &trace);
        if (!oracle.feasible) {
            CHECK(s.status == SolveStatus::Infeasible);
            continue;
        }
        ++feasible_seen;
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
        CHECK(satisfies(p, s.values, 1e-7));
        REQUIRE(!trace.empty());
        if (trace.front().status == SolveStatus::Optimal)
            CHECK(trace.front().bound <= oracle.objective + 1e-6);  // root bound is global
    }
    CHECK(feasible_seen >= 10);
}

TEST_CASE("identical inputs give identical solution vectors") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> coef(-5, 5);
    MilpProblem p = make_problem(8);
    p.is_binary.assign(8, 1);
    for (auto& c : p.objective) c = coef(rng);
    for (int r = 0; r < 6; ++r) {
        std::vector<double> row(8);
        for (auto& c : row) c = coef(rng);
        p.ineq_rows.push_back(std::move(row));
        p.ineq_rhs.push_back(4.0);
    }
    const auto a = solve_milp(p);
    const auto b = solve_milp(p);
    REQUIRE(a.status == b.status);
    CHECK(a.values == b.values);  // bitwise identical
    CHECK(a.objective == b.objective);
}

TEST_CASE("LP-format dump is well formed") {
    MilpProblem p = make_problem(2);
    p.is_binary = {1, 0};
    p.objective = {1.0, -2.0};
    p.ineq_rows = {{1.0, 1.0}};
    p.ineq_rhs = {1.0};
    p.eq_rows = {{0.0, 1.0}};
    p.eq_rhs = {0.5};
    std::ostringstream out;
    write_lp_format(p, out);
    const std::string text = out.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("problem validation rejects inconsistent inputs") {
    MilpProblem p = make_problem(2);
    p.ineq_rows = {{1.0}};  // wrong row length
    p.ineq_rhs = {1.0};
    CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);

    MilpProblem q = make_problem(1);
    q.lower = {2.0};  // above upper
    CHECK_THROWS_AS(solve_lp(q), std::invalid_argument);
}

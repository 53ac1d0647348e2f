#ifndef STEGOPT_SOLVER_HPP
#define STEGOPT_SOLVER_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace stegopt {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

/// Standard-form container: minimize c.v subject to A.v <= b, E.v = d,
/// lo <= v <= hi, with a binary-integrality mask. All bounds must be finite.
struct MilpProblem {
    std::vector<double> objective;
    std::vector<std::vector<double>> ineq_rows;
    std::vector<double> ineq_rhs;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<char> is_binary;

    std::size_t num_vars() const { return objective.size(); }
    void validate() const;  // throws std::invalid_argument on inconsistency
};

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;
    double objective = 0;
};

struct SolverOptions {
    double feas_tol = 1e-7;
    double int_tol = 1e-6;
    int bland_after = 5000;   // pivots before switching to Bland's rule
    int max_pivots = 100000;  // per LP solve
    long node_cap = 1000000;  // branch-and-bound nodes
};

/// One branch-and-bound node, kept for auditing the search.
struct NodeRecord {
    std::vector<double> lower, upper;  // bounds in effect at the node
    SolveStatus status;                // LP relaxation outcome
    double bound;                      // LP relaxation objective (when solved)
};

/// Two-phase dense simplex with bounded variables on the integrality-relaxed
/// problem. Returns an optimal basic solution, Infeasible or Unbounded;
/// numerical failure surfaces as IterationLimit.
MilpSolution solve_lp(const MilpProblem& problem, const SolverOptions& options = {});

/// Branch-and-bound on the binary variables: best-first by relaxation bound,
/// branching on the most fractional binary, lowest index on ties, down-branch
/// first. Deterministic for identical inputs.
MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& options = {},
                        std::vector<NodeRecord>* trace = nullptr);

/// Plain-text LP-style dump for external cross-checking.
void write_lp_format(const MilpProblem& problem, std::ostream& out);

}  // namespace stegopt

#endif  // STEGOPT_SOLVER_HPP

#ifndef STEGOPT_MILP_HPP
#define STEGOPT_MILP_HPP

#include <cstddef>
#include <vector>

#include "stegopt/model.hpp"
#include "stegopt/solver.hpp"

namespace stegopt {

/// Variable ordering of the linearized problem: one block of theta+1 binaries
/// per value (one-hot for x_i), then all y^2 slacks, then all x*y slacks.
/// Total (n+1)(theta+3) variables.
struct VariableLayout {
    int n = 0;
    int theta = 0;

    std::size_t block_size() const { return static_cast<std::size_t>(theta) + 1; }
    std::size_t num_binaries() const { return (static_cast<std::size_t>(n) + 1) * block_size(); }
    std::size_t num_vars() const { return (static_cast<std::size_t>(n) + 1) * (theta + 3); }
    std::size_t block_start(int i) const { return static_cast<std::size_t>(i) * block_size(); }
    std::size_t z_square(int i) const { return num_binaries() + static_cast<std::size_t>(i); }
    std::size_t z_bilinear(int i) const {
        return num_binaries() + (static_cast<std::size_t>(n) + 1) + static_cast<std::size_t>(i);
    }
};

VariableLayout build_layout(int n, int theta);

/// One-hot encoding of a link vector over the layout's binary blocks.
std::vector<double> encode_onehot(const LinkVector& x, const VariableLayout& layout);

/// Recovers x_i = round(sum k * block_i[k]). Throws FractionalBlockError when
/// a block is not within tolerance of a one-hot vertex.
LinkVector decode_onehot(const std::vector<double>& values, const VariableLayout& layout,
                         double tol = 1e-6);

/// One linear cut, tagged with the anchor that produced it.
struct TaylorCut {
    int value_index = 0;
    int anchor_x = 0;
    int anchor_y = 0;
    std::vector<double> row;
    double rhs = 0;
};

/// Linear surrogate of the coding problem: static constraints plus the
/// current cut set. Square cuts accumulate (always-valid underestimators);
/// bilinear cuts are replaced per anchor unless configured otherwise.
struct LinearizedModel {
    VariableLayout layout;
    ProblemSpec spec;
    MilpProblem base;
    std::vector<TaylorCut> square_cuts;
    std::vector<TaylorCut> bilinear_cuts;

    MilpProblem assemble() const;
};

LinearizedModel build_base_model(const ProblemSpec& spec);

/// Appends cuts anchored at x_prev. Square cuts are deduplicated and kept;
/// bilinear cuts replace the previous set unless accumulate_bilinear is set.
/// Anchors with x = y = 0 produce no cut.
void add_taylor_cuts(LinearizedModel& model, const LinkVector& x_prev,
                     bool accumulate_bilinear = false);

struct IterationRecord {
    LinkVector x;
    double milp_objective = 0;  // surrogate objective value
    double true_distortion = 0;
    bool feasible = false;
};

struct IterateOptions {
    int max_iter = 20;
    bool accumulate_bilinear_cuts = false;
    SolverOptions solver;
};

struct IterateResult {
    LinkVector x;
    EvalResult eval;
    std::vector<IterationRecord> trace;
    int iterations = 0;      // MILP solves performed
    bool converged = false;  // incumbent verified unbeatable, not a budget stop
};

/// Iterative linearized solve: solve, decode, score against the true
/// nonlinear distortion, re-anchor cuts, repeat. Once the decoded vector
/// repeats (fixed point or cycle), remaining iterations verify the incumbent
/// against the square-cut-only surrogate with visited codings excluded; that
/// surrogate never overestimates, so closing the bound proves optimality.
/// Returns the best iterate by true distortion. Throws InfeasibleError when
/// the capacity constraint is unsatisfiable.
IterateResult iterate_optimize(const ProblemSpec& spec, const IterateOptions& options = {});

}  // namespace stegopt

#endif  // STEGOPT_MILP_HPP

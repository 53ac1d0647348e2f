#include "stegopt/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stegopt {

namespace {

// y_i expressed over the binary blocks: sum over j < i of k * X[j][k].
void add_y_terms(std::vector<double>& row, const VariableLayout& layout, int i, double scale) {
    for (int j = 0; j < i; ++j) {
        const std::size_t base = layout.block_start(j);
        for (int k = 1; k <= layout.theta; ++k) row[base + k] += scale * k;
    }
}

// x_i expressed over block i: sum of k * X[i][k].
void add_x_terms(std::vector<double>& row, const VariableLayout& layout, int i, double scale) {
    const std::size_t base = layout.block_start(i);
    for (int k = 1; k <= layout.theta; ++k) row[base + k] += scale * k;
}

}  // namespace

VariableLayout build_layout(int n, int theta) {
    if (n < 0 || theta < 0) throw std::invalid_argument("layout needs n >= 0 and theta >= 0");
    return VariableLayout{n, theta};
}

std::vector<double> encode_onehot(const LinkVector& x, const VariableLayout& layout) {
    if (x.size() != static_cast<std::size_t>(layout.n) + 1)
        throw DimensionMismatchError("link vector length must be n+1");
    std::vector<double> v(layout.num_vars(), 0.0);
    for (int i = 0; i <= layout.n; ++i) {
        if (x[i] < 0 || x[i] > layout.theta)
            throw std::invalid_argument("entry " + std::to_string(x[i]) + " outside [0,theta]");
        v[layout.block_start(i) + x[i]] = 1.0;
    }
    return v;
}

LinkVector decode_onehot(const std::vector<double>& values, const VariableLayout& layout,
                         double tol) {
    if (values.size() < layout.num_binaries())
        throw DimensionMismatchError("value vector shorter than the binary blocks");
    LinkVector x(layout.n + 1, 0);
    for (int i = 0; i <= layout.n; ++i) {
        const std::size_t base = layout.block_start(i);
        double sum = 0, dot = 0;
        for (int k = 0; k <= layout.theta; ++k) {
            const double v = values[base + k];
            if (v < -tol || v > 1 + tol || std::abs(v - std::round(v)) > tol)
                throw FractionalBlockError("block " + std::to_string(i) +
                                           " entry is not within tolerance of 0/1");
            sum += v;
            dot += k * v;
        }
        if (std::abs(sum - 1.0) > tol)
            throw FractionalBlockError("block " + std::to_string(i) + " does not sum to 1");
        x[i] = static_cast<int>(std::llround(dot));
    }
    return x;
}

LinearizedModel build_base_model(const ProblemSpec& spec) {
    validate_spec(spec);
    LinearizedModel m;
    m.layout = build_layout(spec.n, spec.theta);
    m.spec = spec;
    const VariableLayout& L = m.layout;
    const std::size_t nv = L.num_vars();
    const double theta_sq = static_cast<double>(spec.theta) * spec.theta;

    MilpProblem& p = m.base;
    p.objective.assign(nv, 0.0);
    p.lower.assign(nv, 0.0);
    p.upper.assign(nv, 1.0);
    p.is_binary.assign(nv, 1);
    for (int i = 0; i <= spec.n; ++i) {
        const double a = static_cast<double>(spec.histogram.counts[i]);
        const std::size_t base = L.block_start(i);
        for (int k = 0; k <= spec.theta; ++k)
            p.objective[base + k] = a * (k * k / 3.0 + k / 6.0);
        p.objective[L.z_square(i)] = a;
        p.objective[L.z_bilinear(i)] = a;
        p.is_binary[L.z_square(i)] = 0;
        p.is_binary[L.z_bilinear(i)] = 0;
        p.upper[L.z_square(i)] = theta_sq;
        p.upper[L.z_bilinear(i)] = theta_sq;
    }

    // one-hot: each block sums to exactly 1
    for (int i = 0; i <= spec.n; ++i) {
        std::vector<double> row(nv, 0.0);
        const std::size_t base = L.block_start(i);
        for (int k = 0; k <= spec.theta; ++k) row[base + k] = 1.0;
        p.eq_rows.push_back(std::move(row));
        p.eq_rhs.push_back(1.0);
    }

    // quota: sum of all x_i <= theta
    {
        std::vector<double> row(nv, 0.0);
        for (int i = 0; i <= spec.n; ++i) add_x_terms(row, L, i, 1.0);
        p.ineq_rows.push_back(std::move(row));
        p.ineq_rhs.push_back(spec.theta);
    }

    // capacity: sum of a_i * log2(k+1) on block position k, >= payload
    {
        std::vector<double> row(nv, 0.0);
        for (int i = 0; i <= spec.n; ++i) {
            const double a = static_cast<double>(spec.histogram.counts[i]);
            const std::size_t base = L.block_start(i);
            for (int k = 1; k <= spec.theta; ++k) row[base + k] = -a * std::log2(k + 1.0);
        }
        p.ineq_rows.push_back(std::move(row));
        p.ineq_rhs.push_back(-(spec.payload - kPayloadTolerance));
    }
    return m;
}

void add_taylor_cuts(LinearizedModel& model, const LinkVector& x_prev, bool accumulate_bilinear) {
    const VariableLayout& L = model.layout;
    if (x_prev.size() != static_cast<std::size_t>(L.n) + 1)
        throw DimensionMismatchError("anchor length must be n+1");
    const std::vector<int> y_prev = cumulative_deviations(x_prev);
    const std::size_t nv = L.num_vars();

    std::vector<TaylorCut> fresh_bilinear;
    for (int i = 0; i <= L.n; ++i) {
        const int ax = x_prev[i], ay = y_prev[i];
        if (ay > 0) {
            // 2*ay*y_i - z_sq <= ay^2
            const bool dup = std::any_of(model.square_cuts.begin(), model.square_cuts.end(),
                                         [&](const TaylorCut& c) {
                                             return c.value_index == i && c.anchor_y == ay;
                                         });
            if (!dup) {
                TaylorCut cut{i, ax, ay, std::vector<double>(nv, 0.0),
                              static_cast<double>(ay) * ay};
                add_y_terms(cut.row, L, i, 2.0 * ay);
                cut.row[L.z_square(i)] = -1.0;
                model.square_cuts.push_back(std::move(cut));
            }
        }
        if (ax > 0 || ay > 0) {
            // ax*y_i + ay*x_i - z_xy <= ax*ay
            TaylorCut cut{i, ax, ay, std::vector<double>(nv, 0.0),
                          static_cast<double>(ax) * ay};
            add_y_terms(cut.row, L, i, ax);
            add_x_terms(cut.row, L, i, ay);
            cut.row[L.z_bilinear(i)] = -1.0;
            fresh_bilinear.push_back(std::move(cut));
        }
    }
    if (accumulate_bilinear) {
        for (auto& cut : fresh_bilinear) {
            const bool dup = std::any_of(model.bilinear_cuts.begin(), model.bilinear_cuts.end(),
                                         [&](const TaylorCut& c) {
                                             return c.value_index == cut.value_index &&
                                                    c.anchor_x == cut.anchor_x &&
                                                    c.anchor_y == cut.anchor_y;
                                         });
            if (!dup) model.bilinear_cuts.push_back(std::move(cut));
        }
    } else {
        model.bilinear_cuts = std::move(fresh_bilinear);
    }
}

MilpProblem LinearizedModel::assemble() const {
    MilpProblem p = base;
    for (const auto& cut : square_cuts) {
        p.ineq_rows.push_back(cut.row);
        p.ineq_rhs.push_back(cut.rhs);
    }
    for (const auto& cut : bilinear_cuts) {
        p.ineq_rows.push_back(cut.row);
        p.ineq_rhs.push_back(cut.rhs);
    }
    return p;
}

namespace {

// Exclusion row for a visited one-hot assignment: at most n of the n+1
// blocks may keep the same position.
std::vector<double> exclusion_row(const VariableLayout& layout, const LinkVector& x) {
    std::vector<double> row(layout.num_vars(), 0.0);
    for (int i = 0; i <= layout.n; ++i) row[layout.block_start(i) + x[i]] = 1.0;
    return row;
}

// The square-cut-only surrogate underestimates the true distortion everywhere
// (tangent cuts of y^2 are valid, the dropped x*y term is non-negative), so
// its minimum over the unvisited codings bounds what any further iterate
// could achieve.
MilpProblem verification_problem(const LinearizedModel& model,
                                 const std::vector<LinkVector>& visited) {
    MilpProblem p = model.base;
    for (const auto& cut : model.square_cuts) {
        p.ineq_rows.push_back(cut.row);
        p.ineq_rhs.push_back(cut.rhs);
    }
    for (const auto& x : visited) {
        p.ineq_rows.push_back(exclusion_row(model.layout, x));
        p.ineq_rhs.push_back(model.layout.n);
    }
    return p;
}

}  // namespace

IterateResult iterate_optimize(const ProblemSpec& spec, const IterateOptions& options) {
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    LinearizedModel model = build_base_model(spec);

    IterateResult result;
    std::vector<LinkVector> seen;
    bool have_best = false;
    std::int64_t best_dist6 = 0;
    bool verifying = false;

    while (result.iterations < options.max_iter) {
        const MilpProblem problem =
            verifying ? verification_problem(model, seen) : model.assemble();
        const MilpSolution sol = solve_milp(problem, options.solver);
        ++result.iterations;

        if (sol.status == SolveStatus::Infeasible) {
            if (!verifying && result.iterations == 1)
                throw InfeasibleError(
                    "payload exceeds the capacity of every quota-respecting coding");
            // in verification mode this means every coding has been visited
            result.converged = verifying;
            break;
        }
        if (sol.status != SolveStatus::Optimal)
            throw std::runtime_error(std::string("MILP solve failed: ") + to_string(sol.status));

        if (verifying && have_best &&
            sol.objective > static_cast<double>(best_dist6) / 6.0 - 1.0 / 12.0) {
            // distortions are multiples of 1/6, so no unvisited coding can
            // undercut the incumbent: the incumbent is globally optimal
            result.converged = true;
            break;
        }

        const LinkVector x = decode_onehot(sol.values, model.layout);
        const EvalResult ev = evaluate(spec, x);
        result.trace.push_back(IterationRecord{x, sol.objective, ev.distortion, ev.feasible});

        if (ev.feasible) {
            const std::int64_t d6 = distortion_times6(spec.histogram, x);
            if (!have_best || d6 < best_dist6) {
                have_best = true;
                best_dist6 = d6;
                result.x = x;
                result.eval = ev;
            }
            if (d6 == 0) {  // nothing can beat zero distortion
                result.converged = true;
                break;
            }
        }

        if (!verifying && std::find(seen.begin(), seen.end(), x) != seen.end()) {
            // fixed point (or cycle) of the linearized loop: start verifying
            // the incumbent against the underestimating surrogate
            verifying = true;
            continue;
        }
        seen.push_back(x);
        add_taylor_cuts(model, x, options.accumulate_bilinear_cuts);
    }

    if (!have_best)
        throw InfeasibleError("no feasible coding found across iterations");
    return result;
}

}  // namespace stegopt

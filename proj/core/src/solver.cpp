#include "stegopt/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace stegopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;

enum VarStatus : char { kAtLower, kAtUpper, kBasic };

// Dense bounded-variable simplex over the system M.w = rhs with w_j in
// [0, ub_j]. Columns are structural variables (shifted so lower bounds are
// zero), then one slack per inequality row, then artificials as needed.
class Simplex {
  public:
    Simplex(const MilpProblem& p, const std::vector<double>& lo, const std::vector<double>& hi,
            const SolverOptions& opt)
        : opt_(opt), nv_(p.num_vars()), lo_(lo) {
        const std::size_t m = p.ineq_rows.size() + p.eq_rows.size();
        rows_.assign(m, {});
        rhs_.assign(m, 0.0);
        ub_.assign(nv_, 0.0);
        for (std::size_t j = 0; j < nv_; ++j) ub_[j] = hi[j] - lo[j];

        std::size_t r = 0;
        for (std::size_t k = 0; k < p.ineq_rows.size(); ++k, ++r) {
            rows_[r].assign(p.ineq_rows[k].begin(), p.ineq_rows[k].end());
            rhs_[r] = p.ineq_rhs[k] - dot(p.ineq_rows[k], lo);
        }
        for (std::size_t k = 0; k < p.eq_rows.size(); ++k, ++r) {
            rows_[r].assign(p.eq_rows[k].begin(), p.eq_rows[k].end());
            rhs_[r] = p.eq_rhs[k] - dot(p.eq_rows[k], lo);
        }

        // slack columns for the inequality block
        n_slack_ = p.ineq_rows.size();
        for (std::size_t k = 0; k < m; ++k) rows_[k].resize(nv_ + n_slack_, 0.0);
        for (std::size_t k = 0; k < n_slack_; ++k) rows_[k][nv_ + k] = 1.0;
        ub_.resize(nv_ + n_slack_, kInf);

        // flip rows to non-negative rhs, then pick slack or artificial as basis
        basis_.assign(m, -1);
        for (std::size_t k = 0; k < m; ++k) {
            if (rhs_[k] < 0) {
                for (double& c : rows_[k]) c = -c;
                rhs_[k] = -rhs_[k];
            }
            if (k < n_slack_ && rows_[k][nv_ + k] > 0.5) basis_[k] = static_cast<int>(nv_ + k);
        }
        first_artificial_ = ub_.size();
        for (std::size_t k = 0; k < m; ++k) {
            if (basis_[k] >= 0) continue;
            for (auto& row : rows_) row.push_back(0.0);
            rows_[k].back() = 1.0;
            ub_.push_back(kInf);
            basis_[k] = static_cast<int>(ub_.size()) - 1;
        }
        n_total_ = ub_.size();

        status_.assign(n_total_, kAtLower);
        xb_ = rhs_;
        for (std::size_t k = 0; k < m; ++k) status_[basis_[k]] = kBasic;
    }

    // Runs phase 1 then phase 2 with the given structural objective.
    SolveStatus optimize(const std::vector<double>& obj) {
        if (first_artificial_ < n_total_) {
            std::vector<double> phase1(n_total_, 0.0);
            for (std::size_t j = first_artificial_; j < n_total_; ++j) phase1[j] = 1.0;
            const SolveStatus s1 = run(phase1);
            if (s1 != SolveStatus::Optimal) return s1;
            double infeas = 0;
            for (std::size_t k = 0; k < basis_.size(); ++k)
                if (static_cast<std::size_t>(basis_[k]) >= first_artificial_) infeas += xb_[k];
            const double scale = 1.0 + *std::max_element(rhs_.begin(), rhs_.end());
            if (infeas > opt_.feas_tol * scale) return SolveStatus::Infeasible;
            for (std::size_t j = first_artificial_; j < n_total_; ++j) ub_[j] = 0.0;
        }
        std::vector<double> phase2(n_total_, 0.0);
        std::copy(obj.begin(), obj.end(), phase2.begin());
        return run(phase2);
    }

    // Structural variable values in the shifted space.
    std::vector<double> values() const {
        std::vector<double> w(nv_, 0.0);
        for (std::size_t j = 0; j < nv_; ++j)
            if (status_[j] == kAtUpper) w[j] = ub_[j];
        for (std::size_t k = 0; k < basis_.size(); ++k)
            if (static_cast<std::size_t>(basis_[k]) < nv_) w[basis_[k]] = xb_[k];
        for (std::size_t j = 0; j < nv_; ++j)
            w[j] = lo_[j] + std::clamp(w[j], 0.0, ub_[j]);
        return w;
    }

  private:
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }

    void compute_reduced_costs(const std::vector<double>& cost) {
        z_ = cost;
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const double cb = cost[basis_[k]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < n_total_; ++j) z_[j] -= cb * rows_[k][j];
        }
    }

    SolveStatus run(const std::vector<double>& cost) {
        compute_reduced_costs(cost);
        const std::size_t m = basis_.size();
        for (;;) {
            if (pivots_ >= opt_.max_pivots) return SolveStatus::IterationLimit;
            const bool bland = pivots_ >= opt_.bland_after;

            // pricing
            int enter = -1;
            double best_viol = kReducedCostTol;
            for (std::size_t j = 0; j < n_total_; ++j) {
                if (status_[j] == kBasic || ub_[j] <= 0.0) continue;
                double viol = 0;
                if (status_[j] == kAtLower && z_[j] < -kReducedCostTol)
                    viol = -z_[j];
                else if (status_[j] == kAtUpper && z_[j] > kReducedCostTol)
                    viol = z_[j];
                else
                    continue;
                if (bland) {
                    enter = static_cast<int>(j);
                    break;
                }
                if (viol > best_viol) {
                    best_viol = viol;
                    enter = static_cast<int>(j);
                }
            }
            if (enter < 0) return SolveStatus::Optimal;

            const double dir = status_[enter] == kAtLower ? 1.0 : -1.0;

            // bounded ratio test
            double t_max = ub_[enter];  // bound-to-bound flip
            int leave = -1;
            bool leave_at_upper = false;
            double leave_alpha = 0;
            auto consider = [&](std::size_t i, double ratio, double alpha, bool at_upper) {
                bool take;
                if (ratio < t_max - 1e-12) {
                    take = true;
                } else if (ratio < t_max + 1e-12 && leave >= 0) {
                    // tie: Bland wants the lowest leaving index, otherwise the
                    // numerically larger pivot
                    take = bland ? basis_[i] < basis_[leave]
                                 : std::abs(alpha) > std::abs(leave_alpha);
                } else {
                    take = false;
                }
                if (take) {
                    t_max = std::min(t_max, ratio);
                    leave = static_cast<int>(i);
                    leave_at_upper = at_upper;
                    leave_alpha = alpha;
                }
            };
            for (std::size_t i = 0; i < m; ++i) {
                const double alpha = dir * rows_[i][enter];
                if (alpha > kPivotTol) {  // basic value moves down towards 0
                    consider(i, std::max(xb_[i], 0.0) / alpha, alpha, false);
                } else if (alpha < -kPivotTol) {  // basic value moves up towards its bound
                    const double cap = ub_[basis_[i]];
                    if (cap == kInf) continue;
                    consider(i, std::max(cap - xb_[i], 0.0) / (-alpha), alpha, true);
                }
            }
            if (t_max == kInf) return SolveStatus::Unbounded;
            ++pivots_;

            if (leave < 0) {
                // entering variable runs to its opposite bound, basis unchanged
                for (std::size_t i = 0; i < m; ++i) xb_[i] -= dir * t_max * rows_[i][enter];
                status_[enter] = status_[enter] == kAtLower ? kAtUpper : kAtLower;
                continue;
            }

            const double enter_val = (dir > 0 ? 0.0 : ub_[enter]) + dir * t_max;
            for (std::size_t i = 0; i < m; ++i)
                if (static_cast<int>(i) != leave) xb_[i] -= dir * t_max * rows_[i][enter];

            // pivot
            auto& prow = rows_[leave];
            const double piv = prow[enter];
            for (double& c : prow) c /= piv;
            for (std::size_t i = 0; i < m; ++i) {
                if (static_cast<int>(i) == leave) continue;
                const double f = rows_[i][enter];
                if (f == 0.0) continue;
                auto& row = rows_[i];
                for (std::size_t j = 0; j < n_total_; ++j) row[j] -= f * prow[j];
                row[enter] = 0.0;
            }
            const double zf = z_[enter];
            if (zf != 0.0) {
                for (std::size_t j = 0; j < n_total_; ++j) z_[j] -= zf * prow[j];
                z_[enter] = 0.0;
            }

            status_[basis_[leave]] = leave_at_upper ? kAtUpper : kAtLower;
            basis_[leave] = enter;
            status_[enter] = kBasic;
            xb_[leave] = enter_val;
        }
    }

    SolverOptions opt_;
    std::size_t nv_;
    std::vector<double> lo_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> rhs_;
    std::vector<double> ub_;
    std::vector<double> xb_;
    std::vector<double> z_;
    std::vector<int> basis_;
    std::vector<char> status_;
    std::size_t n_slack_ = 0;
    std::size_t first_artificial_ = 0;
    std::size_t n_total_ = 0;
    int pivots_ = 0;
};

MilpSolution solve_lp_bounds(const MilpProblem& p, const std::vector<double>& lo,
                             const std::vector<double>& hi, const SolverOptions& opt) {
    MilpSolution sol;
    for (std::size_t j = 0; j < p.num_vars(); ++j) {
        if (lo[j] > hi[j] + 1e-12) {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
    }
    Simplex splx(p, lo, hi, opt);
    sol.status = splx.optimize(p.objective);
    if (sol.status == SolveStatus::Optimal) {
        sol.values = splx.values();
        sol.objective = 0;
        for (std::size_t j = 0; j < p.num_vars(); ++j)
            sol.objective += p.objective[j] * sol.values[j];
    }
    return sol;
}

struct Node {
    long id = 0;
    double bound = 0;
    std::vector<double> lo, hi;
    std::vector<double> values;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id > b.id;
    }
};

// Most fractional binary, lowest index on ties; -1 when integral.
int pick_branch_var(const MilpProblem& p, const std::vector<double>& v, double int_tol) {
    int var = -1;
    double best_frac = int_tol;
    for (std::size_t j = 0; j < p.num_vars(); ++j) {
        if (!p.is_binary[j]) continue;
        const double frac = std::abs(v[j] - std::round(v[j]));
        if (frac > best_frac + 1e-15) {
            best_frac = frac;
            var = static_cast<int>(j);
        }
    }
    return var;
}

}  // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

void MilpProblem::validate() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n || is_binary.size() != n)
        throw std::invalid_argument("bounds/integrality length mismatch");
    if (ineq_rows.size() != ineq_rhs.size() || eq_rows.size() != eq_rhs.size())
        throw std::invalid_argument("constraint row/rhs count mismatch");
    for (const auto& r : ineq_rows)
        if (r.size() != n) throw std::invalid_argument("inequality row length mismatch");
    for (const auto& r : eq_rows)
        if (r.size() != n) throw std::invalid_argument("equality row length mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
            throw std::invalid_argument("all variable bounds must be finite");
        if (lower[j] > upper[j]) throw std::invalid_argument("lower bound above upper bound");
        if (is_binary[j] && (lower[j] < -1e-12 || upper[j] > 1 + 1e-12))
            throw std::invalid_argument("binary variable bounds must lie within [0,1]");
    }
}

MilpSolution solve_lp(const MilpProblem& problem, const SolverOptions& options) {
    problem.validate();
    return solve_lp_bounds(problem, problem.lower, problem.upper, options);
}

MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& options,
                        std::vector<NodeRecord>* trace) {
    problem.validate();

    long next_id = 0;
    long explored = 0;
    bool hit_cap = false;

    auto solve_node = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
        ++explored;
        MilpSolution s = solve_lp_bounds(problem, lo, hi, options);
        if (trace)
            trace->push_back(NodeRecord{lo, hi, s.status,
                                        s.status == SolveStatus::Optimal ? s.objective : 0.0});
        return s;
    };

    MilpSolution root = solve_node(problem.lower, problem.upper);
    if (root.status != SolveStatus::Optimal) return root;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{next_id++, root.objective, problem.lower, problem.upper,
                   std::move(root.values)});

    MilpSolution incumbent;
    incumbent.status = SolveStatus::Infeasible;
    bool have_incumbent = false;

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= incumbent.objective - 1e-9) continue;

        const int var = pick_branch_var(problem, node.values, options.int_tol);
        if (var < 0) {
            // integral relaxation; best-first makes the first such node optimal
            if (!have_incumbent || node.bound < incumbent.objective - 1e-9) {
                incumbent.status = SolveStatus::Optimal;
                incumbent.values = node.values;
                incumbent.objective = node.bound;
                have_incumbent = true;
            }
            continue;
        }

        const double v = node.values[var];
        for (int branch = 0; branch < 2; ++branch) {  // down first
            if (explored >= options.node_cap) {
                hit_cap = true;
                break;
            }
            std::vector<double> lo = node.lo, hi = node.hi;
            if (branch == 0)
                hi[var] = std::floor(v);
            else
                lo[var] = std::ceil(v);
            MilpSolution child = solve_node(lo, hi);
            if (child.status != SolveStatus::Optimal) continue;
            assert(child.objective >= node.bound - 1e-6);  // restriction cannot improve
            if (have_incumbent && child.objective >= incumbent.objective - 1e-9) continue;
            open.push(Node{next_id++, child.objective, std::move(lo), std::move(hi),
                           std::move(child.values)});
        }
        if (hit_cap) break;
    }

    if (hit_cap) {
        incumbent.status = SolveStatus::IterationLimit;
        return incumbent;
    }
    if (!have_incumbent) incumbent.status = SolveStatus::Infeasible;
    return incumbent;
}

void write_lp_format(const MilpProblem& p, std::ostream& out) {
    auto term = [](std::ostream& o, double c, std::size_t j, bool& first) {
        if (c == 0) return;
        if (first) {
            first = false;
            if (c < 0) o << "- ";
        } else {
            o << (c < 0 ? " - " : " + ");
        }
        o << std::abs(c) << " v" << j;
    };
    out << "Minimize\n obj: ";
    bool first = true;
    for (std::size_t j = 0; j < p.num_vars(); ++j) term(out, p.objective[j], j, first);
    if (first) out << "0";
    out << "\nSubject To\n";
    for (std::size_t r = 0; r < p.ineq_rows.size(); ++r) {
        out << " c" << r << ": ";
        first = true;
        for (std::size_t j = 0; j < p.num_vars(); ++j) term(out, p.ineq_rows[r][j], j, first);
        if (first) out << "0";
        out << " <= " << p.ineq_rhs[r] << "\n";
    }
    for (std::size_t r = 0; r < p.eq_rows.size(); ++r) {
        out << " e" << r << ": ";
        first = true;
        for (std::size_t j = 0; j < p.num_vars(); ++j) term(out, p.eq_rows[r][j], j, first);
        if (first) out << "0";
        out << " = " << p.eq_rhs[r] << "\n";
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < p.num_vars(); ++j)
        out << " " << p.lower[j] << " <= v" << j << " <= " << p.upper[j] << "\n";
    bool any_bin = false;
    for (std::size_t j = 0; j < p.num_vars(); ++j) {
        if (!p.is_binary[j]) continue;
        if (!any_bin) {
            out << "Binaries\n";
            any_bin = true;
        }
        out << " v" << j;
    }
    if (any_bin) out << "\n";
    out << "End\n";
}

}  // namespace stegopt

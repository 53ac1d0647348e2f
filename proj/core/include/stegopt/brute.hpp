#ifndef STEGOPT_BRUTE_HPP
#define STEGOPT_BRUTE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stegopt/model.hpp"

namespace stegopt {

using BigInt = boost::multiprecision::cpp_int;

/// All integer partitions of t as multiplicity vectors: row[k-1] is how many
/// times summand k appears, so sum of k*row[k-1] equals t.
struct PartitionMatrix {
    int t = 0;
    std::vector<std::vector<int>> rows;
};

/// Enumerates the partitions of t, rows ordered by the part list in
/// descending lexicographic order ([t] first, all-ones last). t = 0 yields an
/// empty matrix.
PartitionMatrix partitions(int t);

/// Number of ways to assign distinct values (from a pool of n_star) to the
/// summand classes of a partition row: product of successive binomials.
/// Zero when the row needs more distinct values than the pool has.
BigInt comb_count(const std::vector<int>& lambda, int n_star);

/// Feasible link vectors whose entries sum to exactly t over n_star positions.
BigInt feasible_count(int t, int n_star);

/// Feasible link vectors with 1 <= sum <= theta over n_star positions.
BigInt total_feasible(int theta, int n_star);

/// Streams the zero vector first, then every x with 1 <= sum(x) <= theta
/// exactly once, instantiating each partition row over value positions.
/// Deterministic order.
void enumerate_solutions(const ProblemSpec& spec,
                         const std::function<void(const LinkVector&)>& sink);

struct OptimizeResult {
    LinkVector x;
    EvalResult eval;
    std::uint64_t evaluated_count = 0;
};

/// Exhaustive minimum-distortion search over all quota-respecting vectors.
/// Ties broken by smaller capacity, then lexicographically smallest x.
/// Throws InfeasibleError when no vector reaches the payload.
OptimizeResult brute_force_optimize(const ProblemSpec& spec);

/// Same contract as brute_force_optimize but walks the full (theta+1)^(n+1)
/// grid. Exists purely as an independent oracle; throws
/// SearchSpaceTooLargeError above the cap.
OptimizeResult naive_grid_optimize(const ProblemSpec& spec, double grid_cap = 1e8);

}  // namespace stegopt

#endif  // STEGOPT_BRUTE_HPP

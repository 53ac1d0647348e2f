#include "stegopt/brute.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace stegopt {

namespace {

void gen_parts(int remaining, int max_part, std::vector<int>& parts,
               std::vector<std::vector<int>>& out, int t) {
    if (remaining == 0) {
        std::vector<int> mult(t, 0);
        for (int p : parts) mult[p - 1]++;
        out.push_back(std::move(mult));
        return;
    }
    for (int k = std::min(remaining, max_part); k >= 1; --k) {
        parts.push_back(k);
        gen_parts(remaining - k, k, parts, out, t);
        parts.pop_back();
    }
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// Assigns each summand class of `lambda` to distinct positions, lexicographic
// combinations over the free-position list, and hands the completed vector on.
void instantiate(const std::vector<int>& lambda, std::size_t k_idx,
                 std::vector<int>& free_pos, LinkVector& x,
                 const std::function<void(const LinkVector&)>& sink) {
    while (k_idx < lambda.size() && lambda[k_idx] == 0) ++k_idx;
    if (k_idx == lambda.size()) {
        sink(x);
        return;
    }
    const int summand = static_cast<int>(k_idx) + 1;
    const int take = lambda[k_idx];
    const int avail = static_cast<int>(free_pos.size());
    if (take > avail) return;

    std::vector<int> combo(take);
    std::function<void(int, int)> choose = [&](int start, int depth) {
        if (depth == take) {
            std::vector<int> rest;
            rest.reserve(avail - take);
            std::size_t ci = 0;
            for (int p : free_pos) {
                if (ci < combo.size() && combo[ci] == p)
                    ++ci;
                else
                    rest.push_back(p);
            }
            for (int p : combo) x[p] = summand;
            std::vector<int> saved = std::move(free_pos);
            free_pos = std::move(rest);
            instantiate(lambda, k_idx + 1, free_pos, x, sink);
            free_pos = std::move(saved);
            for (int p : combo) x[p] = 0;
            return;
        }
        for (int i = start; i <= avail - (take - depth); ++i) {
            combo[depth] = free_pos[i];
            choose(i + 1, depth + 1);
        }
    };
    choose(0, 0);
}

struct Candidate {
    LinkVector x;
    std::int64_t dist6 = 0;
    double cap = 0;
};

// Total order: distortion (exact), then capacity, then lexicographic x.
bool better(const Candidate& a, const Candidate& b) {
    if (a.dist6 != b.dist6) return a.dist6 < b.dist6;
    if (a.cap != b.cap) return a.cap < b.cap;
    return a.x < b.x;
}

OptimizeResult search(const ProblemSpec& spec,
                      const std::function<void(const std::function<void(const LinkVector&)>&)>& walk) {
    validate_spec(spec);
    std::optional<Candidate> best;
    std::uint64_t evaluated = 0;
    walk([&](const LinkVector& x) {
        ++evaluated;
        const double cap = capacity(spec.histogram, x);
        if (cap < spec.payload - kPayloadTolerance) return;
        Candidate cand{x, distortion_times6(spec.histogram, x), cap};
        if (!best || better(cand, *best)) best = std::move(cand);
    });
    if (!best) throw InfeasibleError("payload exceeds the capacity of every quota-respecting coding");
    OptimizeResult res;
    res.x = best->x;
    res.eval = evaluate(spec, res.x);
    res.evaluated_count = evaluated;
    return res;
}

}  // namespace

PartitionMatrix partitions(int t) {
    if (t < 0) throw std::invalid_argument("partitions: t must be non-negative");
    PartitionMatrix m;
    m.t = t;
    if (t == 0) return m;
    std::vector<int> parts;
    gen_parts(t, t, parts, m.rows, t);
    return m;
}

BigInt comb_count(const std::vector<int>& lambda, int n_star) {
    BigInt product = 1;
    int used = 0;
    for (int lk : lambda) {
        product *= binomial(n_star - used, lk);
        if (product == 0) return 0;
        used += lk;
    }
    return product;
}

BigInt feasible_count(int t, int n_star) {
    if (t < 1) throw std::invalid_argument("feasible_count: t must be positive");
    BigInt sum = 0;
    for (const auto& row : partitions(t).rows) sum += comb_count(row, n_star);
    return sum;
}

BigInt total_feasible(int theta, int n_star) {
    BigInt sum = 0;
    for (int t = 1; t <= theta; ++t) sum += feasible_count(t, n_star);
    return sum;
}

void enumerate_solutions(const ProblemSpec& spec,
                         const std::function<void(const LinkVector&)>& sink) {
    validate_spec(spec);
    LinkVector x(spec.n + 1, 0);
    sink(x);
    std::vector<int> all_pos(spec.n + 1);
    for (int i = 0; i <= spec.n; ++i) all_pos[i] = i;
    for (int t = 1; t <= spec.theta; ++t) {
        for (const auto& row : partitions(t).rows) {
            std::vector<int> free_pos = all_pos;
            instantiate(row, 0, free_pos, x, sink);
        }
    }
}

OptimizeResult brute_force_optimize(const ProblemSpec& spec) {
    return search(spec, [&](const std::function<void(const LinkVector&)>& sink) {
        enumerate_solutions(spec, sink);
    });
}

OptimizeResult naive_grid_optimize(const ProblemSpec& spec, double grid_cap) {
    validate_spec(spec);
    const double grid = std::pow(spec.theta + 1.0, spec.n + 1.0);
    if (grid > grid_cap)
        throw SearchSpaceTooLargeError("grid of " + std::to_string(grid) +
                                       " vectors exceeds cap of " + std::to_string(grid_cap));
    return search(spec, [&](const std::function<void(const LinkVector&)>& sink) {
        LinkVector x(spec.n + 1, 0);
        // odometer over {0..theta}^(n+1), lowest index fastest
        for (;;) {
            long long sum = 0;
            for (int xi : x) sum += xi;
            if (sum <= spec.theta) sink(x);
            int i = 0;
            while (i <= spec.n && x[i] == spec.theta) x[i++] = 0;
            if (i > spec.n) break;
            ++x[i];
        }
    });
}

}  // namespace stegopt

#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "stegopt/brute.hpp"
#include "stegopt/milp.hpp"

using namespace stegopt;

namespace {

AbsErrorHistogram random_histogram(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> count_dist(0, 40);
    AbsErrorHistogram hist;
    for (int i = 0; i <= n; ++i) hist.counts.push_back(count_dist(rng));
    if (hist.total() == 0) hist.counts[0] = 1;
    return hist;
}

LinkVector random_link_vector(std::mt19937& rng, int n, int theta) {
    LinkVector x(n + 1, 0);
    int budget = theta;
    for (int i = 0; i <= n && budget > 0; ++i) {
        std::uniform_int_distribution<int> link(0, budget);
        x[i] = link(rng);
        budget -= x[i];
    }
    std::shuffle(x.begin(), x.end(), rng);
    return x;
}

}  // namespace

TEST_CASE("layout sizes and variable placement") {
    CHECK(build_layout(1, 1).num_vars() == 8);  // 2 blocks of 2 + 4 slacks
    CHECK(build_layout(0, 3).num_vars() == 6);  // 4 binaries + 2 slacks
    const auto L = build_layout(3, 2);
    CHECK(L.num_vars() == 4 * 5);
    CHECK(L.block_start(2) == 6);
    CHECK(L.z_square(0) == 12);
    CHECK(L.z_bilinear(0) == 16);
    CHECK_THROWS_AS(build_layout(-1, 0), std::invalid_argument);
}

TEST_CASE("one-hot encoding places the single 1 at position x_i") {
    const auto L1 = build_layout(0, 3);
    const auto v = encode_onehot({2}, L1);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 1.0);
    CHECK(v[3] == 0.0);

    const auto L2 = build_layout(1, 2);
    const auto w = encode_onehot({2, 1}, L2);
    const std::vector<double> head(w.begin(), w.begin() + 6);
    CHECK(head == std::vector<double>{0, 0, 1, 0, 1, 0});

    CHECK_THROWS_AS(encode_onehot({3}, build_layout(0, 2)), std::invalid_argument);
}

TEST_CASE("decode inverts encode on random vectors") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> n_dist(0, 8), theta_dist(0, 4);
        const int n = n_dist(rng), theta = theta_dist(rng);
        const auto L = build_layout(n, theta);
        const LinkVector x = random_link_vector(rng, n, theta);
        CHECK(decode_onehot(encode_onehot(x, L), L) == x);
    }
}

TEST_CASE("decode rejects fractional blocks") {
    const auto L = build_layout(0, 1);
    std::vector<double> v(L.num_vars(), 0.0);
    v[0] = 0.5;
    v[1] = 0.5;
    CHECK_THROWS_AS(decode_onehot(v, L), FractionalBlockError);
    v[0] = 1.0;
    v[1] = 1.0;  // sums to 2
    CHECK_THROWS_AS(decode_onehot(v, L), FractionalBlockError);
    v[1] = 0.0;
    CHECK(decode_onehot(v, L) == LinkVector{0});
}

TEST_CASE("base model rows carry the documented coefficients") {
    AbsErrorHistogram h{{4, 1, 3}};
    const auto model = build_base_model({2, 1, 1.0, h});
    const auto& L = model.layout;
    const auto& p = model.base;

    REQUIRE(p.ineq_rows.size() == 2);  // quota then capacity
    const auto& quota = p.ineq_rows[0];
    for (int i = 0; i <= 2; ++i) {
        CHECK(quota[L.block_start(i) + 0] == 0.0);
        CHECK(quota[L.block_start(i) + 1] == 1.0);
    }
    CHECK(p.ineq_rhs[0] == 1.0);

    // capacity is stored negated (>= payload as <= -payload)
    const auto& cap = p.ineq_rows[1];
    CHECK(-cap[L.block_start(0) + 1] == doctest::Approx(4.0));
    CHECK(-cap[L.block_start(1) + 1] == doctest::Approx(1.0));
    CHECK(-cap[L.block_start(2) + 1] == doctest::Approx(3.0));
    CHECK(cap[L.block_start(0) + 0] == 0.0);

    REQUIRE(p.eq_rows.size() == 3);  // one-hot per value
    for (int i = 0; i <= 2; ++i) CHECK(p.eq_rhs[i] == 1.0);
}

TEST_CASE("objective blocks follow k^2/3 + k/6 with count weights on slacks") {
    AbsErrorHistogram h{{5, 7}};
    const auto model = build_base_model({1, 2, 0.0, h});
    const auto& L = model.layout;
    for (int i = 0; i <= 1; ++i) {
        const double a = static_cast<double>(h.counts[i]);
        CHECK(model.base.objective[L.block_start(i) + 0] == 0.0);
        CHECK(model.base.objective[L.block_start(i) + 1] == doctest::Approx(a * 0.5));
        CHECK(model.base.objective[L.block_start(i) + 2] == doctest::Approx(a * 5.0 / 3.0));
        CHECK(model.base.objective[L.z_square(i)] == a);
        CHECK(model.base.objective[L.z_bilinear(i)] == a);
    }
}

TEST_CASE("capacity row reproduces the capacity formula on one-hot points") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> n_dist(0, 8), theta_dist(1, 4);
        const int n = n_dist(rng), theta = theta_dist(rng);
        const AbsErrorHistogram hist = random_histogram(rng, n);
        const auto model = build_base_model({n, theta, 0.0, hist});
        const LinkVector x = random_link_vector(rng, n, theta);
        const auto assignment = encode_onehot(x, model.layout);
        const auto& cap_row = model.base.ineq_rows[1];
        double dot = 0;
        for (std::size_t j = 0; j < assignment.size(); ++j) dot += cap_row[j] * assignment[j];
        CHECK(-dot == doctest::Approx(capacity(hist, x)).epsilon(1e-9));
    }
}

TEST_CASE("objective with slacks forced to y^2 and x*y equals the true distortion") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> n_dist(0, 8), theta_dist(1, 4);
        const int n = n_dist(rng), theta = theta_dist(rng);
        const AbsErrorHistogram hist = random_histogram(rng, n);
        const auto model = build_base_model({n, theta, 0.0, hist});
        const LinkVector x = random_link_vector(rng, n, theta);
        const auto y = cumulative_deviations(x);
        auto assignment = encode_onehot(x, model.layout);
        for (int i = 0; i <= n; ++i) {
            assignment[model.layout.z_square(i)] = static_cast<double>(y[i]) * y[i];
            assignment[model.layout.z_bilinear(i)] = static_cast<double>(x[i]) * y[i];
        }
        double dot = 0;
        for (std::size_t j = 0; j < assignment.size(); ++j)
            dot += model.base.objective[j] * assignment[j];
        CHECK(dot == doctest::Approx(distortion(hist, x)).epsilon(1e-12));
    }
}

TEST_CASE("taylor cuts substitute the anchor as documented") {
    AbsErrorHistogram h{{1, 1, 1, 1}};
    const ProblemSpec spec{3, 3, 0.0, h};

    SUBCASE("zero anchor adds nothing") {
        auto model = build_base_model(spec);
        add_taylor_cuts(model, {0, 0, 0, 0});
        CHECK(model.square_cuts.empty());
        CHECK(model.bilinear_cuts.empty());
    }

    SUBCASE("anchor x=[3,0,0,0] gives y~=3 above value 0") {
        auto model = build_base_model(spec);
        const auto& L = model.layout;
        add_taylor_cuts(model, {3, 0, 0, 0});
        REQUIRE(model.square_cuts.size() == 3);  // i = 1, 2, 3
        const auto& cut = model.square_cuts.front();
        CHECK(cut.value_index == 1);
        CHECK(cut.anchor_y == 3);
        CHECK(cut.rhs == 9.0);
        // 2*3*y_1 where y_1 = sum k*X[0][k]
        CHECK(cut.row[L.block_start(0) + 1] == doctest::Approx(6.0));
        CHECK(cut.row[L.block_start(0) + 2] == doctest::Approx(12.0));
        CHECK(cut.row[L.z_square(1)] == -1.0);

        // bilinear cut for i = 0: x~=3, y~=0 -> 3*y_0 - z <= 0 with empty y_0
        REQUIRE(!model.bilinear_cuts.empty());
        const auto& b0 = model.bilinear_cuts.front();
        CHECK(b0.value_index == 0);
        CHECK(b0.anchor_x == 3);
        CHECK(b0.anchor_y == 0);
        CHECK(b0.rhs == 0.0);
        CHECK(b0.row[L.z_bilinear(0)] == -1.0);
    }

    SUBCASE("anchor with x~=2, y~=3 on value 1") {
        auto model = build_base_model(spec);
        const auto& L = model.layout;
        add_taylor_cuts(model, {3, 2, 0, 0});
        const TaylorCut* xy = nullptr;
        for (const auto& c : model.bilinear_cuts)
            if (c.value_index == 1) xy = &c;
        REQUIRE(xy != nullptr);
        CHECK(xy->anchor_x == 2);
        CHECK(xy->anchor_y == 3);
        CHECK(xy->rhs == 6.0);
        // 3*x_1: coefficient 3k on block 1; 2*y_1: coefficient 2k on block 0
        CHECK(xy->row[L.block_start(1) + 1] == doctest::Approx(3.0));
        CHECK(xy->row[L.block_start(1) + 2] == doctest::Approx(6.0));
        CHECK(xy->row[L.block_start(0) + 1] == doctest::Approx(2.0));
        CHECK(xy->row[L.z_bilinear(1)] == -1.0);
    }
}

TEST_CASE("square cuts never exclude integer-feasible points") {
    for (int anchor = 0; anchor <= 12; ++anchor)
        for (int y = 0; y <= 12; ++y)
            CHECK(2 * anchor * y - anchor * anchor <= y * y);
}

TEST_CASE("square cuts accumulate, bilinear cuts are replaced") {
    AbsErrorHistogram h{{1, 1, 1}};
    auto model = build_base_model({2, 2, 0.0, h});
    add_taylor_cuts(model, {1, 0, 0});
    const auto sq1 = model.square_cuts.size();
    const auto bi1 = model.bilinear_cuts.size();
    add_taylor_cuts(model, {2, 0, 0});
    CHECK(model.square_cuts.size() > sq1);     // new anchors kept alongside old
    CHECK(model.bilinear_cuts.size() == bi1);  // same shape, new anchor only
    for (const auto& c : model.bilinear_cuts) CHECK(c.anchor_x + c.anchor_y > 0);

    // repeated anchor adds no duplicate square cuts
    const auto sq2 = model.square_cuts.size();
    add_taylor_cuts(model, {1, 0, 0});
    CHECK(model.square_cuts.size() == sq2);
}

TEST_CASE("iterate_optimize worked instances") {
    AbsErrorHistogram h{{4, 1, 3}};
    SUBCASE("payload 1 matches the brute-force oracle") {
        const auto r = iterate_optimize({2, 1, 1.0, h});
        CHECK(r.x == LinkVector{0, 0, 1});
        CHECK(r.eval.distortion == doctest::Approx(1.5));
        CHECK(r.converged);
    }
    SUBCASE("zero payload stops on the zero vector immediately") {
        const auto r = iterate_optimize({2, 1, 0.0, h});
        CHECK(r.x == LinkVector{0, 0, 0});
        CHECK(r.eval.distortion == 0.0);
        CHECK(r.iterations == 1);  // zero distortion needs no verification
        CHECK(r.converged);
    }
    SUBCASE("impossible payload is infeasible") {
        CHECK_THROWS_AS(iterate_optimize({2, 1, 100.0, h}), InfeasibleError);
    }
}

TEST_CASE("iterate_optimize is deterministic, quota-clean and stable under larger budgets") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> n_dist(2, 8), theta_dist(1, 3);
        const int n = n_dist(rng), theta = theta_dist(rng);
        const AbsErrorHistogram hist = random_histogram(rng, n);
        ProblemSpec spec{n, theta, 0.0, hist};
        double cap_max = 0;
        enumerate_solutions(spec, [&](const LinkVector& x) {
            cap_max = std::max(cap_max, capacity(hist, x));
        });
        if (cap_max <= 0) continue;
        spec.payload = 0.5 * cap_max;
        const auto a = iterate_optimize(spec);
        const auto b = iterate_optimize(spec);
        CHECK(a.x == b.x);
        CHECK(a.iterations == b.iterations);
        CHECK(quota_respected(a.x, theta));
        CHECK(a.eval.feasible);
        for (const auto& rec : a.trace) CHECK(quota_respected(rec.x, theta));

        // a converged run is a fixed point of the whole procedure: more
        // budget changes nothing
        IterateOptions wide;
        wide.max_iter = 40;
        const auto c = iterate_optimize(spec, wide);
        if (a.converged) {
            CHECK(c.x == a.x);
            CHECK(c.iterations == a.iterations);
        }
    }
}

TEST_CASE("iterate_optimize finds the brute optimum on most random instances") {
    std::mt19937 rng(20260810);
    int optimal = 0, total = 0;
    double worst_gap = 0;
    while (total < 60) {
        std::uniform_int_distribution<int> n_dist(2, 10), theta_dist(1, 3);
        const int n = n_dist(rng), theta = theta_dist(rng);
        const AbsErrorHistogram hist = random_histogram(rng, n);
        ProblemSpec relaxed{n, theta, 0.0, hist};
        double cap_max = 0;
        enumerate_solutions(relaxed, [&](const LinkVector& x) {
            cap_max = std::max(cap_max, capacity(hist, x));
        });
        if (cap_max <= 0) continue;
        for (double frac : {0.25, 0.5, 0.75}) {
            ++total;
            const ProblemSpec spec{n, theta, frac * cap_max, hist};
            const auto milp = iterate_optimize(spec);
            const auto brute = brute_force_optimize(spec);
            const std::int64_t got = distortion_times6(hist, milp.x);
            const std::int64_t best = distortion_times6(hist, brute.x);
            CHECK(got >= best);
            if (got == best) ++optimal;
            if (best > 0)
                worst_gap = std::max(worst_gap,
                                     static_cast<double>(got - best) / static_cast<double>(best));
        }
    }
    // the acceptance suite runs the full protocol at n <= 16
    CHECK(static_cast<double>(optimal) / total >= 0.90);
    CHECK(worst_gap <= 0.05);
}

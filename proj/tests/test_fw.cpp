#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "evsched/errors.hpp"
#include "evsched/fw.hpp"
#include "evsched/instances.hpp"
#include "evsched/oracle.hpp"

using namespace evsched;

namespace {

Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

// Exhaustive grid search for min g'r over the capped simplex, T = 3.
Vec grid_lp_minimizer(const Vec& g, const Vec& caps, double budget, int steps) {
    Vec best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const double e0 = caps[0] * i / steps;
        for (int j = 0; j <= steps; ++j) {
            const double e1 = caps[1] * j / steps;
            const double e2 = budget - e0 - e1;
            if (e2 < -1e-12 || e2 > caps[2] + 1e-12) continue;
            const double val = g[0] * e0 + g[1] * e1 + g[2] * std::clamp(e2, 0.0, caps[2]);
            if (val < best_val) {
                best_val = val;
                best = vec({e0, e1, std::clamp(e2, 0.0, caps[2])});
            }
        }
    }
    return best;
}

std::vector<Vec> dyadic_profiles(std::mt19937_64& rng, int count, int T) {
    std::vector<Vec> out;
    for (int m = 0; m < count; ++m) {
        Vec e(T);
        for (int t = 0; t < T; ++t) e[t] = (rng() % 64) / 16.0;  // exact in binary
        out.push_back(e);
    }
    return out;
}

}  // namespace

TEST_SUITE("fw") {

TEST_CASE("common gradient of the valley cost is the total load") {
    const Vec g = common_gradient(vec({1, 2}), vec({0, 0}), CostModel::valley());
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
    const Vec gl = common_gradient(vec({5, 7}), vec({1, 1}),
                                   CostModel::linear(Vec::Constant(2, 3.0)));
    CHECK(gl[0] == 3.0);
    CHECK(gl[1] == 3.0);
}

TEST_CASE("sort_prices sorts ascending with stable tie-break") {
    CHECK(sort_prices(vec({3, 1, 2})) == std::vector<int>{1, 2, 0});
    CHECK(sort_prices(vec({1, 1, 1})) == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(sort_prices(vec({1, std::nan(""), 2})), NonFiniteGradient);
}

TEST_CASE("sort_prices yields a non-decreasing permutation on random data") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Vec g(96);
        for (int t = 0; t < 96; ++t) g[t] = (static_cast<double>(rng() % 2000) - 1000.0) / 97.0;
        const auto order = sort_prices(g);
        std::vector<int> sorted_copy = order;
        std::sort(sorted_copy.begin(), sorted_copy.end());
        for (int t = 0; t < 96; ++t) CHECK(sorted_copy[t] == t);
        for (std::size_t j = 1; j < order.size(); ++j)
            CHECK(g[order[j - 1]] <= g[order[j]]);
    }
}

TEST_CASE("greedy linear minimization fills cheapest slots first") {
    const std::vector<int> order{0, 1, 2};
    const Vec r = lmo_greedy(vec({2, 2, 2}), 3.0, order);
    CHECK(r[0] == 2.0);
    CHECK(r[1] == 1.0);
    CHECK(r[2] == 0.0);

    const Vec full = lmo_greedy(vec({2, 2, 2}), 6.0, order);
    CHECK(full[0] == 2.0);
    CHECK(full[1] == 2.0);
    CHECK(full[2] == 2.0);

    // unavailable slots carry zero caps and are skipped
    const Vec r2 = lmo_greedy(vec({0, 1, 1}), 1.0, order);
    CHECK(r2[0] == 0.0);
    CHECK(r2[1] == 1.0);
    CHECK(r2[2] == 0.0);

    CHECK_THROWS_AS(lmo_greedy(vec({1, 1, 1}), 4.0, order), EmptyFeasibleSet);
}

TEST_CASE("greedy minimizer matches a grid-search LP and beats random feasible points") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        Vec g(3), caps(3);
        for (int t = 0; t < 3; ++t) {
            g[t] = (static_cast<double>(rng() % 400) - 200.0) / 50.0;
            caps[t] = 0.5 + (rng() % 100) / 50.0;
        }
        const double budget = 0.9 * caps.sum() * (rng() % 100) / 100.0;
        const Vec r = lmo_greedy(caps, budget, sort_prices(g));
        CHECK(std::abs(r.sum() - budget) <= 1e-9 * std::max(budget, 1.0));

        const Vec grid = grid_lp_minimizer(g, caps, budget, 60);
        CHECK(g.dot(r) <= g.dot(grid) + 1e-9);

        // random feasible points never beat the greedy vertex
        for (int s = 0; s < 400; ++s) {
            Vec p(3);
            for (int t = 0; t < 3; ++t) p[t] = caps[t] * (rng() % 1000) / 1000.0;
            const double scale = p.sum() > 0 ? budget / p.sum() : 0.0;
            p *= scale;
            bool feasible = true;
            for (int t = 0; t < 3; ++t) feasible = feasible && p[t] <= caps[t] + 1e-12;
            if (!feasible) continue;
            CHECK(g.dot(r) <= g.dot(p) + 1e-9);
        }
    }
}

TEST_CASE("greedy output depends only on the price ordering") {
    std::mt19937_64 rng(29);
    const int T = 24;
    Vec caps(T);
    for (int t = 0; t < T; ++t) caps[t] = (rng() % 2) ? 2.5 : 0.0;
    const double budget = 0.7 * caps.sum();
    for (int trial = 0; trial < 50; ++trial) {
        Vec g(T);
        for (int t = 0; t < T; ++t) g[t] = (static_cast<double>(rng() % 2000) - 1000.0) / 37.0;
        const Vec base = lmo_greedy(caps, budget, sort_prices(g));
        // strictly increasing transforms preserve the ordering, hence the output
        const std::vector<std::function<double(double)>> transforms = {
            [](double x) { return 3.0 * x + 7.0; },
            [](double x) { return std::exp(x / 30.0); },
            [](double x) { return x * x * x; },
        };
        for (const auto& phi : transforms) {
            Vec gt(T);
            for (int t = 0; t < T; ++t) gt[t] = phi(g[t]);
            const Vec r = lmo_greedy(caps, budget, sort_prices(gt));
            CHECK((r - base).lpNorm<Eigen::Infinity>() == 0.0);
        }
    }
}

TEST_CASE("fw_step is the convex combination with eta = 2/(k+2)") {
    const Vec e = vec({5, 5, 5});
    const Vec r = vec({0, 1, 2});
    CHECK((fw_step(e, r, 0) - r).norm() == 0.0);  // eta_0 = 1
    const Vec mid = fw_step(vec({2, 0}), vec({0, 2}), 2);
    CHECK(mid[0] == doctest::Approx(1.0));
    CHECK(mid[1] == doctest::Approx(1.0));
    CHECK((fw_step(e, e, 5) - e).norm() == 0.0);
}

TEST_CASE("duality gap arithmetic") {
    const Vec g = vec({1, 2});
    CHECK(duality_gap(g, {vec({0, 1})}, {vec({0, 1})}) == 0.0);
    CHECK(duality_gap(g, {vec({0, 1})}, {vec({1, 0})}) == doctest::Approx(1.0));
}

TEST_CASE("tree aggregation sums a chain and flags star exposure") {
    std::vector<Vec> profiles{vec({1}), vec({2}), vec({3})};
    const auto chain = aggregate_over_tree(AggregationTree::chain(3), profiles);
    CHECK(chain.total[0] == 6.0);
    CHECK_FALSE(chain.privacy_warning);  // only the deepest EV leafs off mid-tree
    // star topology: every controller reports straight to the center
    const auto star = aggregate_over_tree(AggregationTree::star(3), profiles);
    CHECK(star.total[0] == 6.0);
    CHECK(star.privacy_warning);
    CHECK(star.exposed_evs.size() == 3);
}

TEST_CASE("tree aggregation equals direct summation") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const int M = 1 + static_cast<int>(rng() % 12);
        // dyadic profile values keep every partial sum exact, so any
        // association order must give identical bits
        const auto profiles = dyadic_profiles(rng, M, 5);
        const auto tree = AggregationTree::random_tree(M, rng());
        const auto res = aggregate_over_tree(tree, profiles);
        const Vec direct = aggregate_profiles(profiles, 5);
        CHECK((res.total - direct).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("tree aggregation rejects malformed trees") {
    AggregationTree bad;
    bad.parent = {-1, 0, 5};  // parent out of range
    CHECK_THROWS_AS(aggregate_over_tree(bad, {vec({1}), vec({1})}), DisconnectedTree);
    AggregationTree self;
    self.parent = {-1, 1};  // self-loop
    CHECK_THROWS_AS(aggregate_over_tree(self, {vec({1})}), DisconnectedTree);
}

TEST_CASE("a fully pinned EV converges in one iteration") {
    ChargingRequest req;
    req.id = "pinned";
    req.slots = {1, 2, 3};
    req.rate_cap = 2.0;
    req.energy_need = 6.0;  // equals capacity: unique feasible point
    FwStop stop;
    stop.eps_rel = -1.0;
    stop.gap_tol = 1e-12;
    const auto res = schedule({req}, vec({4, 1, 2}), CostModel::valley(), stop);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    for (int t = 0; t < 3; ++t) CHECK(res.profiles[0][t] == 2.0);
}

TEST_CASE("iterates are feasible from the first step on") {
    const auto fleet = build_random_fleet(5, 6, 10);
    const Vec d = build_random_base(6, 10);
    FwStop stop;
    stop.max_iter = 7;
    stop.eps_rel = -1.0;
    for (int iters : {1, 3, 7}) {
        FwStop st = stop;
        st.max_iter = iters;
        const auto res = schedule(fleet, d, CostModel::valley(), st);
        REQUIRE(res.profiles.size() == fleet.size());
        for (std::size_t m = 0; m < fleet.size(); ++m)
            CHECK(profile_feasible(fleet[m], res.profiles[m], 10));
    }
}

TEST_CASE("trace rows carry the open-loop step size and a nonnegative gap") {
    const auto fleet = build_random_fleet(8, 5, 12);
    const Vec d = build_random_base(9, 12);
    FwStop stop;
    stop.max_iter = 50;
    stop.eps_rel = -1.0;
    const auto res = schedule(fleet, d, CostModel::valley(), stop);
    REQUIRE(!res.trace.empty());
    for (const auto& row : res.trace) {
        CHECK(row.eta == doctest::Approx(2.0 / (row.iter + 2.0)));
        CHECK(row.gap >= -1e-9);
    }
}

TEST_CASE("scheduler reaches the oracle optimum on a small instance") {
    const auto fleet = build_random_fleet(123, 6, 10);
    const Vec d = build_random_base(124, 10);
    const auto ref = oracle::solve_aggregate(fleet, d, CostModel::valley(), 1e-10, 0.0);
    FwStop stop;
    stop.eps_rel = -1.0;
    stop.gap_tol_rel = 1e-8;
    stop.max_iter = 300000;
    const auto res = schedule(fleet, d, CostModel::valley(), stop);
    CHECK(res.converged);
    CHECK(res.cost == doctest::Approx(ref.optimum).epsilon(1e-7));
    CHECK(res.cost >= ref.optimum - 1e-9 * std::abs(ref.optimum));
}

TEST_CASE("scheduling is bitwise identical across worker counts") {
    const auto fleet = build_random_fleet(55, 9, 16);
    const Vec d = build_random_base(56, 16);
    FwStop stop;
    stop.max_iter = 200;
    stop.eps_rel = -1.0;
    const auto one = schedule(fleet, d, CostModel::valley(), stop, 1);
    const auto four = schedule(fleet, d, CostModel::valley(), stop, 4);
    REQUIRE(one.profiles.size() == four.profiles.size());
    for (std::size_t m = 0; m < one.profiles.size(); ++m)
        CHECK((one.profiles[m] - four.profiles[m]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(one.cost == four.cost);
}

}  // TEST_SUITE

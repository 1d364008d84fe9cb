#include <doctest.h>

#include <cmath>
#include <random>

#include "evsched/errors.hpp"
#include "evsched/fw.hpp"
#include "evsched/instances.hpp"
#include "evsched/oracle.hpp"
#include "evsched/pgd.hpp"

using namespace evsched;

namespace {

Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

Vec random_vec(std::mt19937_64& rng, int T, double lo, double hi) {
    Vec v(T);
    for (int t = 0; t < T; ++t) v[t] = lo + (hi - lo) * (rng() % 10000) / 10000.0;
    return v;
}

// Dense grid search for the projection, T = 3 only.
Vec grid_projection(const Vec& v, const Vec& caps, double budget, int steps) {
    Vec best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const double e0 = caps[0] * i / steps;
        for (int j = 0; j <= steps; ++j) {
            const double e1 = caps[1] * j / steps;
            const double e2 = budget - e0 - e1;
            if (e2 < -1e-9 || e2 > caps[2] + 1e-9) continue;
            Vec e = vec({e0, e1, std::clamp(e2, 0.0, caps[2])});
            const double val = (e - v).squaredNorm();
            if (val < best_val) {
                best_val = val;
                best = e;
            }
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("pgd") {

TEST_CASE("projection is the identity on feasible points") {
    const Vec v = vec({0.5, 1.0, 0.25});
    const Vec caps = vec({1, 1, 1});
    const Vec p = project_capped_simplex(v, caps, v.sum());
    CHECK((p - v).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("projection handles the hand-worked KKT example") {
    // tau = -0.5: clip(10.5)->1, clip(0.5)->0.5, clip(0.5)->0.5
    const Vec p = project_capped_simplex(vec({10, 0, 0}), vec({1, 1, 1}), 2.0);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-9));
    const Vec grid = grid_projection(vec({10, 0, 0}), vec({1, 1, 1}), 2.0, 200);
    CHECK((p - grid).lpNorm<Eigen::Infinity>() <= 1e-2);
}

TEST_CASE("projection with budget equal to capacity returns the caps") {
    const Vec caps = vec({1, 2, 0.5});
    const Vec p = project_capped_simplex(vec({-3, 9, 0}), caps, caps.sum());
    CHECK((p - caps).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("projection rejects impossible budgets") {
    CHECK_THROWS_AS(project_capped_simplex(vec({0, 0}), vec({1, 1}), 3.0), InfeasibleBudget);
    CHECK_THROWS_AS(project_capped_simplex(vec({0, 0}), vec({1, 1}), -0.5), InfeasibleBudget);
}

TEST_CASE("projection output is feasible and matches the reference oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const int T = 2 + static_cast<int>(rng() % 6);
        const Vec caps = random_vec(rng, T, 0.0, 2.0);
        const Vec v = random_vec(rng, T, -3.0, 3.0);
        const double budget = caps.sum() * (rng() % 1000) / 1000.0;
        const Vec p = project_capped_simplex(v, caps, budget);
        for (int t = 0; t < T; ++t) {
            CHECK(p[t] >= 0.0);
            CHECK(p[t] <= caps[t]);
        }
        CHECK(std::abs(p.sum() - budget) <= 1e-10 * std::max(budget, 1.0));
        const Vec ref = oracle::project_capped_simplex_ref(v, caps, budget);
        CHECK((p - ref).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("projection is non-expansive") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const int T = 4;
        const Vec caps = random_vec(rng, T, 0.2, 2.0);
        const double budget = 0.6 * caps.sum();
        const Vec u = random_vec(rng, T, -4.0, 4.0);
        const Vec w = random_vec(rng, T, -4.0, 4.0);
        const Vec pu = project_capped_simplex(u, caps, budget);
        const Vec pw = project_capped_simplex(w, caps, budget);
        CHECK((pu - pw).norm() <= (u - w).norm() + 1e-9);
    }
}

TEST_CASE("no EVs yields the bare base-load cost") {
    const Vec d = vec({1, 2, 3});
    const auto res = pgd_schedule({}, d, CostModel::valley(), {});
    CHECK(res.converged);
    CHECK(res.cost == doctest::Approx(0.5 * (1 + 4 + 9)));
    CHECK(res.profiles.empty());
}

TEST_CASE("single EV on a flat valley splits its energy evenly") {
    ChargingRequest req;
    req.id = "solo";
    req.slots = {1, 2};
    req.rate_cap = 1.0;
    req.energy_need = 1.0;
    PgdConfig config;
    config.eps_rel = 1e-12;
    config.max_iter = 100000;
    const auto res = pgd_schedule({req}, vec({0, 0}), CostModel::valley(), config);
    CHECK(res.profiles[0][0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(res.profiles[0][1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("cost decreases monotonically with the default step") {
    const auto fleet = build_random_fleet(31, 7, 12);
    const Vec d = build_random_base(32, 12);
    PgdConfig config;
    config.eps_rel = -1.0;
    config.max_iter = 400;
    const auto res = pgd_schedule(fleet, d, CostModel::valley(), config);
    CHECK(res.step == doctest::Approx(1.0 / 7.0));
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].cost <= res.trace[i - 1].cost + 1e-9);
}

TEST_CASE("projected gradient reaches the oracle optimum") {
    const auto fleet = build_random_fleet(77, 5, 9);
    const Vec d = build_random_base(78, 9);
    const auto ref = oracle::solve_aggregate(fleet, d, CostModel::valley(), 1e-10, 0.0);
    PgdConfig config;
    config.eps_rel = 1e-13;
    config.max_iter = 200000;
    const auto res = pgd_schedule(fleet, d, CostModel::valley(), config);
    CHECK(res.cost == doctest::Approx(ref.optimum).epsilon(1e-7));
}

}  // TEST_SUITE

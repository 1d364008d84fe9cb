#include <doctest.h>

#include <random>

#include "evsched/errors.hpp"
#include "evsched/fleet.hpp"
#include "evsched/fw.hpp"

using namespace evsched;

namespace {

ChargingRequest make_request(std::vector<int> slots, double rate, double need) {
    ChargingRequest req;
    req.id = "test";
    req.slots = std::move(slots);
    req.rate_cap = rate;
    req.energy_need = need;
    return req;
}

}  // namespace

TEST_SUITE("fleet") {

TEST_CASE("validate_request accepts the boundary case R = |window| * cap") {
    CHECK_NOTHROW(validate_request(make_request({1, 2}, 3.45, 6.9), 4));
}

TEST_CASE("validate_request rejects an empty feasible set") {
    CHECK_THROWS_AS(validate_request(make_request({1}, 3.45, 4.0), 4), EmptyFeasibleSet);
}

TEST_CASE("validate_request rejects slots outside the horizon") {
    CHECK_THROWS_AS(validate_request(make_request({5}, 1.0, 1.0), 4), IndexOutOfRange);
    CHECK_THROWS_AS(validate_request(make_request({0}, 1.0, 0.5), 4), IndexOutOfRange);
}

TEST_CASE("validate_request rejects negative or non-finite parameters") {
    CHECK_THROWS_AS(validate_request(make_request({1}, -1.0, 0.5), 4), ValidationError);
    CHECK_THROWS_AS(validate_request(make_request({1}, 1.0, -0.5), 4), ValidationError);
    CHECK_THROWS_AS(
        validate_request(make_request({1}, std::numeric_limits<double>::infinity(), 1.0), 4),
        ValidationError);
}

TEST_CASE("energy_need_from_soc") {
    CHECK(energy_need_from_soc(20.0, 0.0, 15.0, 0.9) == doctest::Approx(0.0));
    // s_soc = 0.9 - 40*15/(100*20) = 0.6, need = 0.3 * 20
    CHECK(energy_need_from_soc(20.0, 40.0, 15.0, 0.9) == doctest::Approx(6.0));
    // initial SOC clamps at zero for long daily mileage
    CHECK(energy_need_from_soc(20.0, 200.0, 15.0, 0.9) == doctest::Approx(18.0));
    CHECK_THROWS_AS(energy_need_from_soc(0.0, 10.0, 15.0, 0.9), NonPositiveCapacity);
}

TEST_CASE("total_cost evaluates the aggregate valley cost") {
    Vec d(2);
    d << 1.0, 1.0;
    CHECK(total_cost({}, d, CostModel::valley()) == doctest::Approx(1.0));
    Vec e(2);
    e << 1.0, 0.0;
    CHECK(total_cost({e}, d, CostModel::valley()) == doctest::Approx(2.5));
    Vec bad(3);
    CHECK_THROWS_AS(total_cost({bad}, d, CostModel::valley()), LengthMismatch);
}

TEST_CASE("quadratic cost derivative matches finite differences") {
    Vec a(2), b(2);
    a << 1.0, 2.0;
    b << 0.0, 1.0;
    const CostModel cost = CostModel::quadratic(a, b);
    Vec d(2), agg(2);
    d << 1.0, 1.0;
    agg << 1.0, 0.0;
    const Vec g = common_gradient(d, agg, cost);
    CHECK(g[0] == doctest::Approx(4.0));
    CHECK(g[1] == doctest::Approx(5.0));
    const double h = 1e-6;
    for (int t = 0; t < 2; ++t) {
        const double x = d[t] + agg[t];
        const double fd = (cost.eval(t, x + h) - cost.eval(t, x - h)) / (2.0 * h);
        CHECK(g[t] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("cost is convex along segments between profile sets") {
    std::mt19937_64 rng(7);
    const int T = 6;
    Vec d(T);
    for (int t = 0; t < T; ++t) d[t] = 1.0 + (rng() % 100) / 25.0;
    const CostModel cost = CostModel::valley();
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Vec> A, B, mid;
        for (int m = 0; m < 3; ++m) {
            Vec a = Vec::Zero(T), b = Vec::Zero(T);
            for (int t = 0; t < T; ++t) {
                a[t] = (rng() % 1000) / 500.0;
                b[t] = (rng() % 1000) / 500.0;
            }
            mid.push_back(0.5 * (a + b));
            A.push_back(std::move(a));
            B.push_back(std::move(b));
        }
        CHECK(total_cost(mid, d, cost) <=
              0.5 * total_cost(A, d, cost) + 0.5 * total_cost(B, d, cost) + 1e-9);
    }
}

TEST_CASE("feasibility is decided exactly as the uniform-price greedy succeeds") {
    std::mt19937_64 rng(11);
    const int T = 8;
    std::vector<int> uniform_order(T);
    for (int t = 0; t < T; ++t) uniform_order[t] = t;
    for (int trial = 0; trial < 300; ++trial) {
        ChargingRequest req;
        req.id = "p" + std::to_string(trial);
        for (int s = 1; s <= T; ++s)
            if (rng() % 2) req.slots.push_back(s);
        if (req.slots.empty()) req.slots.push_back(1);
        req.rate_cap = (rng() % 100) / 33.0;
        // straddle the feasibility boundary
        const double capacity = req.slots.size() * req.rate_cap;
        req.energy_need = capacity * ((rng() % 140) / 100.0);

        bool valid = true;
        try {
            validate_request(req, T);
        } catch (const EmptyFeasibleSet&) {
            valid = false;
        }
        bool greedy_ok = true;
        try {
            const Vec r = lmo_greedy(req, uniform_order, T);
            greedy_ok = profile_feasible(req, r, T);
        } catch (const EmptyFeasibleSet&) {
            greedy_ok = false;
        }
        CHECK(valid == greedy_ok);
    }
}

}  // TEST_SUITE

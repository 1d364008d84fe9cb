#include "evsched/pgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evsched/errors.hpp"
#include "evsched/fw.hpp"
#include "evsched/parallel.hpp"

namespace evsched {

Vec project_capped_simplex(const Vec& v, const Vec& caps, double budget) {
    const int T = static_cast<int>(v.size());
    if (caps.size() != T) throw LengthMismatch("projection: caps length differs from point");
    double capacity = 0.0;
    for (int t = 0; t < T; ++t) {
        if (caps[t] < 0.0) throw InfeasibleBudget("projection: negative cap");
        capacity += caps[t];
    }
    const double tol = 1e-10 * std::max(budget, 1.0);
    // run the bisection well past the documented budget tolerance so the
    // returned point is a projection to near machine precision
    const double exit_tol = 1e-14 * std::max(budget, 1.0);
    if (budget < -tol || budget > capacity + tol)
        throw InfeasibleBudget("projection: budget outside [0, sum caps]");
    if (budget >= capacity - exit_tol) return caps;  // unique feasible point
    if (budget <= exit_tol && budget >= -tol) {
        // clip(v - tau, 0, caps) with tau large enough; sum 0 is attained at 0.
        return Vec::Zero(T);
    }

    auto clipped_sum = [&](double tau, Vec* out) {
        double s = 0.0;
        for (int t = 0; t < T; ++t) {
            const double e = std::clamp(v[t] - tau, 0.0, caps[t]);
            if (out) (*out)[t] = e;
            s += e;
        }
        return s;
    };

    double lo = v.minCoeff() - caps.maxCoeff();  // sum(lo) >= capacity >= budget
    double hi = v.maxCoeff();                    // sum(hi) == 0 <= budget
    Vec e(T);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = clipped_sum(mid, nullptr);
        if (std::abs(s - budget) <= exit_tol) {
            clipped_sum(mid, &e);
            return e;
        }
        if (s > budget)
            lo = mid;
        else
            hi = mid;
    }
    clipped_sum(0.5 * (lo + hi), &e);
    // The clipped sum is piecewise linear in tau with slope at most T, so 200
    // halvings leave the budget residual far below tolerance; distribute any
    // leftover over the free coordinates.
    double residual = budget - e.sum();
    if (std::abs(residual) > tol) {
        for (int t = 0; t < T && std::abs(residual) > 0.0; ++t) {
            const double room = residual > 0.0 ? caps[t] - e[t] : -e[t];
            const double d = residual > 0.0 ? std::min(residual, room) : std::max(residual, room);
            e[t] += d;
            residual -= d;
        }
    }
    return e;
}

PgdResult pgd_schedule(const std::vector<ChargingRequest>& fleet, const Vec& base_load,
                       const CostModel& cost, const PgdConfig& config, int threads) {
    const int T = static_cast<int>(base_load.size());
    const std::size_t M = fleet.size();
    for (const auto& req : fleet) validate_request(req, T);

    PgdResult res;
    if (M == 0) {
        res.cost = cost_of_aggregate(Vec::Zero(T), base_load, cost);
        res.converged = true;
        return res;
    }

    double step = config.step;
    if (step <= 0.0) {
        const double curvature = cost.max_curvature(T);
        step = curvature > 0.0 ? 1.0 / (static_cast<double>(M) * curvature) : 1.0;
    }
    res.step = step;

    std::vector<Vec> caps(M);
    for (std::size_t m = 0; m < M; ++m) caps[m] = slot_caps(fleet[m], T);

    // Feasible start: greedy allocation under uniform prices.
    std::vector<int> uniform(T);
    std::iota(uniform.begin(), uniform.end(), 0);
    std::vector<Vec> e(M);
    for (std::size_t m = 0; m < M; ++m)
        e[m] = lmo_greedy(caps[m], fleet[m].energy_need, uniform);

    Vec agg = aggregate_profiles(e, T);
    double prev_cost = std::numeric_limits<double>::quiet_NaN();
    int small_change_streak = 0;
    const int eps_window = std::max(config.eps_window, 1);
    int k = 0;
    for (;; ++k) {
        const double cost_k = cost_of_aggregate(agg, base_load, cost);
        res.trace.push_back({k, cost_k});
        res.cost = cost_k;
        if (std::isfinite(prev_cost) && config.eps_rel >= 0.0) {
            const bool small = std::abs(cost_k - prev_cost) <=
                               config.eps_rel * std::max(std::abs(cost_k), 1e-12);
            small_change_streak = small ? small_change_streak + 1 : 0;
            if (small_change_streak >= eps_window) {
                res.converged = true;
                break;
            }
        }
        prev_cost = cost_k;
        if (k >= config.max_iter) break;

        const Vec g = common_gradient(base_load, agg, cost);
        parallel_for(M, threads, [&](std::size_t m) {
            e[m] = project_capped_simplex(e[m] - step * g, caps[m], fleet[m].energy_need);
        });
        agg = aggregate_profiles(e, T);
    }

    res.iterations = k;
    res.profiles = std::move(e);
    return res;
}

}  // namespace evsched

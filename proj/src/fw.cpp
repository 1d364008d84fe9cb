#include "evsched/fw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "evsched/errors.hpp"
#include "evsched/parallel.hpp"

namespace evsched {

Vec common_gradient(const Vec& base_load, const Vec& aggregate, const CostModel& cost) {
    if (base_load.size() != aggregate.size())
        throw LengthMismatch("gradient: base load and aggregate lengths differ");
    const int T = static_cast<int>(base_load.size());
    Vec g(T);
    for (int t = 0; t < T; ++t) g[t] = cost.deriv(t, base_load[t] + aggregate[t]);
    return g;
}

std::vector<int> sort_prices(const Vec& g) {
    const int T = static_cast<int>(g.size());
    for (int t = 0; t < T; ++t) {
        if (!std::isfinite(g[t]))
            throw NonFiniteGradient("price sort: non-finite gradient entry at slot " +
                                    std::to_string(t + 1));
    }
    std::vector<int> order(T);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (g[i] != g[j]) return g[i] < g[j];
        return i < j;  // stable tie-break by slot index
    });
    return order;
}

Vec lmo_greedy(const Vec& caps, double budget, const std::vector<int>& order) {
    const int T = static_cast<int>(caps.size());
    if (static_cast<int>(order.size()) != T)
        throw LengthMismatch("lmo: ordering length differs from horizon");
    Vec r = Vec::Zero(T);
    double remaining = budget;
    for (int idx : order) {
        if (remaining <= 0.0) break;
        const double take = std::min(caps[idx], remaining);
        r[idx] = take;
        remaining -= take;
    }
    if (remaining > 1e-9 * std::max(budget, 1.0))
        throw EmptyFeasibleSet("lmo: window capacity short of the energy need by " +
                               std::to_string(remaining));
    return r;
}

Vec lmo_greedy(const ChargingRequest& req, const std::vector<int>& order, int T) {
    return lmo_greedy(slot_caps(req, T), req.energy_need, order);
}

double fw_step_size(int k) { return 2.0 / (k + 2.0); }

Vec fw_step(const Vec& e, const Vec& r, int k) {
    if (e.size() != r.size()) throw LengthMismatch("step: profile lengths differ");
    const double eta = fw_step_size(k);
    return (1.0 - eta) * e + eta * r;
}

double duality_gap(const Vec& g, const std::vector<Vec>& profiles,
                   const std::vector<Vec>& lmo_profiles) {
    if (profiles.size() != lmo_profiles.size())
        throw LengthMismatch("gap: profile counts differ");
    double gap = 0.0;
    for (std::size_t m = 0; m < profiles.size(); ++m) {
        if (profiles[m].size() != g.size() || lmo_profiles[m].size() != g.size())
            throw LengthMismatch("gap: profile length differs from gradient");
        gap += g.dot(profiles[m] - lmo_profiles[m]);
    }
    return gap;
}

AggregationTree AggregationTree::star(int num_evs) {
    AggregationTree t;
    t.parent.assign(num_evs + 1, 0);
    t.parent[0] = -1;
    return t;
}

AggregationTree AggregationTree::chain(int num_evs) {
    AggregationTree t;
    t.parent.resize(num_evs + 1);
    t.parent[0] = -1;
    for (int i = 1; i <= num_evs; ++i) t.parent[i] = i - 1;
    return t;
}

AggregationTree AggregationTree::random_tree(int num_evs, std::uint64_t seed) {
    AggregationTree t;
    t.parent.resize(num_evs + 1);
    t.parent[0] = -1;
    std::mt19937_64 rng(seed);
    for (int i = 1; i <= num_evs; ++i)
        t.parent[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
    return t;
}

AggregateResult aggregate_over_tree(const AggregationTree& tree,
                                    const std::vector<Vec>& profiles) {
    const int n = static_cast<int>(tree.parent.size());
    if (n != static_cast<int>(profiles.size()) + 1)
        throw DisconnectedTree("tree must have one node per EV plus the center");
    if (n == 0 || tree.parent[0] != -1)
        throw DisconnectedTree("node 0 must be the root");
    std::vector<std::vector<int>> children(n);
    for (int i = 1; i < n; ++i) {
        if (tree.parent[i] < 0 || tree.parent[i] >= n || tree.parent[i] == i)
            throw DisconnectedTree("node " + std::to_string(i) + " has invalid parent");
        children[tree.parent[i]].push_back(i);
    }
    for (auto& c : children) std::sort(c.begin(), c.end());

    const int T = profiles.empty() ? 0 : static_cast<int>(profiles[0].size());
    // Bottom-up accumulation in depth order; message[i] is the subtree total
    // that node i forwards to its parent.
    std::vector<Vec> message(n);
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> stack{0};
    std::vector<bool> seen(n, false);
    seen[0] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        order.push_back(u);
        for (int c : children[u]) {
            seen[c] = true;
            stack.push_back(c);
        }
    }
    if (static_cast<int>(order.size()) != n)
        throw DisconnectedTree("tree does not span all controllers");

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        Vec acc = (u == 0) ? Vec::Zero(T) : profiles[u - 1];
        for (int c : children[u]) acc += message[c];
        message[u] = std::move(acc);
    }

    AggregateResult res;
    res.total = std::move(message[0]);
    for (int c : children[0]) {
        if (children[c].empty()) {
            // The center receives this EV's own profile unaggregated.
            res.privacy_warning = true;
            res.exposed_evs.push_back(c - 1);
        }
    }
    return res;
}

FwResult schedule(const std::vector<ChargingRequest>& fleet, const Vec& base_load,
                  const CostModel& cost, const FwStop& stop, int threads,
                  const std::vector<Vec>* warm_start, const AggregationTree* tree) {
    const int T = static_cast<int>(base_load.size());
    const std::size_t M = fleet.size();
    for (const auto& req : fleet) validate_request(req, T);

    FwResult res;
    if (M == 0) {
        res.cost = cost_of_aggregate(Vec::Zero(T), base_load, cost);
        res.converged = true;
        return res;
    }

    std::vector<Vec> caps(M);
    for (std::size_t m = 0; m < M; ++m) caps[m] = slot_caps(fleet[m], T);

    std::vector<Vec> e(M, Vec::Zero(T));
    if (warm_start) {
        if (warm_start->size() != M) throw LengthMismatch("warm start: profile count differs");
        e = *warm_start;
    }

    auto aggregate = [&](const std::vector<Vec>& profiles) -> Vec {
        if (tree) return aggregate_over_tree(*tree, profiles).total;
        return aggregate_profiles(profiles, T);
    };

    if (tree) {
        const auto agg0 = aggregate_over_tree(*tree, e);
        if (agg0.privacy_warning)
            res.warnings.push_back("aggregation tree exposes " +
                                   std::to_string(agg0.exposed_evs.size()) +
                                   " individual profile(s) to the center");
    }

    Vec agg = aggregate(e);
    std::vector<Vec> lmo(M);
    double prev_cost = std::numeric_limits<double>::quiet_NaN();
    int increase_count = 0;
    double worst_increase = 0.0;
    int small_change_streak = 0;
    const int eps_window = std::max(stop.eps_window, 1);

    int k = 0;
    for (;; ++k) {
        const Vec g = common_gradient(base_load, agg, cost);
        const auto order = sort_prices(g);
        parallel_for(M, threads,
                     [&](std::size_t m) { lmo[m] = lmo_greedy(caps[m], fleet[m].energy_need, order); });

        if (k >= 1) {
            const double cost_k = cost_of_aggregate(agg, base_load, cost);
            const double gap_k = duality_gap(g, e, lmo);
            res.trace.push_back({k, cost_k, gap_k, fw_step_size(k)});
            res.cost = cost_k;
            res.gap = gap_k;

            if (std::isfinite(prev_cost)) {
                if (cost_k > prev_cost + 1e-9) {
                    ++increase_count;
                    worst_increase = std::max(worst_increase, cost_k - prev_cost);
                }
                if (stop.eps_rel >= 0.0) {
                    const bool small = std::abs(cost_k - prev_cost) <=
                                       stop.eps_rel * std::max(std::abs(cost_k), 1e-12);
                    small_change_streak = small ? small_change_streak + 1 : 0;
                    if (small_change_streak >= eps_window) res.converged = true;
                }
            }
            if (stop.gap_tol >= 0.0 && gap_k <= stop.gap_tol) res.converged = true;
            if (stop.gap_tol_rel >= 0.0 &&
                gap_k <= stop.gap_tol_rel * std::max(std::abs(cost_k), 1.0))
                res.converged = true;
            prev_cost = cost_k;
            if (res.converged) break;
        }
        if (k >= stop.max_iter) break;

        parallel_for(M, threads, [&](std::size_t m) {
            Vec next = fw_step(e[m], lmo[m], k);
            // the convex combination can overshoot a cap by one ulp; the box
            // invariant is exact, so pin it
            for (int t = 0; t < T; ++t) next[t] = std::clamp(next[t], 0.0, caps[m][t]);
            e[m] = std::move(next);
        });
        agg = aggregate(e);
    }

    res.iterations = k;
    res.profiles = std::move(e);
    if (res.trace.empty()) {
        res.cost = cost_of_aggregate(agg, base_load, cost);
    }
    if (increase_count > 0) {
        res.warnings.push_back("cost increased on " + std::to_string(increase_count) +
                               " iteration(s), worst by " + std::to_string(worst_increase) +
                               " (open-loop steps are not monotone)");
    }
    return res;
}

}  // namespace evsched

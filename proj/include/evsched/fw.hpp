#ifndef EVSCHED_FW_HPP_
#define EVSCHED_FW_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "evsched/fleet.hpp"

namespace evsched {

// Stopping rule for the conditional-gradient scheduler. Any enabled criterion
// triggers termination; max_iter always applies.
struct FwStop {
    int max_iter = 100000;
    double eps_rel = 1e-7;      // relative cost change between iterations; <0 disables
    int eps_window = 10;        // consecutive iterations the change must stay below eps_rel
                                // (the cost sequence is not monotone, so a single small
                                // step does not indicate convergence)
    double gap_tol = -1.0;      // absolute duality-gap threshold; <0 disables
    double gap_tol_rel = -1.0;  // gap <= tol * max(1, |cost|); <0 disables
};

struct FwIterRecord {
    int iter;     // k >= 1 (the all-zeros start is not recorded)
    double cost;  // C(e^k) before the step at k
    double gap;   // sum_m g^T (e_m^k - r_m^k)
    double eta;   // step size applied at k: 2/(k+2)
};

struct FwResult {
    std::vector<Vec> profiles;
    std::vector<FwIterRecord> trace;
    double cost = 0.0;
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

// Common partial gradient g(t) = C_t'(d(t) + aggregate(t)).
Vec common_gradient(const Vec& base_load, const Vec& aggregate, const CostModel& cost);

// Price ordering: permutation p of 0..T-1 with g[p_0] <= g[p_1] <= ...,
// ties broken by ascending slot index. Throws NonFiniteGradient.
std::vector<int> sort_prices(const Vec& g);

// Greedy linear-minimization step over the capped simplex
// {r : sum r = budget, 0 <= r <= caps}: fill caps along the price order and
// place the remainder at the pivot slot. caps must carry at least `budget`.
Vec lmo_greedy(const Vec& caps, double budget, const std::vector<int>& order);
Vec lmo_greedy(const ChargingRequest& req, const std::vector<int>& order, int T);

// Convex-combination update (1 - eta_k) e + eta_k r with eta_k = 2/(k+2).
Vec fw_step(const Vec& e, const Vec& r, int k);

double fw_step_size(int k);

// sum_m g^T (e_m - r_m); nonnegative whenever each r_m minimizes g^T r and
// each e_m is feasible. Upper-bounds the suboptimality of {e_m}.
double duality_gap(const Vec& g, const std::vector<Vec>& profiles,
                   const std::vector<Vec>& lmo_profiles);

// Message-passing aggregation tree: node 0 is the charging center, node i>=1
// is EV controller i-1.
struct AggregationTree {
    std::vector<int> parent;  // parent[0] == -1

    static AggregationTree star(int num_evs);
    static AggregationTree chain(int num_evs);
    static AggregationTree random_tree(int num_evs, std::uint64_t seed);
};

struct AggregateResult {
    Vec total;
    bool privacy_warning = false;   // a leaf hangs directly off the center
    std::vector<int> exposed_evs;   // EV indices whose exact profile the center sees
};

// Bottom-up sum over the tree. Each node forwards only its subtree total, in
// fixed (ascending) child order. Throws DisconnectedTree.
AggregateResult aggregate_over_tree(const AggregationTree& tree,
                                    const std::vector<Vec>& profiles);

// Decentralized scheduling: start from all-zeros profiles, iterate
// gradient -> price sort -> per-EV greedy -> convex-combination step.
// warm_start, when given, seeds the profiles used for the first gradient
// (the k=0 full step restores feasibility regardless).
FwResult schedule(const std::vector<ChargingRequest>& fleet, const Vec& base_load,
                  const CostModel& cost, const FwStop& stop, int threads = 1,
                  const std::vector<Vec>* warm_start = nullptr,
                  const AggregationTree* tree = nullptr);

}  // namespace evsched

#endif  // EVSCHED_FW_HPP_

#ifndef EVSCHED_PGD_HPP_
#define EVSCHED_PGD_HPP_

#include <string>
#include <vector>

#include "evsched/fleet.hpp"

namespace evsched {

struct PgdConfig {
    double step = 0.0;  // <=0 selects 1 / (M * max_t C_t'')
    int max_iter = 100000;
    double eps_rel = 1e-7;  // relative cost change; <0 disables
    int eps_window = 10;    // consecutive iterations below eps_rel before stopping
};

struct PgdIterRecord {
    int iter;
    double cost;
};

struct PgdResult {
    std::vector<Vec> profiles;
    std::vector<PgdIterRecord> trace;
    double cost = 0.0;
    double step = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Euclidean projection onto {e : sum e = budget, 0 <= e <= caps}:
// e(t) = clip(v(t) - tau, 0, caps(t)) with tau found by bisection.
// Budget matched to 1e-10 * max(budget, 1); box constraints exact.
Vec project_capped_simplex(const Vec& v, const Vec& caps, double budget);

// Projected gradient descent on the aggregate charging problem, started from
// the greedy feasible point under uniform prices.
PgdResult pgd_schedule(const std::vector<ChargingRequest>& fleet, const Vec& base_load,
                       const CostModel& cost, const PgdConfig& config, int threads = 1);

}  // namespace evsched

#endif  // EVSCHED_PGD_HPP_

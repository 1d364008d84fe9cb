#ifndef EVSCHED_ORACLE_HPP_
#define EVSCHED_ORACLE_HPP_

#include <utility>
#include <vector>

#include "evsched/fleet.hpp"
#include "evsched/grid.hpp"

// Desk-scale reference solvers used by tests and `compare --oracle`. These
// reimplement every numerical step (projections, linear minimization, cost
// evaluation) separately from the production modules so that agreement
// between the two is evidence rather than tautology.
namespace evsched::oracle {

struct AggregateReport {
    double optimum = 0.0;
    std::vector<Vec> profiles;
    double gap = 0.0;  // duality-gap certificate at the returned point
    int iterations = 0;
    bool certified = false;
};

// Long-run projected gradient with exact capped-simplex projection for the
// aggregate charging problem. Stops when the duality gap falls below
// gap_tol + gap_tol_rel * |cost|. Throws NotConverged past max_iter.
AggregateReport solve_aggregate(const std::vector<ChargingRequest>& fleet, const Vec& base_load,
                                const CostModel& cost, double gap_tol = 1e-10,
                                double gap_tol_rel = 0.0, int max_iter = 2000000);

// Exact projection onto {e : sum e = budget, 0 <= e <= caps} via a
// breakpoint scan of the piecewise-linear dual.
Vec project_capped_simplex_ref(const Vec& v, const Vec& caps, double budget);

// Projection onto {(P,Q) : P^2 + Q^2 <= radius^2} via golden-section search
// on the scalar dual.
std::pair<double, double> project_disk_ref(double P, double Q, double radius);

// Projection onto {(P,Q) in R^3 x R^3 : (1'P)^2 + (1'Q)^2 <= cap^2} via
// golden-section search on the scalar dual with a dense inner solve.
std::pair<Vec3, Vec3> project_feeder_cap_ref(const Vec3& P, const Vec3& Q, double cap);

struct NetworkOracleOptions {
    double feas_tol = 1e-8;
    double stat_tol = 1e-6;
    int max_outer = 80;
    int max_inner = 200000;
    double sigma0 = 10.0;
    double sigma_max = 1e6;
};

struct NetworkReport {
    double optimum = 0.0;
    GridState state;
    std::vector<Vec> profiles;
    double feasibility = 0.0;    // max equality-constraint violation
    double stationarity = 0.0;   // unit-step projected-gradient residual
    int iterations = 0;          // total inner iterations
    bool certified = false;
};

// Monolithic reference solve of the network-constrained charging problem by
// an augmented-Lagrangian outer loop with projected-gradient inner loop over
// the explicit stacked variable vector. Intended for tiny instances
// (N <= 5 buses, T <= 8, M <= 6).
NetworkReport solve_network(const FeederModel& feeder,
                            const std::vector<ChargingRequest>& fleet, const BusSeries& d_p,
                            const BusSeries& d_q, const NetworkOracleOptions& opts = {});

}  // namespace evsched::oracle

#endif  // EVSCHED_ORACLE_HPP_

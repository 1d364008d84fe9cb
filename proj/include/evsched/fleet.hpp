#ifndef EVSCHED_FLEET_HPP_
#define EVSCHED_FLEET_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace evsched {

using Vec = Eigen::VectorXd;

// One EV charging request over a horizon of T slots. Slot indices are
// 1-based; the plug-in window need not be consecutive. Power and energy are
// used interchangeably (slot duration is metadata only).
struct ChargingRequest {
    std::string id;
    std::vector<int> slots;    // 1-based plug-in slots, sorted, unique
    double rate_cap = 0.0;     // max charge per connected slot
    double energy_need = 0.0;  // total energy over the horizon
    int bus = -1;              // feeder placement; ignored by the aggregate problem
    int phase = -1;            // 0=a, 1=b, 2=c; -1 when not placed
};

// Per-slot charge caps over the horizon: rate_cap on plug-in slots, 0 elsewhere.
// Throws IndexOutOfRange when a slot falls outside 1..T.
Vec slot_caps(const ChargingRequest& req, int T);

// Rejects requests whose feasible set is empty (energy need exceeding window
// capacity) or whose slots fall outside the horizon.
void validate_request(const ChargingRequest& req, int T);

// Energy needed to reach target_soc after daily_miles of driving:
//   s_soc = target_soc - miles * e100 / (100 * battery), clamped to [0, 1]
//   need  = (target_soc - s_soc) * battery, clamped to >= 0.
// Charging efficiency is taken as 1.
double energy_need_from_soc(double battery_kwh, double daily_miles, double e100_kwh,
                            double target_soc);

// True iff e lies in the request's feasible set: box constraints exact, budget
// within 1e-9 * max(energy_need, 1).
bool profile_feasible(const ChargingRequest& req, const Vec& e, int T);

enum class CostKind { QuadraticValley, ConvexQuadratic, Linear };

// Per-slot convex cost C_t. QuadraticValley is x^2/2 for every slot;
// ConvexQuadratic is a_t x^2 + b_t x + c_t with a_t >= 0; Linear is b_t x + c_t.
struct CostModel {
    CostKind kind = CostKind::QuadraticValley;
    Vec a, b, c;

    static CostModel valley();
    static CostModel quadratic(Vec a, Vec b, Vec c = Vec());
    static CostModel quadratic_uniform(double a, double b, int T);
    static CostModel linear(Vec b);

    double eval(int t, double x) const;
    double deriv(int t, double x) const;
    // Upper bound on C_t'' over slots (curvature; 0 for linear costs).
    double max_curvature(int T) const;
};

// Sum of per-EV profiles in fixed index order. Profiles must all have length T.
Vec aggregate_profiles(const std::vector<Vec>& profiles, int T);

// Total cost sum_t C_t(d(t) + sum_m e_m(t)).
double total_cost(const std::vector<Vec>& profiles, const Vec& base_load,
                  const CostModel& cost);

// Cost of an aggregate load directly: sum_t C_t(d(t) + agg(t)).
double cost_of_aggregate(const Vec& aggregate, const Vec& base_load, const CostModel& cost);

}  // namespace evsched

#endif  // EVSCHED_FLEET_HPP_

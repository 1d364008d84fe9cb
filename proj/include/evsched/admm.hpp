#ifndef EVSCHED_ADMM_HPP_
#define EVSCHED_ADMM_HPP_

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "evsched/fleet.hpp"
#include "evsched/grid.hpp"

namespace evsched {

struct AdmmConfig {
    double rho = 1.0;
    int max_iter = 20000;
    double tol = 1e-3;  // stop when both residuals <= tol * T * sqrt(num_buses)
    int threads = 1;
    double inner_gap_cap = 1e-6;  // EV subproblem duality-gap ceiling
    int inner_max_iter = 20000;
};

struct ResidualPair {
    double op = 0.0;      // ||Fx + Gz - b + w||^2
    double od = 0.0;      // rho ||z - z_prev||^2
    double op_std = 0.0;  // ||Fx + Gz - b||^2 (diagnostic)
};

struct AdmmIterRecord {
    int iter;
    double cost;
    double op, od, op_std;
};

struct AdmmResult {
    GridState raw;       // x-side variables at exit
    GridState repaired;  // consensus generation + exact EV loads re-swept through the grid model
    std::vector<Vec> profiles;
    std::vector<AdmmIterRecord> trace;
    ResidualPair residuals;
    double objective = 0.0;  // supply + generation cost at the repaired state
    int iterations = 0;
    bool converged = false;
};

double residual_threshold(double tol, int T, int num_buses);

// ---- closed-form consensus updates -----------------------------------------

// argmin a z^2 + b z + (rho/2)(p - z + lam)^2 over [lo, hi].
double z_update_pg(double p_plus_lambda, double a, double b, double rho, double lo, double hi);

double z_update_box(double value, double lo, double hi);

// Average of the child duplicates and the own copy, clipped to the voltage box.
double z_update_v(const std::vector<double>& child_terms, double own_term, double lo,
                  double hi);

// Unconstrained scalar consensus for the net load copy.
double z_update_pd(double pd, double lam_d, double d, double sum_e, double mu);

// Radial scaling onto {(P,Q) : P^2 + Q^2 <= s_max^2}.
std::pair<double, double> project_line_disk(double P, double Q, double s_max);

// Projection of three-phase substation flows onto
// {(P,Q) : (1'P)^2 + (1'Q)^2 <= sf_max^2}.
std::pair<Vec3, Vec3> project_substation_capacity(const Vec3& P, const Vec3& Q, double sf_max);

// ---- first-step (per-bus) update --------------------------------------------

// Targets are z - lambda terms; entries on absent phases are ignored.
struct BusTargets {
    Vec3 v = Vec3::Zero();   // unused at the substation
    Vec3 pg = Vec3::Zero();
    Vec3 pd = Vec3::Zero();
    Vec3 qg = Vec3::Zero();
    Vec3 P = Vec3::Zero();
    Vec3 Q = Vec3::Zero();
    Vec3 vhat = Vec3::Zero();           // copy-of-parent-voltage target (n >= 1)
    std::vector<Vec3> Phat, Qhat;       // per child, aligned with bus.children
    Vec3 qd = Vec3::Zero();             // reactive load data (balance rhs)
};

struct BusUpdate {
    Vec3 v = Vec3::Zero();
    Vec3 pg = Vec3::Zero();
    Vec3 pd = Vec3::Zero();
    Vec3 qg = Vec3::Zero();
    Vec3 P = Vec3::Zero();
    Vec3 Q = Vec3::Zero();
    Vec3 vhat = Vec3::Zero();
    std::vector<Vec3> Phat, Qhat;
};

// Exact minimizer of the proximal objective under the local power-balance and
// voltage-drop equalities. Bus 0 additionally carries (2/rho) f0(P0) and has
// no voltage-drop rows. Throws SingularKkt on a degenerate system.
BusUpdate x_update_bus(const FeederModel& feeder, int n, const BusTargets& targets, double rho);

// ---- full solver -------------------------------------------------------------

namespace detail {
struct BusKkt;
}

// Consensus-ADMM engine. State fields are public so tests can drive single
// iterations and inspect intermediate variables; indexing is [n*T + t] with
// zero-padded absent phases.
class AdmmSolver {
  public:
    using Field = std::vector<Vec3>;

    AdmmSolver(FeederModel feeder, std::vector<ChargingRequest> fleet, BusSeries d_p,
               BusSeries d_q, AdmmConfig config);
    ~AdmmSolver();

    void x_update_all();         // per-bus KKT solves
    void ev_update_all();        // per-(bus,phase) charging subproblems
    void z_update_all();         // closed-form consensus updates
    ResidualPair multiplier_update_all();  // dual ascent + residual accumulation

    ResidualPair iterate_once();
    AdmmResult run();

    double objective_proxy() const;  // supply + generation cost at current iterates

    const FeederModel& feeder() const { return feeder_; }
    int T() const { return T_; }
    int num_buses() const { return N_; }

    struct EvGroup {
        int bus, phase;
        std::vector<int> members;   // indices into the fleet
        std::vector<Vec> profiles;  // warm starts / current solutions
    };

    // x-side originals and duplicates
    Field x_v, x_pg, x_pd, x_qg, x_P, x_Q;
    Field xh_v, xh_P, xh_Q;  // xh_*[n] lives at parent(n) for flows, at n for voltage
    // consensus copies
    Field z_v, z_pg, z_pd, z_qg, z_P, z_Q;
    // multipliers
    Field l_p, l_q, l_d, l_P, l_Q, l_v, lh_P, lh_Q, lh_v, mu;
    // EV coupling
    Field sum_e;
    std::vector<EvGroup> groups;

    AdmmConfig config;
    double last_op = std::numeric_limits<double>::infinity();
    double last_od = std::numeric_limits<double>::infinity();

  private:
    FeederModel feeder_;
    std::vector<ChargingRequest> fleet_;
    BusSeries d_p_, d_q_;
    int N_ = 0, T_ = 0;
    std::vector<std::unique_ptr<detail::BusKkt>> kkt_;
    Field z_prev_v_, z_prev_pg_, z_prev_pd_, z_prev_qg_, z_prev_P_, z_prev_Q_;

    std::size_t idx(int n, int t) const { return static_cast<std::size_t>(n) * T_ + t; }
    friend struct detail::BusKkt;
};

AdmmResult admm_solve(const FeederModel& feeder, const std::vector<ChargingRequest>& fleet,
                      const BusSeries& d_p, const BusSeries& d_q, const AdmmConfig& config);

}  // namespace evsched

#endif  // EVSCHED_ADMM_HPP_

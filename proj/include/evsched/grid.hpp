#ifndef EVSCHED_GRID_HPP_
#define EVSCHED_GRID_HPP_

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace evsched {

using Vec3 = Eigen::Vector3d;
using Mat3c = Eigen::Matrix3cd;

// Per-bus, per-slot three-phase series, zero-padded on absent phases.
using BusSeries = std::vector<std::vector<Vec3>>;

int phase_index(char phase);  // 'a'->0, 'b'->1, 'c'->2
char phase_letter(int phase);

struct GenSpec {
    Vec3 pmin = Vec3::Zero(), pmax = Vec3::Zero();
    Vec3 qmin = Vec3::Zero(), qmax = Vec3::Zero();
    Vec3 a = Vec3::Zero(), b = Vec3::Zero(), c = Vec3::Zero();  // cost a p^2 + b p + c
};

// A bus and the line that feeds it from its parent (line n connects
// parent(n) -> n; the substation bus 0 has no line).
struct Bus {
    int id = 0;
    int parent = -1;
    std::array<bool, 3> phases{};
    Mat3c z = Mat3c::Zero();  // phase impedance, zero-padded, symmetric
    double v_min = 0.0;
    double v_max = std::numeric_limits<double>::infinity();
    double s_line_max = std::numeric_limits<double>::infinity();  // per-phase |S| cap
    bool has_gen = false;
    GenSpec gen;
    std::vector<int> children;  // derived

    int phase_count() const;
    std::vector<int> phase_list() const;
};

struct FeederModel {
    int version = 1;
    double base_kva = 1000.0;
    double base_kv = 4.16;
    double sf_max = std::numeric_limits<double>::infinity();  // feeder transformer cap
    double v0 = 1.0;                                          // substation squared voltage
    double f0_a = 0.5, f0_b = 0.0;  // per-phase supply cost a P0^2 + b P0
    std::vector<Bus> buses;
    std::vector<int> order;  // topological order, root first (derived)

    int num_buses() const { return static_cast<int>(buses.size()); }
    // Tree structure, phase subsets, impedance symmetry/padding, limit sanity.
    void validate() const;
    void rebuild_derived();
};

// Linearized-model impedance transform 2 diag(alpha) Z* diag(alpha*) with
// alpha = [1, a, a^2], a = exp(-j 2 pi / 3).
Mat3c zbar(const Mat3c& z);

struct FlowResiduals {
    Vec3 p = Vec3::Zero();
    Vec3 q = Vec3::Zero();
    Vec3 v = Vec3::Zero();
};

struct GridState {
    int T = 0;
    BusSeries v, pg, qg, pd, qd, P, Q;

    static GridState zeros(int num_buses, int T);
};

// Residuals of the linearized flow equations at slot t (0-based); rows on
// phases absent at a bus are forced to zero.
std::vector<FlowResiduals> flow_residuals(const FeederModel& feeder, const GridState& state,
                                          int t);

// Exact solve of the linearized model: flows by leaf-to-root accumulation,
// voltages by root-to-leaf drops; absent-phase voltages copy the parent.
GridState forward_sweep(const FeederModel& feeder, const BusSeries& pg, const BusSeries& pd,
                        const BusSeries& qg, const BusSeries& qd);
GridState forward_sweep_injections(const FeederModel& feeder, const BusSeries& p_net,
                                   const BusSeries& q_net);

BusSeries zero_series(int num_buses, int T);

FeederModel parse_feeder(const std::string& path);
void write_feeder(const FeederModel& feeder, const std::string& path,
                  const std::string& provenance = "");

// Base-load CSV (t,bus,phase,p_kw,q_kvar) -> per-unit series; T inferred from
// the largest slot index.
struct BusLoads {
    BusSeries p, q;  // per-unit
    int T = 0;
};
BusLoads parse_bus_loads(const std::string& path, const FeederModel& feeder);

}  // namespace evsched

#endif  // EVSCHED_GRID_HPP_

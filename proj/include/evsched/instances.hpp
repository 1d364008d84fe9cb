#ifndef EVSCHED_INSTANCES_HPP_
#define EVSCHED_INSTANCES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "evsched/fleet.hpp"
#include "evsched/grid.hpp"
#include "evsched/io.hpp"

namespace evsched {

// Synthetic stand-ins for the proprietary datasets; every generated file
// carries a provenance marker. Identical kind + seed yields byte-identical
// files.

struct ValleyInstance {
    int T = 96;
    int dt_minutes = 15;
    std::vector<FleetFileEntry> entries;
    Vec base_load_kw;

    std::vector<ChargingRequest> fleet() const;
};

ValleyInstance build_valley59(std::uint64_t seed);

// Small aggregate instance for desk-scale checks (M <= 10, T <= 12).
std::vector<ChargingRequest> build_random_fleet(std::uint64_t seed, int M, int T,
                                                double rate_lo = 0.5, double rate_hi = 3.0);
Vec build_random_base(std::uint64_t seed, int T, double lo = 0.0, double hi = 10.0);

struct NetworkInstance {
    int T = 0;
    int dt_minutes = 60;
    FeederModel feeder;
    std::vector<FleetFileEntry> entries;  // kW / kWh units
    BusSeries loads_p_kw, loads_q_kvar;

    std::vector<ChargingRequest> fleet_kw() const;
    std::vector<ChargingRequest> fleet_pu() const;  // rate/energy divided by base kVA
    BusSeries loads_p_pu() const;
    BusSeries loads_q_pu() const;
};

NetworkInstance build_toy3(std::uint64_t seed);
NetworkInstance build_synthetic123(std::uint64_t seed, int T = 24);

struct GeneratedFiles {
    std::string kind;
    int T = 0;
    std::vector<std::string> paths;
};

// Writes the named instance under out_dir: fleet.json + base_load.csv for the
// aggregate case, feeder.json + fleet.json + loads.csv for network cases.
// T applies to synthetic-123bus only.
GeneratedFiles generate_instance(const std::string& kind, std::uint64_t seed,
                                 const std::string& out_dir, int T = 24);

}  // namespace evsched

#endif  // EVSCHED_INSTANCES_HPP_

#ifndef EVSCHED_IO_HPP_
#define EVSCHED_IO_HPP_

#include <string>
#include <vector>

#include "evsched/admm.hpp"
#include "evsched/fleet.hpp"
#include "evsched/fw.hpp"
#include "evsched/grid.hpp"
#include "evsched/pgd.hpp"

namespace evsched {

// Fleet file: either a bare array of EV entries or an object with an `evs`
// array plus metadata. Slots may be listed explicitly (1-based) or as an
// inclusive window {from,to}; from > to wraps around the horizon.
std::vector<ChargingRequest> parse_fleet(const std::string& path, int T);

struct FleetFileEntry {
    ChargingRequest request;
    bool window = false;  // emit as {from,to} instead of a slot list
    int from = 0, to = 0;
    bool from_soc = false;  // emit battery/miles instead of energy_need_kwh
    double battery_kwh = 0.0, daily_miles = 0.0, e100_kwh = 15.0, target_soc = 0.9;
};

void write_fleet(const std::vector<FleetFileEntry>& entries, const std::string& path,
                 const std::string& provenance, const std::string& generator_kind,
                 std::uint64_t seed, int T, int dt_minutes);

// Aggregate base-load CSV: header t,p_kw with slots 1..T; # lines are comments.
Vec parse_base_load(const std::string& path);
void write_base_load(const Vec& series, const std::string& path,
                     const std::string& comment = "");

void write_bus_loads(const BusSeries& p_kw, const BusSeries& q_kvar, const FeederModel& feeder,
                     const std::string& path, const std::string& comment = "");

// Deterministic shortest-round-trip double formatting shared by all writers.
std::string format_double(double value);

struct ScheduleArtifacts {
    std::string solver;
    std::vector<std::string> ids;
    std::vector<Vec> profiles;
    Vec base_load;
    double cost = 0.0;
    double gap = -1.0;  // <0 when the solver has no gap notion
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

std::string schedule_result_json(const ScheduleArtifacts& artifacts);
void write_schedule_result(const ScheduleArtifacts& artifacts, const std::string& path);

std::string fw_trace_csv(const std::vector<FwIterRecord>& trace);
std::string pgd_trace_csv(const std::vector<PgdIterRecord>& trace);
std::string admm_trace_csv(const std::vector<AdmmIterRecord>& trace);
void write_text(const std::string& text, const std::string& path);

std::string solution_json(const AdmmResult& result, const FeederModel& feeder,
                          const std::vector<ChargingRequest>& fleet);
void write_solution(const AdmmResult& result, const FeederModel& feeder,
                    const std::vector<ChargingRequest>& fleet, const std::string& path);

}  // namespace evsched

#endif  // EVSCHED_IO_HPP_

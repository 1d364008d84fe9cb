#include "evsched/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "evsched/errors.hpp"

namespace evsched {

using json = nlohmann::json;

std::string format_double(double value) {
    // Shortest representation that round-trips; matches the JSON writer.
    return json(value).dump();
}

namespace {

std::vector<int> expand_window(int from, int to, int T) {
    std::vector<int> slots;
    if (from < 1 || from > T || to < 1 || to > T)
        throw IndexOutOfRange("slot window outside 1.." + std::to_string(T));
    if (from <= to) {
        for (int s = from; s <= to; ++s) slots.push_back(s);
    } else {  // overnight wrap
        for (int s = 1; s <= to; ++s) slots.push_back(s);
        for (int s = from; s <= T; ++s) slots.push_back(s);
    }
    return slots;
}

ChargingRequest request_from_json(const json& je, int T, int index) {
    ChargingRequest req;
    req.id = je.contains("id") ? je.at("id").get<std::string>() : "ev" + std::to_string(index);
    if (je.contains("bus") && !je.at("bus").is_null()) req.bus = je.at("bus").get<int>();
    if (je.contains("phase") && !je.at("phase").is_null()) {
        if (je.at("phase").is_string()) {
            const std::string p = je.at("phase").get<std::string>();
            if (!p.empty()) req.phase = phase_index(p[0]);
        } else {
            req.phase = je.at("phase").get<int>();
        }
    }
    if (!je.contains("slots")) throw ParseError("request " + req.id + ": missing slots");
    const json& js = je.at("slots");
    if (js.is_array()) {
        for (const auto& s : js) req.slots.push_back(s.get<int>());
    } else if (js.is_object()) {
        req.slots = expand_window(js.at("from").get<int>(), js.at("to").get<int>(), T);
    } else {
        throw ParseError("request " + req.id + ": slots must be a list or a {from,to} window");
    }
    std::sort(req.slots.begin(), req.slots.end());
    req.slots.erase(std::unique(req.slots.begin(), req.slots.end()), req.slots.end());

    req.rate_cap = je.at("rate_cap_kw").get<double>();
    if (je.contains("energy_need_kwh")) {
        req.energy_need = je.at("energy_need_kwh").get<double>();
    } else if (je.contains("battery_kwh") && je.contains("daily_miles")) {
        const double battery = je.at("battery_kwh").get<double>();
        const double miles = je.at("daily_miles").get<double>();
        const double e100 = je.value("e100_kwh", 15.0);
        const double target = je.value("target_soc", 0.9);
        req.energy_need = energy_need_from_soc(battery, miles, e100, target);
    } else {
        throw ParseError("request " + req.id +
                         ": needs energy_need_kwh or battery_kwh + daily_miles");
    }
    return req;
}

}  // namespace

std::vector<ChargingRequest> parse_fleet(const std::string& path, int T) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fleet file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("fleet " + path + ": " + e.what());
    }
    const json* evs = nullptr;
    if (j.is_array()) {
        evs = &j;
    } else if (j.is_object() && j.contains("evs") && j.at("evs").is_array()) {
        evs = &j.at("evs");
    } else {
        throw ParseError("fleet " + path + ": expected an array or an object with `evs`");
    }
    std::vector<ChargingRequest> fleet;
    fleet.reserve(evs->size());
    int index = 0;
    try {
        for (const auto& je : *evs) fleet.push_back(request_from_json(je, T, index++));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("fleet " + path + ": " + e.what());
    }
    return fleet;
}

void write_fleet(const std::vector<FleetFileEntry>& entries, const std::string& path,
                 const std::string& provenance, const std::string& generator_kind,
                 std::uint64_t seed, int T, int dt_minutes) {
    json j;
    if (!provenance.empty()) j["provenance"] = provenance;
    if (!generator_kind.empty()) j["generator"] = {{"kind", generator_kind}, {"seed", seed}};
    j["t_slots"] = T;
    j["dt_minutes"] = dt_minutes;
    json evs = json::array();
    for (const auto& entry : entries) {
        const auto& req = entry.request;
        json je;
        je["id"] = req.id;
        if (req.bus >= 0) je["bus"] = req.bus;
        if (req.phase >= 0) je["phase"] = std::string(1, phase_letter(req.phase));
        if (entry.window) {
            je["slots"] = {{"from", entry.from}, {"to", entry.to}};
        } else {
            je["slots"] = req.slots;
        }
        je["rate_cap_kw"] = req.rate_cap;
        if (entry.from_soc) {
            je["battery_kwh"] = entry.battery_kwh;
            je["daily_miles"] = entry.daily_miles;
            je["e100_kwh"] = entry.e100_kwh;
            je["target_soc"] = entry.target_soc;
        } else {
            je["energy_need_kwh"] = req.energy_need;
        }
        evs.push_back(je);
    }
    j["evs"] = evs;
    std::ofstream out(path);
    if (!out) throw Error("cannot write fleet file: " + path);
    out << j.dump(2) << "\n";
}

Vec parse_base_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open base-load file: " + path);
    std::string line;
    bool header_seen = false;
    std::vector<std::pair<int, double>> rows;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string f1, f2;
        if (!std::getline(ss, f1, ',') || !std::getline(ss, f2, ','))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected t,p_kw");
        try {
            rows.emplace_back(std::stoi(f1), std::stod(f2));
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    if (rows.empty()) throw ParseError(path + ": no load rows");
    int T = 0;
    for (const auto& [t, v] : rows) T = std::max(T, t);
    Vec series = Vec::Constant(T, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [t, v] : rows) {
        if (t < 1) throw ParseError(path + ": slot indices start at 1");
        series[t - 1] = v;
    }
    for (int t = 0; t < T; ++t) {
        if (!std::isfinite(series[t]))
            throw ParseError(path + ": missing slot " + std::to_string(t + 1));
    }
    return series;
}

void write_base_load(const Vec& series, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write base-load file: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t,p_kw\n";
    for (int t = 0; t < series.size(); ++t)
        out << (t + 1) << "," << format_double(series[t]) << "\n";
}

void write_bus_loads(const BusSeries& p_kw, const BusSeries& q_kvar, const FeederModel& feeder,
                     const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write load file: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t,bus,phase,p_kw,q_kvar\n";
    const int T = p_kw.empty() ? 0 : static_cast<int>(p_kw[0].size());
    for (int t = 0; t < T; ++t) {
        for (int n = 0; n < feeder.num_buses(); ++n) {
            for (int p : feeder.buses[n].phase_list()) {
                const double pv = p_kw[n][t][p];
                const double qv = q_kvar[n][t][p];
                if (pv == 0.0 && qv == 0.0) continue;
                out << (t + 1) << "," << n << "," << phase_letter(p) << ","
                    << format_double(pv) << "," << format_double(qv) << "\n";
            }
        }
    }
}

std::string schedule_result_json(const ScheduleArtifacts& artifacts) {
    json j;
    j["solver"] = artifacts.solver;
    j["cost"] = artifacts.cost;
    j["iterations"] = artifacts.iterations;
    j["converged"] = artifacts.converged;
    if (artifacts.gap >= 0.0) j["gap"] = artifacts.gap;
    if (!artifacts.warnings.empty()) j["warnings"] = artifacts.warnings;
    const int T = static_cast<int>(artifacts.base_load.size());
    Vec total = artifacts.base_load;
    json profiles = json::array();
    for (std::size_t m = 0; m < artifacts.profiles.size(); ++m) {
        json je;
        je["id"] = m < artifacts.ids.size() ? artifacts.ids[m] : "ev" + std::to_string(m);
        std::vector<double> e(artifacts.profiles[m].data(),
                              artifacts.profiles[m].data() + artifacts.profiles[m].size());
        je["e"] = e;
        profiles.push_back(je);
        for (int t = 0; t < T; ++t) total[t] += artifacts.profiles[m][t];
    }
    j["profiles"] = profiles;
    j["total_load"] = std::vector<double>(total.data(), total.data() + total.size());
    return j.dump(2) + "\n";
}

void write_schedule_result(const ScheduleArtifacts& artifacts, const std::string& path) {
    write_text(schedule_result_json(artifacts), path);
}

std::string fw_trace_csv(const std::vector<FwIterRecord>& trace) {
    std::string out = "iter,cost,gap,eta\n";
    for (const auto& row : trace) {
        out += std::to_string(row.iter);
        out += ',';
        out += format_double(row.cost);
        out += ',';
        out += format_double(row.gap);
        out += ',';
        out += format_double(row.eta);
        out += '\n';
    }
    return out;
}

std::string pgd_trace_csv(const std::vector<PgdIterRecord>& trace) {
    std::string out = "iter,cost\n";
    for (const auto& row : trace) {
        out += std::to_string(row.iter);
        out += ',';
        out += format_double(row.cost);
        out += '\n';
    }
    return out;
}

std::string admm_trace_csv(const std::vector<AdmmIterRecord>& trace) {
    std::string out = "iter,cost,op,od,op_std\n";
    for (const auto& row : trace) {
        out += std::to_string(row.iter);
        out += ',';
        out += format_double(row.cost);
        out += ',';
        out += format_double(row.op);
        out += ',';
        out += format_double(row.od);
        out += ',';
        out += format_double(row.op_std);
        out += '\n';
    }
    return out;
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

namespace {

json state_to_json(const GridState& state, const FeederModel& feeder) {
    json buses = json::array();
    for (int n = 0; n < feeder.num_buses(); ++n) {
        json jb;
        jb["id"] = n;
        json v = json::array(), P = json::array(), Q = json::array(), pg = json::array(),
             qg = json::array(), pd = json::array();
        for (int t = 0; t < state.T; ++t) {
            const auto vec = [](const Vec3& x) {
                return std::vector<double>{x[0], x[1], x[2]};
            };
            v.push_back(vec(state.v[n][t]));
            P.push_back(vec(state.P[n][t]));
            Q.push_back(vec(state.Q[n][t]));
            pg.push_back(vec(state.pg[n][t]));
            qg.push_back(vec(state.qg[n][t]));
            pd.push_back(vec(state.pd[n][t]));
        }
        jb["v_pu2"] = v;
        jb["p_flow_pu"] = P;
        jb["q_flow_pu"] = Q;
        jb["p_gen_pu"] = pg;
        jb["q_gen_pu"] = qg;
        jb["p_load_pu"] = pd;
        buses.push_back(jb);
    }
    return buses;
}

}  // namespace

std::string solution_json(const AdmmResult& result, const FeederModel& feeder,
                          const std::vector<ChargingRequest>& fleet) {
    json j;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["objective"] = result.objective;
    j["residuals"] = {{"op", result.residuals.op},
                      {"od", result.residuals.od},
                      {"op_std", result.residuals.op_std}};
    json profiles = json::array();
    for (std::size_t m = 0; m < fleet.size(); ++m) {
        json je;
        je["id"] = fleet[m].id;
        je["bus"] = fleet[m].bus;
        je["phase"] = std::string(1, phase_letter(fleet[m].phase));
        std::vector<double> e(result.profiles[m].data(),
                              result.profiles[m].data() + result.profiles[m].size());
        je["e_pu"] = e;
        profiles.push_back(je);
    }
    j["profiles"] = profiles;
    j["repaired"] = state_to_json(result.repaired, feeder);
    j["raw"] = state_to_json(result.raw, feeder);
    return j.dump(2) + "\n";
}

void write_solution(const AdmmResult& result, const FeederModel& feeder,
                    const std::vector<ChargingRequest>& fleet, const std::string& path) {
    write_text(solution_json(result, feeder, fleet), path);
}

}  // namespace evsched

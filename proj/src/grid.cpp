#include "evsched/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evsched/errors.hpp"

namespace evsched {

using json = nlohmann::json;

int phase_index(char phase) {
    switch (phase) {
        case 'a': case 'A': return 0;
        case 'b': case 'B': return 1;
        case 'c': case 'C': return 2;
    }
    throw ValidationError(std::string("unknown phase '") + phase + "'");
}

char phase_letter(int phase) {
    static const char letters[3] = {'a', 'b', 'c'};
    if (phase < 0 || phase > 2) throw ValidationError("phase index outside 0..2");
    return letters[phase];
}

int Bus::phase_count() const {
    return static_cast<int>(phases[0]) + static_cast<int>(phases[1]) +
           static_cast<int>(phases[2]);
}

std::vector<int> Bus::phase_list() const {
    std::vector<int> out;
    for (int p = 0; p < 3; ++p)
        if (phases[p]) out.push_back(p);
    return out;
}

void FeederModel::rebuild_derived() {
    for (auto& bus : buses) bus.children.clear();
    for (const auto& bus : buses) {
        if (bus.parent >= 0 && bus.parent < num_buses())
            buses[bus.parent].children.push_back(bus.id);
    }
    for (auto& bus : buses) std::sort(bus.children.begin(), bus.children.end());

    // Topological order by repeated child expansion; validate() reports
    // non-tree inputs, here we only build what is reachable.
    order.clear();
    order.reserve(buses.size());
    std::vector<int> stack{0};
    std::vector<bool> seen(buses.size(), false);
    if (!buses.empty()) seen[0] = true;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (int c : buses[n].children) {
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
}

void FeederModel::validate() const {
    const int N = num_buses();
    if (N == 0) throw ValidationError("feeder has no buses");
    if (buses[0].parent != -1) throw ValidationError("bus 0 must be the substation (no parent)");
    if (buses[0].phase_count() != 3)
        throw ValidationError("substation bus must carry all three phases");
    for (int n = 0; n < N; ++n) {
        const Bus& bus = buses[n];
        if (bus.id != n) throw ValidationError("bus ids must be 0..N in order");
        if (n > 0) {
            if (bus.parent < 0 || bus.parent >= N)
                throw ValidationError("bus " + std::to_string(n) + ": parent out of range");
            if (bus.parent == n)
                throw ValidationError("bus " + std::to_string(n) + ": self-parent");
        }
        if (bus.phase_count() == 0)
            throw ValidationError("bus " + std::to_string(n) + ": no phases");
        if (n > 0) {
            const Bus& parent = buses[bus.parent];
            for (int p = 0; p < 3; ++p) {
                if (bus.phases[p] && !parent.phases[p])
                    throw ValidationError("bus " + std::to_string(n) + ": carries phase " +
                                          std::string(1, phase_letter(p)) +
                                          " missing at parent " + std::to_string(bus.parent));
            }
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    if (std::abs(bus.z(i, j) - bus.z(j, i)) > 1e-12)
                        throw ValidationError("line " + std::to_string(n) +
                                              ": impedance must be symmetric");
                    const bool present = bus.phases[i] && bus.phases[j];
                    if (!present && std::abs(bus.z(i, j)) != 0.0)
                        throw ValidationError("line " + std::to_string(n) +
                                              ": impedance not zero-padded on absent phases");
                }
            }
        }
        if (!(bus.v_min < bus.v_max))
            throw ValidationError("bus " + std::to_string(n) + ": requires v_min < v_max");
        if (bus.s_line_max <= 0.0)
            throw ValidationError("line " + std::to_string(n) + ": flow cap must be positive");
        if (bus.has_gen) {
            for (int p : bus.phase_list()) {
                if (bus.gen.pmin[p] > bus.gen.pmax[p] || bus.gen.qmin[p] > bus.gen.qmax[p])
                    throw ValidationError("bus " + std::to_string(n) + ": empty generation box");
                if (bus.gen.a[p] < 0.0)
                    throw ValidationError("bus " + std::to_string(n) +
                                          ": generation cost must be convex (a >= 0)");
            }
        }
    }
    // Reachability from the root == tree (N-1 parent links, no cycles).
    std::vector<int> reach;
    reach.reserve(N);
    std::vector<bool> seen(N, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        reach.push_back(n);
        for (int c = 1; c < N; ++c) {
            if (!seen[c] && buses[c].parent == n) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
    if (static_cast<int>(reach.size()) != N)
        throw ValidationError("feeder is not a tree rooted at bus 0");
    if (sf_max <= 0.0) throw ValidationError("feeder capacity must be positive");
    if (v0 <= 0.0) throw ValidationError("substation voltage must be positive");
    if (f0_a < 0.0) throw ValidationError("supply cost must be convex (a >= 0)");
}

Mat3c zbar(const Mat3c& z) {
    const std::complex<double> a = std::polar(1.0, -2.0 * M_PI / 3.0);
    Eigen::Vector3cd alpha;
    alpha << std::complex<double>(1.0, 0.0), a, a * a;
    Mat3c out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out(i, j) = 2.0 * alpha(i) * std::conj(z(i, j)) * std::conj(alpha(j));
    return out;
}

GridState GridState::zeros(int num_buses, int T) {
    GridState s;
    s.T = T;
    const std::vector<Vec3> row(T, Vec3::Zero());
    s.v.assign(num_buses, row);
    s.pg.assign(num_buses, row);
    s.qg.assign(num_buses, row);
    s.pd.assign(num_buses, row);
    s.qd.assign(num_buses, row);
    s.P.assign(num_buses, row);
    s.Q.assign(num_buses, row);
    return s;
}

BusSeries zero_series(int num_buses, int T) {
    return BusSeries(num_buses, std::vector<Vec3>(T, Vec3::Zero()));
}

std::vector<FlowResiduals> flow_residuals(const FeederModel& feeder, const GridState& state,
                                          int t) {
    const int N = feeder.num_buses();
    if (static_cast<int>(state.P.size()) != N || t < 0 || t >= state.T)
        throw DimensionMismatch("flow residuals: state does not match feeder/slot");
    std::vector<FlowResiduals> out(N);
    for (int n = 0; n < N; ++n) {
        const Bus& bus = feeder.buses[n];
        Vec3 child_p = Vec3::Zero(), child_q = Vec3::Zero();
        for (int k : bus.children) {
            child_p += state.P[k][t];
            child_q += state.Q[k][t];
        }
        const Vec3 p_net = state.pg[n][t] - state.pd[n][t];
        const Vec3 q_net = state.qg[n][t] - state.qd[n][t];
        Vec3 rp = p_net - (child_p - state.P[n][t]);
        Vec3 rq = q_net - (child_q - state.Q[n][t]);
        Vec3 rv = Vec3::Zero();
        if (n > 0) {
            const Mat3c zb = zbar(bus.z);
            const Eigen::Vector3cd s = state.P[n][t].cast<std::complex<double>>() +
                                       std::complex<double>(0.0, 1.0) *
                                           state.Q[n][t].cast<std::complex<double>>();
            const Vec3 drop = (zb * s).real();
            rv = (state.v[bus.parent][t] - state.v[n][t]) - drop;
        }
        for (int p = 0; p < 3; ++p) {
            if (!bus.phases[p]) {
                rp[p] = 0.0;
                rq[p] = 0.0;
                rv[p] = 0.0;
            }
        }
        out[n].p = rp;
        out[n].q = rq;
        out[n].v = rv;
    }
    return out;
}

GridState forward_sweep(const FeederModel& feeder, const BusSeries& pg, const BusSeries& pd,
                        const BusSeries& qg, const BusSeries& qd) {
    const int N = feeder.num_buses();
    if (static_cast<int>(pg.size()) != N || static_cast<int>(pd.size()) != N ||
        static_cast<int>(qg.size()) != N || static_cast<int>(qd.size()) != N)
        throw DimensionMismatch("forward sweep: series bus count differs from feeder");
    const int T = pg.empty() ? 0 : static_cast<int>(pg[0].size());

    GridState s = GridState::zeros(N, T);
    s.pg = pg;
    s.pd = pd;
    s.qg = qg;
    s.qd = qd;

    // Flows leaf-to-root: P_n = sum_children P_k - p_n.
    for (auto it = feeder.order.rbegin(); it != feeder.order.rend(); ++it) {
        const int n = *it;
        const Bus& bus = feeder.buses[n];
        for (int t = 0; t < T; ++t) {
            Vec3 child_p = Vec3::Zero(), child_q = Vec3::Zero();
            for (int k : bus.children) {
                child_p += s.P[k][t];
                child_q += s.Q[k][t];
            }
            Vec3 P = child_p - (pg[n][t] - pd[n][t]);
            Vec3 Q = child_q - (qg[n][t] - qd[n][t]);
            for (int p = 0; p < 3; ++p) {
                if (!bus.phases[p]) {
                    P[p] = 0.0;
                    Q[p] = 0.0;
                }
            }
            s.P[n][t] = P;
            s.Q[n][t] = Q;
        }
    }

    // Voltages root-to-leaf; absent phases copy the parent.
    for (int n : feeder.order) {
        const Bus& bus = feeder.buses[n];
        if (n == 0) {
            for (int t = 0; t < T; ++t) s.v[0][t] = Vec3::Constant(feeder.v0);
            continue;
        }
        const Mat3c zb = zbar(bus.z);
        for (int t = 0; t < T; ++t) {
            const Eigen::Vector3cd flow = s.P[n][t].cast<std::complex<double>>() +
                                          std::complex<double>(0.0, 1.0) *
                                              s.Q[n][t].cast<std::complex<double>>();
            const Vec3 drop = (zb * flow).real();
            Vec3 v = s.v[bus.parent][t];
            for (int p = 0; p < 3; ++p) {
                if (bus.phases[p]) v[p] -= drop[p];
            }
            s.v[n][t] = v;
        }
    }
    return s;
}

GridState forward_sweep_injections(const FeederModel& feeder, const BusSeries& p_net,
                                   const BusSeries& q_net) {
    const int N = feeder.num_buses();
    const int T = p_net.empty() ? 0 : static_cast<int>(p_net[0].size());
    return forward_sweep(feeder, p_net, zero_series(N, T), q_net, zero_series(N, T));
}

namespace {

Vec3 padded_per_phase(const json& value, const Bus& bus, const std::string& what) {
    Vec3 out = Vec3::Zero();
    const auto ph = bus.phase_list();
    if (value.is_number()) {
        for (int p : ph) out[p] = value.get<double>();
        return out;
    }
    if (!value.is_array() || value.size() != ph.size())
        throw ParseError("bus " + std::to_string(bus.id) + ": " + what + " must be a scalar or " +
                         std::to_string(ph.size()) + "-element array");
    for (std::size_t i = 0; i < ph.size(); ++i) out[ph[i]] = value[i].get<double>();
    return out;
}

json per_phase_to_json(const Vec3& v, const Bus& bus) {
    json arr = json::array();
    for (int p : bus.phase_list()) arr.push_back(v[p]);
    return arr;
}

}  // namespace

FeederModel parse_feeder(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open feeder file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("feeder " + path + ": " + e.what());
    }

    FeederModel f;
    try {
        f.version = j.value("version", 1);
        if (j.contains("base")) {
            f.base_kva = j["base"].value("kva", 1000.0);
            f.base_kv = j["base"].value("kv", 4.16);
        }
        f.sf_max = j.value("sf_max_pu", std::numeric_limits<double>::infinity());
        f.v0 = j.value("v0_pu2", 1.0);
        if (j.contains("f0")) {
            f.f0_a = j["f0"].value("a", 0.5);
            f.f0_b = j["f0"].value("b", 0.0);
        }
        if (!j.contains("buses") || !j["buses"].is_array())
            throw ParseError("feeder file lacks a buses array");
        for (const auto& jb : j["buses"]) {
            Bus bus;
            bus.id = jb.at("id").get<int>();
            bus.parent = jb.at("parent").is_null() ? -1 : jb.at("parent").get<int>();
            const std::string phases = jb.at("phases").get<std::string>();
            if (phases.empty()) throw ParseError("bus " + std::to_string(bus.id) + ": no phases");
            for (char c : phases) bus.phases[phase_index(c)] = true;
            if (jb.contains("z") && !jb.at("z").is_null()) {
                const auto& jz = jb.at("z");
                if (!jz.is_array() || jz.size() != 3)
                    throw ParseError("line " + std::to_string(bus.id) + ": z must be 3x3");
                for (int i = 0; i < 3; ++i) {
                    if (!jz[i].is_array() || jz[i].size() != 3)
                        throw ParseError("line " + std::to_string(bus.id) + ": z must be 3x3");
                    for (int k = 0; k < 3; ++k)
                        bus.z(i, k) = std::complex<double>(jz[i][k].value("re", 0.0),
                                                           jz[i][k].value("im", 0.0));
                }
            }
            bus.v_min = jb.value("v_min_pu2", 0.0);
            bus.v_max = jb.value("v_max_pu2", std::numeric_limits<double>::infinity());
            bus.s_line_max = jb.value("s_line_max_pu", std::numeric_limits<double>::infinity());
            if (jb.contains("gen") && !jb.at("gen").is_null()) {
                bus.has_gen = true;
                const auto& jg = jb.at("gen");
                bus.gen.pmin = padded_per_phase(jg.value("pmin", json(0.0)), bus, "gen.pmin");
                bus.gen.pmax = padded_per_phase(jg.value("pmax", json(0.0)), bus, "gen.pmax");
                bus.gen.qmin = padded_per_phase(jg.value("qmin", json(0.0)), bus, "gen.qmin");
                bus.gen.qmax = padded_per_phase(jg.value("qmax", json(0.0)), bus, "gen.qmax");
                bus.gen.a = padded_per_phase(jg.value("a", json(0.0)), bus, "gen.a");
                bus.gen.b = padded_per_phase(jg.value("b", json(0.0)), bus, "gen.b");
                bus.gen.c = padded_per_phase(jg.value("c", json(0.0)), bus, "gen.c");
            }
            f.buses.push_back(bus);
        }
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("feeder " + path + ": " + e.what());
    }

    std::sort(f.buses.begin(), f.buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });
    f.rebuild_derived();
    f.validate();
    return f;
}

void write_feeder(const FeederModel& feeder, const std::string& path,
                  const std::string& provenance) {
    json j;
    j["version"] = feeder.version;
    if (!provenance.empty()) j["provenance"] = provenance;
    j["base"] = {{"kva", feeder.base_kva}, {"kv", feeder.base_kv}};
    j["sf_max_pu"] = feeder.sf_max;
    j["v0_pu2"] = feeder.v0;
    j["f0"] = {{"a", feeder.f0_a}, {"b", feeder.f0_b}};
    json buses = json::array();
    for (const auto& bus : feeder.buses) {
        json jb;
        jb["id"] = bus.id;
        if (bus.parent < 0)
            jb["parent"] = nullptr;
        else
            jb["parent"] = bus.parent;
        std::string phases;
        for (int p : bus.phase_list()) phases.push_back(phase_letter(p));
        jb["phases"] = phases;
        if (bus.parent >= 0) {
            json z = json::array();
            for (int i = 0; i < 3; ++i) {
                json row = json::array();
                for (int k = 0; k < 3; ++k)
                    row.push_back({{"re", bus.z(i, k).real()}, {"im", bus.z(i, k).imag()}});
                z.push_back(row);
            }
            jb["z"] = z;
        }
        jb["v_min_pu2"] = bus.v_min;
        jb["v_max_pu2"] = bus.v_max;
        jb["s_line_max_pu"] = bus.s_line_max;
        if (bus.has_gen) {
            jb["gen"] = {{"pmin", per_phase_to_json(bus.gen.pmin, bus)},
                         {"pmax", per_phase_to_json(bus.gen.pmax, bus)},
                         {"qmin", per_phase_to_json(bus.gen.qmin, bus)},
                         {"qmax", per_phase_to_json(bus.gen.qmax, bus)},
                         {"a", per_phase_to_json(bus.gen.a, bus)},
                         {"b", per_phase_to_json(bus.gen.b, bus)},
                         {"c", per_phase_to_json(bus.gen.c, bus)}};
        } else {
            jb["gen"] = nullptr;
        }
        buses.push_back(jb);
    }
    j["buses"] = buses;

    std::ofstream out(path);
    if (!out) throw Error("cannot write feeder file: " + path);
    out << j.dump(2) << "\n";
}

BusLoads parse_bus_loads(const std::string& path, const FeederModel& feeder) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open load file: " + path);

    struct Row {
        int t, bus, phase;
        double p, q;
    };
    std::vector<Row> rows;
    int T = 0;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // first non-comment line is the header
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 5 columns");
        Row r;
        try {
            r.t = std::stoi(fields[0]);
            r.bus = std::stoi(fields[1]);
            r.phase = phase_index(fields[2].at(0));
            r.p = std::stod(fields[3]);
            r.q = std::stod(fields[4]);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
        if (r.t < 1) throw ParseError(path + ":" + std::to_string(lineno) + ": slot must be >= 1");
        if (r.bus < 0 || r.bus >= feeder.num_buses())
            throw ValidationError(path + ":" + std::to_string(lineno) + ": unknown bus " +
                                  std::to_string(r.bus));
        if (!feeder.buses[r.bus].phases[r.phase])
            throw ValidationError(path + ":" + std::to_string(lineno) + ": bus " +
                                  std::to_string(r.bus) + " lacks phase " +
                                  std::string(1, phase_letter(r.phase)));
        T = std::max(T, r.t);
        rows.push_back(r);
    }
    if (T == 0) throw ParseError(path + ": no load rows");

    BusLoads loads;
    loads.T = T;
    loads.p = zero_series(feeder.num_buses(), T);
    loads.q = zero_series(feeder.num_buses(), T);
    for (const Row& r : rows) {
        loads.p[r.bus][r.t - 1][r.phase] += r.p / feeder.base_kva;
        loads.q[r.bus][r.t - 1][r.phase] += r.q / feeder.base_kva;
    }
    return loads;
}

}  // namespace evsched

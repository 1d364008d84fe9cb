#include "evsched/instances.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "evsched/errors.hpp"

namespace evsched {

namespace {

// Seeded helpers kept free of std::<distribution> so byte-level output is
// pinned by the engine alone.
double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * u01(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double gaussian(std::mt19937_64& rng) {
    const double u1 = std::max(u01(rng), 1e-12);
    const double u2 = u01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Residential double-hump shape over hour-of-day: overnight valley, morning
// shoulder, evening peak.
double day_shape(double hour) {
    const double morning = std::exp(-0.5 * std::pow((hour - 9.0) / 2.3, 2.0));
    const double evening = std::exp(-0.5 * std::pow((hour - 19.5) / 3.1, 2.0));
    return 0.42 + 0.13 * morning + 0.55 * evening;
}

std::string ev_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ev%03d", index + 1);
    return buf;
}

}  // namespace

std::vector<ChargingRequest> ValleyInstance::fleet() const {
    std::vector<ChargingRequest> fleet;
    fleet.reserve(entries.size());
    for (const auto& entry : entries) fleet.push_back(entry.request);
    return fleet;
}

ValleyInstance build_valley59(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ValleyInstance inst;
    inst.T = 96;
    inst.dt_minutes = 15;

    Vec shape(inst.T);
    for (int t = 0; t < inst.T; ++t) shape[t] = day_shape((t + 0.5) * 24.0 / inst.T);
    inst.base_load_kw = 1000.0 * shape / shape.maxCoeff();

    const double battery = 20.0, rate = 3.45, e100 = 15.0, target = 0.9;
    for (int m = 0; m < 59; ++m) {
        FleetFileEntry entry;
        entry.window = true;
        entry.from = uniform_int(rng, 66, 90);  // plug-in 16:30..22:30
        entry.to = uniform_int(rng, 22, 38);    // plug-out 05:30..09:30
        entry.from_soc = true;
        entry.battery_kwh = battery;
        entry.daily_miles = std::clamp(35.0 + 18.0 * gaussian(rng), 5.0, 110.0);
        entry.e100_kwh = e100;
        entry.target_soc = target;

        ChargingRequest req;
        req.id = ev_id(m);
        req.rate_cap = rate;
        req.energy_need = energy_need_from_soc(battery, entry.daily_miles, e100, target);
        for (int s = 1; s <= entry.to; ++s) req.slots.push_back(s);
        for (int s = entry.from; s <= inst.T; ++s) req.slots.push_back(s);
        entry.request = req;
        inst.entries.push_back(entry);
    }
    return inst;
}

std::vector<ChargingRequest> build_random_fleet(std::uint64_t seed, int M, int T,
                                                double rate_lo, double rate_hi) {
    std::mt19937_64 rng(seed);
    std::vector<ChargingRequest> fleet;
    fleet.reserve(M);
    for (int m = 0; m < M; ++m) {
        ChargingRequest req;
        req.id = ev_id(m);
        req.rate_cap = uniform(rng, rate_lo, rate_hi);
        const int width = uniform_int(rng, 2, T);
        const int start = uniform_int(rng, 1, T - width + 1);
        for (int s = start; s < start + width; ++s) req.slots.push_back(s);
        const double capacity = width * req.rate_cap;
        req.energy_need = uniform(rng, 0.2, 0.9) * capacity;
        fleet.push_back(req);
    }
    return fleet;
}

Vec build_random_base(std::uint64_t seed, int T, double lo, double hi) {
    std::mt19937_64 rng(seed);
    Vec d(T);
    for (int t = 0; t < T; ++t) d[t] = uniform(rng, lo, hi);
    return d;
}

std::vector<ChargingRequest> NetworkInstance::fleet_kw() const {
    std::vector<ChargingRequest> fleet;
    fleet.reserve(entries.size());
    for (const auto& entry : entries) fleet.push_back(entry.request);
    return fleet;
}

std::vector<ChargingRequest> NetworkInstance::fleet_pu() const {
    std::vector<ChargingRequest> fleet = fleet_kw();
    for (auto& req : fleet) {
        req.rate_cap /= feeder.base_kva;
        req.energy_need /= feeder.base_kva;
    }
    return fleet;
}

BusSeries NetworkInstance::loads_p_pu() const {
    BusSeries out = loads_p_kw;
    for (auto& bus : out)
        for (auto& slot : bus) slot /= feeder.base_kva;
    return out;
}

BusSeries NetworkInstance::loads_q_pu() const {
    BusSeries out = loads_q_kvar;
    for (auto& bus : out)
        for (auto& slot : bus) slot /= feeder.base_kva;
    return out;
}

namespace {

Mat3c line_impedance(std::mt19937_64& rng, const std::array<bool, 3>& phases, double length) {
    const double r = 0.004 * length;
    const double x = 0.009 * length;
    Mat3c z = Mat3c::Zero();
    for (int i = 0; i < 3; ++i) {
        if (!phases[i]) continue;
        z(i, i) = std::complex<double>(r * uniform(rng, 0.85, 1.15),
                                       x * uniform(rng, 0.85, 1.15));
        for (int j = i + 1; j < 3; ++j) {
            if (!phases[j]) continue;
            const std::complex<double> mutual(0.25 * r, 0.4 * x);
            z(i, j) = mutual;
            z(j, i) = mutual;
        }
    }
    return z;
}

}  // namespace

NetworkInstance build_toy3(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    NetworkInstance inst;
    inst.T = 4;
    inst.dt_minutes = 60;

    FeederModel f;
    f.base_kva = 1000.0;
    f.base_kv = 4.16;
    f.sf_max = 10.0;
    f.v0 = 1.0;
    f.f0_a = 0.5;
    f.f0_b = 0.1;
    for (int n = 0; n < 3; ++n) {
        Bus bus;
        bus.id = n;
        bus.parent = n - 1;
        bus.phases = {true, true, true};
        bus.v_min = 0.64;
        bus.v_max = 1.44;
        bus.s_line_max = 10.0;
        if (n > 0) bus.z = line_impedance(rng, bus.phases, 1.0);
        f.buses.push_back(bus);
    }
    f.rebuild_derived();
    inst.feeder = f;

    inst.loads_p_kw = zero_series(3, inst.T);
    inst.loads_q_kvar = zero_series(3, inst.T);
    for (int n = 1; n < 3; ++n) {
        for (int p = 0; p < 3; ++p) {
            const double peak = uniform(rng, 60.0, 120.0);
            for (int t = 0; t < inst.T; ++t) {
                const double v = peak * (0.7 + 0.3 * std::sin(0.9 * t + n + p));
                inst.loads_p_kw[n][t][p] = v;
                inst.loads_q_kvar[n][t][p] = 0.3 * v;
            }
        }
    }

    // Two EVs on phase a, one per load bus.
    const auto add_ev = [&](int index, int bus, std::vector<int> slots, double rate_kw,
                            double need_kwh) {
        FleetFileEntry entry;
        ChargingRequest req;
        req.id = ev_id(index);
        req.bus = bus;
        req.phase = 0;
        req.slots = std::move(slots);
        req.rate_cap = rate_kw;
        req.energy_need = need_kwh;
        entry.request = req;
        inst.entries.push_back(entry);
    };
    add_ev(0, 1, {1, 2, 3, 4}, 20.0, 50.0);
    add_ev(1, 2, {2, 3, 4}, 25.0, 45.0);
    return inst;
}

NetworkInstance build_synthetic123(std::uint64_t seed, int T) {
    if (T < 12) throw ValidationError("synthetic-123bus needs a horizon of at least 12 slots");
    std::mt19937_64 rng(seed);
    NetworkInstance inst;
    inst.T = T;
    inst.dt_minutes = (24 * 60) / std::max(T, 1);

    FeederModel f;
    f.base_kva = 5000.0;
    f.base_kv = 4.16;
    f.v0 = 1.0;
    f.f0_a = 0.05;
    f.f0_b = 0.02;

    const int N = 123;
    const int trunk_end = 50;
    for (int n = 0; n < N; ++n) {
        Bus bus;
        bus.id = n;
        if (n == 0) {
            bus.parent = -1;
            bus.phases = {true, true, true};
        } else if (n <= trunk_end) {
            // Three-phase backbone with occasional branching.
            bus.parent = (n == 1 || u01(rng) < 0.8) ? n - 1 : uniform_int(rng, 1, n - 1);
            bus.phases = {true, true, true};
        } else {
            // Laterals on one or two phases hanging off earlier buses.
            bus.parent = uniform_int(rng, 1, n - 1);
            const Bus& parent = f.buses[bus.parent];
            const auto pph = parent.phase_list();
            const int count = u01(rng) < 0.7 ? 1 : std::min<int>(2, pph.size());
            std::array<bool, 3> phases{};
            int first = pph[uniform_int(rng, 0, static_cast<int>(pph.size()) - 1)];
            phases[first] = true;
            while (count == 2) {
                const int second = pph[uniform_int(rng, 0, static_cast<int>(pph.size()) - 1)];
                if (second != first) {
                    phases[second] = true;
                    break;
                }
            }
            bus.phases = phases;
        }
        bus.v_min = 0.81;
        bus.v_max = 1.21;
        bus.s_line_max = 5.0;
        if (n > 0) bus.z = line_impedance(rng, bus.phases, uniform(rng, 0.3, 1.2));
        f.buses.push_back(bus);
    }

    // Fifteen dispatchable generation units on random non-substation buses.
    std::vector<int> dg_buses;
    while (dg_buses.size() < 15) {
        const int n = uniform_int(rng, 1, N - 1);
        if (std::find(dg_buses.begin(), dg_buses.end(), n) == dg_buses.end())
            dg_buses.push_back(n);
    }
    std::sort(dg_buses.begin(), dg_buses.end());
    for (int n : dg_buses) {
        Bus& bus = f.buses[n];
        bus.has_gen = true;
        for (int p : bus.phase_list()) {
            bus.gen.pmin[p] = 0.0;
            bus.gen.pmax[p] = uniform(rng, 0.004, 0.008);  // 20..40 kW on the 5 MVA base
            bus.gen.qmin[p] = -0.002;
            bus.gen.qmax[p] = 0.002;
            bus.gen.a[p] = uniform(rng, 0.5, 2.0);
            bus.gen.b[p] = uniform(rng, 0.01, 0.04);
            bus.gen.c[p] = 0.0;
        }
    }
    f.rebuild_derived();

    inst.loads_p_kw = zero_series(N, T);
    inst.loads_q_kvar = zero_series(N, T);
    for (int n = 1; n < N; ++n) {
        for (int p : f.buses[n].phase_list()) {
            const double peak = uniform(rng, 3.0, 25.0);
            const double jitter = uniform(rng, -0.8, 0.8);
            for (int t = 0; t < T; ++t) {
                const double hour = (t + 0.5) * 24.0 / T + jitter;
                const double v = peak * day_shape(hour) / day_shape(19.5);
                inst.loads_p_kw[n][t][p] = v;
                inst.loads_q_kvar[n][t][p] = 0.35 * v;
            }
        }
    }

    // Feeder cap sized above the aggregate peak.
    double peak_total = 0.0;
    for (int t = 0; t < T; ++t) {
        double s = 0.0;
        for (int n = 1; n < N; ++n) s += inst.loads_p_kw[n][t].sum();
        peak_total = std::max(peak_total, s);
    }
    f.sf_max = 2.0 * peak_total / f.base_kva;
    inst.feeder = f;

    // EV placement: counts fixed per bus, overnight windows.
    const std::vector<std::pair<int, int>> placement = {
        {3, 5}, {15, 10}, {64, 15}, {82, 25}, {102, 5}};
    const double battery = 20.0, rate = 3.45, e100 = 15.0, target = 0.9;
    int index = 0;
    for (const auto& [bus, count] : placement) {
        const int phase = f.buses[bus].phase_list().front();
        for (int i = 0; i < count; ++i, ++index) {
            FleetFileEntry entry;
            entry.window = true;
            entry.from = uniform_int(rng, static_cast<int>(0.75 * T), T - 1);
            entry.to = uniform_int(rng, std::max(2, T / 5), std::max(3, T / 3));
            entry.from_soc = true;
            entry.battery_kwh = battery;
            entry.daily_miles = std::clamp(35.0 + 18.0 * gaussian(rng), 5.0, 110.0);
            entry.e100_kwh = e100;
            entry.target_soc = target;

            ChargingRequest req;
            req.id = ev_id(index);
            req.bus = bus;
            req.phase = phase;
            req.rate_cap = rate;
            req.energy_need = energy_need_from_soc(battery, entry.daily_miles, e100, target);
            for (int s = 1; s <= entry.to; ++s) req.slots.push_back(s);
            for (int s = entry.from; s <= T; ++s) req.slots.push_back(s);
            entry.request = req;
            inst.entries.push_back(entry);
        }
    }
    return inst;
}

GeneratedFiles generate_instance(const std::string& kind, std::uint64_t seed,
                                 const std::string& out_dir, int T) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    GeneratedFiles out;
    out.kind = kind;
    const std::string provenance =
        "synthetic stand-in (no proprietary load or travel-survey data)";

    if (kind == "valley-59ev") {
        const ValleyInstance inst = build_valley59(seed);
        out.T = inst.T;
        const std::string fleet_path = (fs::path(out_dir) / "fleet.json").string();
        const std::string base_path = (fs::path(out_dir) / "base_load.csv").string();
        write_fleet(inst.entries, fleet_path, provenance, kind, seed, inst.T, inst.dt_minutes);
        write_base_load(inst.base_load_kw, base_path,
                        provenance + "; kind=" + kind + " seed=" + std::to_string(seed));
        out.paths = {fleet_path, base_path};
        return out;
    }
    if (kind == "toy-3bus" || kind == "synthetic-123bus") {
        const NetworkInstance inst =
            kind == "toy-3bus" ? build_toy3(seed) : build_synthetic123(seed, T);
        out.T = inst.T;
        const std::string feeder_path = (fs::path(out_dir) / "feeder.json").string();
        const std::string fleet_path = (fs::path(out_dir) / "fleet.json").string();
        const std::string loads_path = (fs::path(out_dir) / "loads.csv").string();
        write_feeder(inst.feeder, feeder_path, provenance);
        write_fleet(inst.entries, fleet_path, provenance, kind, seed, inst.T, inst.dt_minutes);
        write_bus_loads(inst.loads_p_kw, inst.loads_q_kvar, inst.feeder, loads_path,
                        provenance + "; kind=" + kind + " seed=" + std::to_string(seed));
        out.paths = {feeder_path, fleet_path, loads_path};
        return out;
    }
    throw UnknownKind("unknown instance kind: " + kind);
}

}  // namespace evsched

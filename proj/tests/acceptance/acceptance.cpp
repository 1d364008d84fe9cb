// Acceptance suite: one pass/fail line per criterion. Exit code equals the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evsched/admm.hpp"
#include "evsched/fleet.hpp"
#include "evsched/fw.hpp"
#include "evsched/grid.hpp"
#include "evsched/instances.hpp"
#include "evsched/io.hpp"
#include "evsched/oracle.hpp"
#include "evsched/pgd.hpp"

using namespace evsched;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome criterion_fw_optimality() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t seed = 1000 + i;
        const int M = 2 + static_cast<int>(seed % 9);       // 2..10
        const int T = 6 + static_cast<int>((seed / 7) % 7); // 6..12
        const auto fleet = build_random_fleet(seed, M, T);
        const Vec d = build_random_base(seed + 1, T);
        const auto ref = oracle::solve_aggregate(fleet, d, CostModel::valley(), 1e-10, 0.0);
        FwStop stop;
        stop.eps_rel = -1.0;
        stop.gap_tol_rel = 1e-7;
        stop.max_iter = 400000;
        const auto res = schedule(fleet, d, CostModel::valley(), stop);
        const double rel = std::abs(res.cost - ref.optimum) / std::max(std::abs(ref.optimum), 1e-12);
        worst = std::max(worst, rel);
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = worst <= 1e-6 && elapsed < 10.0;
    out.detail = "worst relative gap " + fmt(worst) + " over 20 instances, " + fmt(elapsed) + " s";
    return out;
}

Outcome criterion_valley59() {
    const auto start = Clock::now();
    const ValleyInstance inst = build_valley59(1);
    const auto fleet = inst.fleet();

    FwStop stop;
    stop.eps_rel = 1e-7;
    stop.max_iter = 100000;
    const auto fw = schedule(fleet, inst.base_load_kw, CostModel::valley(), stop);

    PgdConfig config;
    config.eps_rel = 1e-7;
    config.max_iter = 100000;
    const auto pgd = pgd_schedule(fleet, inst.base_load_kw, CostModel::valley(), config);

    const double rel = std::abs(fw.cost - pgd.cost) / std::max(std::abs(pgd.cost), 1e-12);
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = fw.converged && pgd.converged && rel <= 1e-5 && elapsed < 60.0;
    out.detail = "fw cost " + fmt(fw.cost) + " (" + std::to_string(fw.iterations) +
                 " it), pgd cost " + fmt(pgd.cost) + " (" + std::to_string(pgd.iterations) +
                 " it), rel gap " + fmt(rel) + ", " + fmt(elapsed) + " s";
    return out;
}

Outcome criterion_rate_envelope() {
    const auto fleet = build_random_fleet(1, 8, 12);
    const Vec d = build_random_base(1, 12);
    const auto ref = oracle::solve_aggregate(fleet, d, CostModel::valley(), 1e-10, 0.0);
    FwStop stop;
    stop.eps_rel = -1.0;
    stop.max_iter = 10000;
    const auto res = schedule(fleet, d, CostModel::valley(), stop);

    double at10 = -1.0, max_env = 0.0;
    for (const auto& row : res.trace) {
        if (row.iter < 10) continue;
        const double env = row.iter * (row.cost - ref.optimum);
        if (row.iter == 10) at10 = env;
        max_env = std::max(max_env, env);
    }
    Outcome out;
    out.pass = at10 > 0.0 && max_env <= 10.0 * at10;
    out.detail = "k*(C_k - C*) at k=10: " + fmt(at10) + ", max over k<=1e4: " + fmt(max_env);
    return out;
}

Outcome criterion_update_complexity() {
    const std::vector<int> horizons{24, 48, 96, 192};
    const int M = 40;
    std::vector<double> fw_per_iter, pgd_per_iter;
    for (int T : horizons) {
        const auto fleet = build_random_fleet(500 + T, M, T);
        const Vec d = build_random_base(501 + T, T);
        double best_fw = 1e30, best_pgd = 1e30;
        for (int rep = 0; rep < 3; ++rep) {
            FwStop stop;
            stop.eps_rel = -1.0;
            stop.max_iter = 200;
            auto t0 = Clock::now();
            (void)schedule(fleet, d, CostModel::valley(), stop);
            best_fw = std::min(best_fw, seconds_since(t0) / 200.0);

            PgdConfig config;
            config.eps_rel = -1.0;
            config.max_iter = 50;
            t0 = Clock::now();
            (void)pgd_schedule(fleet, d, CostModel::valley(), config);
            best_pgd = std::min(best_pgd, seconds_since(t0) / 50.0);
        }
        fw_per_iter.push_back(best_fw);
        pgd_per_iter.push_back(best_pgd);
    }
    auto slope = [&](const std::vector<double>& y) {
        // least squares over (T, y)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(horizons.size());
        for (int i = 0; i < n; ++i) {
            sx += horizons[i];
            sy += y[i];
            sxx += static_cast<double>(horizons[i]) * horizons[i];
            sxy += horizons[i] * y[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double fw_slope = std::max(slope(fw_per_iter), 1e-12);
    const double pgd_slope = slope(pgd_per_iter);
    const double ratio = pgd_slope / fw_slope;
    Outcome out;
    out.pass = ratio >= 5.0;
    out.detail = "per-iteration time slope vs T: pgd/fw = " + fmt(ratio) + " (fw " +
                 fmt(fw_slope) + " s/slot, pgd " + fmt(pgd_slope) + " s/slot)";
    return out;
}

Outcome criterion_rank_invariance() {
    std::mt19937_64 rng(77);
    const int T = 96;
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Vec caps(T);
        for (int t = 0; t < T; ++t) caps[t] = (rng() % 3) ? 3.45 : 0.0;
        const double budget = 0.6 * caps.sum();
        Vec g(T);
        for (int t = 0; t < T; ++t) g[t] = (static_cast<double>(rng() % 20000) - 10000.0) / 700.0;
        const Vec base = lmo_greedy(caps, budget, sort_prices(g));
        const std::vector<std::function<double(double)>> transforms = {
            [](double x) { return 0.5 * x - 3.0; },
            [](double x) { return std::exp(x / 40.0); },
            [](double x) { return x * x * x; },
            [](double x) { return std::atan(x); },
        };
        for (const auto& phi : transforms) {
            Vec gt(T);
            for (int t = 0; t < T; ++t) gt[t] = phi(g[t]);
            const Vec r = lmo_greedy(caps, budget, sort_prices(gt));
            if ((r - base).lpNorm<Eigen::Infinity>() != 0.0) ++failures;
        }
    }
    Outcome out;
    out.pass = failures == 0;
    out.detail = std::to_string(failures) + " mismatches over 100 gradients x 4 transforms";
    return out;
}

Outcome criterion_projection_suite() {
    std::mt19937_64 rng(99);
    double worst_simplex = 0.0, worst_disk = 0.0, worst_cap = 0.0, worst_idem = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        // capped simplex, including degenerate corners
        const int T = 2 + static_cast<int>(rng() % 6);
        Vec caps(T), v(T);
        for (int t = 0; t < T; ++t) {
            caps[t] = (trial % 17 == 0 && t == 0) ? 0.0 : (rng() % 1000) / 400.0;
            v[t] = (static_cast<double>(rng() % 2000) - 1000.0) / 250.0;
        }
        if (trial % 13 == 0) v.setZero();
        double budget = caps.sum() * (rng() % 1001) / 1000.0;
        if (trial % 11 == 0) budget = caps.sum();  // cap exactly met
        if (trial % 19 == 0) budget = 0.0;
        const Vec p = project_capped_simplex(v, caps, budget);
        const Vec pr = oracle::project_capped_simplex_ref(v, caps, budget);
        worst_simplex = std::max(worst_simplex, (p - pr).lpNorm<Eigen::Infinity>());
        const Vec pp = project_capped_simplex(p, caps, budget);
        worst_idem = std::max(worst_idem, (p - pp).lpNorm<Eigen::Infinity>());

        // line disk
        const double s_max = 0.1 + (rng() % 1000) / 300.0;
        double P = (static_cast<double>(rng() % 2000) - 1000.0) / 200.0;
        double Q = (static_cast<double>(rng() % 2000) - 1000.0) / 200.0;
        if (trial % 23 == 0) {
            P = 0.0;
            Q = 0.0;
        }
        if (trial % 29 == 0) {  // boundary point
            P = s_max;
            Q = 0.0;
        }
        const auto [pd, qd] = project_line_disk(P, Q, s_max);
        const auto [pdr, qdr] = oracle::project_disk_ref(P, Q, s_max);
        worst_disk = std::max({worst_disk, std::abs(pd - pdr), std::abs(qd - qdr)});
        const auto [pd2, qd2] = project_line_disk(pd, qd, s_max);
        worst_idem = std::max({worst_idem, std::abs(pd - pd2), std::abs(qd - qd2)});

        // substation capacity
        Vec3 P0, Q0;
        for (int i = 0; i < 3; ++i) {
            P0[i] = (static_cast<double>(rng() % 2000) - 1000.0) / 250.0;
            Q0[i] = (static_cast<double>(rng() % 2000) - 1000.0) / 250.0;
        }
        if (trial % 31 == 0) {
            P0.setZero();
            Q0.setZero();
        }
        const double cap = 0.1 + (rng() % 1000) / 300.0;
        const auto [Pc, Qc] = project_substation_capacity(P0, Q0, cap);
        const auto [Pcr, Qcr] = oracle::project_feeder_cap_ref(P0, Q0, cap);
        worst_cap = std::max({worst_cap, (Pc - Pcr).lpNorm<Eigen::Infinity>(),
                              (Qc - Qcr).lpNorm<Eigen::Infinity>()});
        const auto [Pc2, Qc2] = project_substation_capacity(Pc, Qc, cap);
        worst_idem = std::max({worst_idem, (Pc - Pc2).lpNorm<Eigen::Infinity>(),
                               (Qc - Qc2).lpNorm<Eigen::Infinity>()});
    }
    Outcome out;
    out.pass = worst_simplex <= 1e-6 && worst_disk <= 1e-6 && worst_cap <= 1e-6 &&
               worst_idem <= 1e-12;
    out.detail = "vs reference: simplex " + fmt(worst_simplex) + ", disk " + fmt(worst_disk) +
                 ", feeder cap " + fmt(worst_cap) + "; idempotence " + fmt(worst_idem);
    return out;
}

Outcome criterion_prop2_kkt() {
    std::mt19937_64 rng(7);
    double worst_stat = 0.0, worst_cs = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Vec3 P, Q;
        for (int i = 0; i < 3; ++i) {
            P[i] = (static_cast<double>(rng() % 2000) - 1000.0) / 200.0;
            Q[i] = (static_cast<double>(rng() % 2000) - 1000.0) / 200.0;
        }
        const double cap = 0.1 + (rng() % 1000) / 250.0;
        const auto [Pp, Qp] = project_substation_capacity(P, Q, cap);
        const double sigma = std::hypot(P.sum(), Q.sum());
        const double nu = sigma <= cap ? 0.0 : (sigma / cap - 1.0) / 3.0;
        const Vec3 gp = Pp - P + nu * Vec3::Constant(Pp.sum());
        const Vec3 gq = Qp - Q + nu * Vec3::Constant(Qp.sum());
        worst_stat = std::max({worst_stat, gp.lpNorm<Eigen::Infinity>(),
                               gq.lpNorm<Eigen::Infinity>()});
        const double sp = Pp.sum(), sq = Qp.sum();
        worst_cs = std::max(worst_cs, std::abs(nu * (sp * sp + sq * sq - cap * cap)));
    }
    Outcome out;
    out.pass = worst_stat <= 1e-8 && worst_cs <= 1e-8;
    out.detail = "stationarity " + fmt(worst_stat) + ", complementary slackness " + fmt(worst_cs);
    return out;
}

double constraint_violation(const FeederModel& feeder, const GridState& state,
                            const std::vector<ChargingRequest>& fleet,
                            const std::vector<Vec>& profiles, const BusSeries& d_p) {
    double worst = 0.0;
    for (int t = 0; t < state.T; ++t) {
        for (const auto& r : flow_residuals(feeder, state, t)) {
            worst = std::max({worst, r.p.lpNorm<Eigen::Infinity>(),
                              r.q.lpNorm<Eigen::Infinity>(), r.v.lpNorm<Eigen::Infinity>()});
        }
        for (int n = 0; n < feeder.num_buses(); ++n) {
            const Bus& bus = feeder.buses[n];
            for (int p : bus.phase_list()) {
                const double pg = state.pg[n][t][p];
                const double qg = state.qg[n][t][p];
                const double plo = bus.has_gen ? bus.gen.pmin[p] : 0.0;
                const double phi = bus.has_gen ? bus.gen.pmax[p] : 0.0;
                const double qlo = bus.has_gen ? bus.gen.qmin[p] : 0.0;
                const double qhi = bus.has_gen ? bus.gen.qmax[p] : 0.0;
                worst = std::max({worst, plo - pg, pg - phi, qlo - qg, qg - qhi});
                if (n > 0) {
                    worst = std::max({worst, bus.v_min - state.v[n][t][p],
                                      state.v[n][t][p] - bus.v_max});
                    const double flow = std::hypot(state.P[n][t][p], state.Q[n][t][p]);
                    worst = std::max(worst, flow - bus.s_line_max);
                }
            }
        }
        const double sp = state.P[0][t].sum(), sq = state.Q[0][t].sum();
        worst = std::max(worst, std::hypot(sp, sq) - feeder.sf_max);
    }
    // coupled load identity and charging feasibility
    for (std::size_t m = 0; m < fleet.size(); ++m) {
        const Vec caps = slot_caps(fleet[m], state.T);
        double sum = 0.0;
        for (int t = 0; t < state.T; ++t) {
            worst = std::max({worst, -profiles[m][t], profiles[m][t] - caps[t]});
            sum += profiles[m][t];
        }
        worst = std::max(worst, std::abs(sum - fleet[m].energy_need));
    }
    for (int n = 0; n < feeder.num_buses(); ++n) {
        for (int t = 0; t < state.T; ++t) {
            Vec3 ev = Vec3::Zero();
            for (std::size_t m = 0; m < fleet.size(); ++m)
                if (fleet[m].bus == n) ev[fleet[m].phase] += profiles[m][t];
            worst = std::max(worst,
                             (state.pd[n][t] - d_p[n][t] - ev).lpNorm<Eigen::Infinity>());
        }
    }
    return worst;
}

Outcome criterion_admm_toy() {
    const auto start = Clock::now();
    const NetworkInstance inst = build_toy3(1);
    const auto fleet = inst.fleet_pu();
    const auto d_p = inst.loads_p_pu();
    const auto d_q = inst.loads_q_pu();

    AdmmConfig config;
    config.rho = 8.0;
    config.tol = 1e-3;
    config.max_iter = 5000;
    config.inner_max_iter = 20000;
    const auto res = admm_solve(inst.feeder, fleet, d_p, d_q, config);

    const auto ref = oracle::solve_network(inst.feeder, fleet, d_p, d_q);
    const double rel =
        std::abs(res.objective - ref.optimum) / std::max(std::abs(ref.optimum), 1e-12);
    const double violation =
        constraint_violation(inst.feeder, res.repaired, fleet, res.profiles, d_p);
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = res.converged && res.iterations <= 5000 && rel <= 1e-3 && violation <= 1e-4 &&
               elapsed < 120.0;
    out.detail = std::to_string(res.iterations) + " it, objective " + fmt(res.objective) +
                 " vs oracle " + fmt(ref.optimum) + " (rel " + fmt(rel) + "), worst violation " +
                 fmt(violation) + ", " + fmt(elapsed) + " s";
    return out;
}

Outcome criterion_relaxation_equivalence() {
    NetworkInstance inst = build_toy3(1);
    // loosen every network limit a hundredfold
    FeederModel& f = inst.feeder;
    f.sf_max *= 100.0;
    for (auto& bus : f.buses) {
        bus.s_line_max *= 100.0;
        bus.v_min /= 100.0;
        bus.v_max *= 100.0;
    }
    const auto fleet = inst.fleet_pu();
    const auto d_p = inst.loads_p_pu();
    const auto d_q = inst.loads_q_pu();

    AdmmConfig config;
    config.rho = 8.0;
    config.tol = 1e-5;
    config.max_iter = 30000;
    config.inner_max_iter = 20000;
    const auto res = admm_solve(f, fleet, d_p, d_q, config);

    // equivalent aggregate problem: all EVs sit on phase a, so the relevant
    // base load is the phase-a total and the cost is the per-phase supply cost
    const int T = inst.T;
    Vec d_total = Vec::Zero(T);
    for (int n = 0; n < f.num_buses(); ++n)
        for (int t = 0; t < T; ++t) d_total[t] += d_p[n][t][0];
    std::vector<ChargingRequest> agg_fleet = fleet;
    for (auto& req : agg_fleet) {
        req.bus = -1;
        req.phase = -1;
    }
    const CostModel cost =
        CostModel::quadratic(Vec::Constant(T, f.f0_a), Vec::Constant(T, f.f0_b));
    FwStop stop;
    stop.eps_rel = -1.0;
    stop.gap_tol = 1e-12;
    stop.max_iter = 500000;
    const auto fw = schedule(agg_fleet, d_total, cost, stop);

    Vec admm_agg = Vec::Zero(T), fw_agg = Vec::Zero(T);
    for (std::size_t m = 0; m < fleet.size(); ++m) {
        admm_agg += res.profiles[m];
        fw_agg += fw.profiles[m];
    }
    const double worst = (admm_agg - fw_agg).lpNorm<Eigen::Infinity>();
    Outcome out;
    out.pass = worst <= 1e-3;
    out.detail = "max per-slot aggregate gap " + fmt(worst) + " (admm " +
                 std::to_string(res.iterations) + " it, converged " +
                 (res.converged ? "yes" : "no") + ")";
    return out;
}

Outcome criterion_admm_123() {
    const auto start = Clock::now();
    const NetworkInstance inst = build_synthetic123(1, 24);
    const auto fleet = inst.fleet_pu();

    AdmmConfig config;
    config.rho = 30.0;
    config.tol = 1e-3;
    config.max_iter = 5000;
    config.inner_max_iter = 2000;
    config.threads = 4;
    const auto res = admm_solve(inst.feeder, fleet, inst.loads_p_pu(), inst.loads_q_pu(),
                                config);
    const double elapsed = seconds_since(start);
    const double threshold = residual_threshold(config.tol, inst.T, inst.feeder.num_buses());
    Outcome out;
    out.pass = res.converged && res.iterations <= 5000 && elapsed < 1800.0;
    out.detail = std::to_string(res.iterations) + " it, op " + fmt(res.residuals.op) +
                 ", od " + fmt(res.residuals.od) + " vs threshold " + fmt(threshold) + ", " +
                 fmt(elapsed) + " s";
    return out;
}

Outcome criterion_grid_consistency() {
    std::mt19937_64 rng(2024);
    double worst_residual = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + static_cast<int>(rng() % 122);
        FeederModel f;
        for (int n = 0; n < N; ++n) {
            Bus bus;
            bus.id = n;
            if (n == 0) {
                bus.parent = -1;
                bus.phases = {true, true, true};
            } else {
                bus.parent = static_cast<int>(rng() % n);
                const auto pph = f.buses[bus.parent].phase_list();
                bus.phases = {};
                const int count = 1 + static_cast<int>(rng() % pph.size());
                for (int i = 0; i < count; ++i) bus.phases[pph[rng() % pph.size()]] = true;
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j) {
                        if (!bus.phases[i] || !bus.phases[j]) continue;
                        const std::complex<double> zij(0.001 + (rng() % 100) / 10000.0,
                                                       0.002 + (rng() % 100) / 8000.0);
                        bus.z(i, j) = zij;
                        bus.z(j, i) = zij;
                    }
            }
            f.buses.push_back(bus);
        }
        f.rebuild_derived();
        f.validate();
        const int T = 2;
        BusSeries pg = zero_series(N, T), pd = zero_series(N, T), qg = zero_series(N, T),
                  qd = zero_series(N, T);
        for (int n = 0; n < N; ++n)
            for (int t = 0; t < T; ++t)
                for (int p : f.buses[n].phase_list()) {
                    pd[n][t][p] = (static_cast<double>(rng() % 2000) - 1000.0) / 20000.0;
                    qd[n][t][p] = (static_cast<double>(rng() % 2000) - 1000.0) / 40000.0;
                    pg[n][t][p] = (static_cast<double>(rng() % 2000) - 1000.0) / 50000.0;
                }
        const GridState s = forward_sweep(f, pg, pd, qg, qd);
        for (int t = 0; t < T; ++t)
            for (const auto& r : flow_residuals(f, s, t))
                worst_residual =
                    std::max({worst_residual, r.p.lpNorm<Eigen::Infinity>(),
                              r.q.lpNorm<Eigen::Infinity>(), r.v.lpNorm<Eigen::Infinity>()});
    }

    const Mat3c zr = zbar(Mat3c::Identity());
    const Mat3c zj = zbar(std::complex<double>(0, 1) * Mat3c::Identity());
    double worst_zbar = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const std::complex<double> er = i == j ? std::complex<double>(2, 0) : 0.0;
            const std::complex<double> ej = i == j ? std::complex<double>(0, -2) : 0.0;
            worst_zbar = std::max({worst_zbar, std::abs(zr(i, j) - er), std::abs(zj(i, j) - ej)});
        }
    Outcome out;
    out.pass = worst_residual <= 1e-12 && worst_zbar <= 1e-14;
    out.detail = "worst sweep residual " + fmt(worst_residual) + ", zbar identity error " +
                 fmt(worst_zbar);
    return out;
}

Outcome criterion_determinism() {
    // criteria 1, 2, 8 scenarios re-run across worker counts; result files
    // must be byte-identical
    std::vector<std::string> mismatch;

    {  // desk-scale conditional gradient (criterion 1 representative)
        const auto fleet = build_random_fleet(1000, 10, 12);
        const Vec d = build_random_base(1001, 12);
        FwStop stop;
        stop.eps_rel = -1.0;
        stop.gap_tol_rel = 1e-7;
        stop.max_iter = 400000;
        std::string reference;
        for (int threads : {1, 4, 8, 1}) {
            const auto res = schedule(fleet, d, CostModel::valley(), stop, threads);
            ScheduleArtifacts art;
            art.solver = "fw";
            art.base_load = d;
            art.profiles = res.profiles;
            art.cost = res.cost;
            art.gap = res.gap;
            art.iterations = res.iterations;
            art.converged = res.converged;
            const std::string text = schedule_result_json(art);
            if (reference.empty())
                reference = text;
            else if (text != reference)
                mismatch.push_back("fw-desk@" + std::to_string(threads));
        }
    }
    {  // 59-EV valley instance (criterion 2)
        const ValleyInstance inst = build_valley59(1);
        const auto fleet = inst.fleet();
        std::string reference;
        for (int threads : {1, 4, 8, 1}) {
            FwStop stop;
            stop.eps_rel = 1e-7;
            const auto fw = schedule(fleet, inst.base_load_kw, CostModel::valley(), stop,
                                     threads);
            PgdConfig config;
            config.eps_rel = 1e-7;
            const auto pgd =
                pgd_schedule(fleet, inst.base_load_kw, CostModel::valley(), config, threads);
            ScheduleArtifacts a1, a2;
            a1.solver = "fw";
            a1.base_load = inst.base_load_kw;
            a1.profiles = fw.profiles;
            a1.cost = fw.cost;
            a2.solver = "pgd";
            a2.base_load = inst.base_load_kw;
            a2.profiles = pgd.profiles;
            a2.cost = pgd.cost;
            const std::string text = schedule_result_json(a1) + schedule_result_json(a2);
            if (reference.empty())
                reference = text;
            else if (text != reference)
                mismatch.push_back("valley59@" + std::to_string(threads));
        }
    }
    {  // toy network solve (criterion 8)
        const NetworkInstance inst = build_toy3(1);
        const auto fleet = inst.fleet_pu();
        std::string reference;
        for (int threads : {1, 4, 8, 1}) {
            AdmmConfig config;
            config.rho = 8.0;
            config.tol = 1e-3;
            config.max_iter = 1500;
            config.inner_max_iter = 20000;
            config.threads = threads;
            const auto res =
                admm_solve(inst.feeder, fleet, inst.loads_p_pu(), inst.loads_q_pu(), config);
            const std::string text = solution_json(res, inst.feeder, fleet);
            if (reference.empty())
                reference = text;
            else if (text != reference)
                mismatch.push_back("toy3@" + std::to_string(threads));
        }
    }
    Outcome out;
    out.pass = mismatch.empty();
    if (out.pass) {
        out.detail = "identical result bytes across reruns and 1/4/8 workers";
    } else {
        out.detail = "mismatches:";
        for (const auto& m : mismatch) out.detail += " " + m;
    }
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"fw-optimality-desk", criterion_fw_optimality},
        {"valley-59ev-reproduction", criterion_valley59},
        {"convergence-rate-envelope", criterion_rate_envelope},
        {"per-update-complexity", criterion_update_complexity},
        {"lmo-rank-invariance", criterion_rank_invariance},
        {"projection-suite", criterion_projection_suite},
        {"substation-projection-kkt", criterion_prop2_kkt},
        {"admm-toy-optimality", criterion_admm_toy},
        {"relaxation-equivalence", criterion_relaxation_equivalence},
        {"admm-123bus-convergence", criterion_admm_123},
        {"grid-self-consistency", criterion_grid_consistency},
        {"determinism", criterion_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        if (!out.pass) ++failures;
        std::printf("[%2zu] %-28s %s  (%s)\n", i + 1, criteria[i].name,
                    out.pass ? "PASS" : "FAIL", out.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evsched/admm.hpp"
#include "evsched/errors.hpp"
#include "evsched/fleet.hpp"
#include "evsched/fw.hpp"
#include "evsched/grid.hpp"
#include "evsched/instances.hpp"
#include "evsched/io.hpp"
#include "evsched/oracle.hpp"
#include "evsched/pgd.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

evsched::CostModel cost_from_spec(const std::string& spec, int T) {
    if (spec.empty() || spec == "quadratic" || spec == "valley")
        return evsched::CostModel::valley();
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::string rest = spec.substr(colon + 1);
        std::stringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
    }
    if (kind == "quadratic" && args.size() >= 1) {
        const double a = args[0];
        const double b = args.size() > 1 ? args[1] : 0.0;
        return evsched::CostModel::quadratic_uniform(a, b, T);
    }
    if (kind == "linear") {
        const double b = args.empty() ? 1.0 : args[0];
        return evsched::CostModel::linear(evsched::Vec::Constant(T, b));
    }
    throw evsched::ValidationError("unknown cost spec: " + spec +
                                   " (use quadratic | quadratic:a[,b] | linear:b)");
}

struct ScheduleOptions {
    std::string fleet_path, base_path, trace_path, out_path;
    std::string cost_spec = "quadratic";
    double eps = 1e-7;
    double gap_tol = -1.0;
    double step = 0.0;
    int max_iter = 100000;
};

int run_schedule(const ScheduleOptions& opt, bool use_pgd, int threads) {
    const evsched::Vec base = evsched::parse_base_load(opt.base_path);
    const int T = static_cast<int>(base.size());
    const auto fleet = evsched::parse_fleet(opt.fleet_path, T);
    for (const auto& req : fleet) evsched::validate_request(req, T);
    const evsched::CostModel cost = cost_from_spec(opt.cost_spec, T);

    evsched::ScheduleArtifacts artifacts;
    artifacts.base_load = base;
    for (const auto& req : fleet) artifacts.ids.push_back(req.id);

    bool converged = false;
    if (use_pgd) {
        evsched::PgdConfig config;
        config.step = opt.step;
        config.max_iter = opt.max_iter;
        config.eps_rel = opt.eps;
        const auto res = evsched::pgd_schedule(fleet, base, cost, config, threads);
        artifacts.solver = "pgd";
        artifacts.profiles = res.profiles;
        artifacts.cost = res.cost;
        artifacts.iterations = res.iterations;
        artifacts.converged = converged = res.converged;
        if (!opt.trace_path.empty())
            evsched::write_text(evsched::pgd_trace_csv(res.trace), opt.trace_path);
    } else {
        evsched::FwStop stop;
        stop.max_iter = opt.max_iter;
        stop.eps_rel = opt.eps;
        stop.gap_tol = opt.gap_tol;
        const auto res = evsched::schedule(fleet, base, cost, stop, threads);
        artifacts.solver = "fw";
        artifacts.profiles = res.profiles;
        artifacts.cost = res.cost;
        artifacts.gap = res.gap;
        artifacts.iterations = res.iterations;
        artifacts.converged = converged = res.converged;
        artifacts.warnings = res.warnings;
        if (!opt.trace_path.empty())
            evsched::write_text(evsched::fw_trace_csv(res.trace), opt.trace_path);
    }
    if (!opt.out_path.empty()) evsched::write_schedule_result(artifacts, opt.out_path);
    std::cout << artifacts.solver << ": cost " << evsched::format_double(artifacts.cost)
              << ", iterations " << artifacts.iterations
              << (converged ? ", converged" : ", NOT converged") << "\n";
    return converged ? kExitOk : kExitNotConverged;
}

struct NetworkOptions {
    std::string feeder_path, fleet_path, load_path, trace_path, out_path;
    double rho = 1.0;
    double tol = 1e-3;
    int max_iter = 20000;
};

int run_network(const NetworkOptions& opt, int threads) {
    const evsched::FeederModel feeder = evsched::parse_feeder(opt.feeder_path);
    const evsched::BusLoads loads = evsched::parse_bus_loads(opt.load_path, feeder);
    auto fleet = evsched::parse_fleet(opt.fleet_path, loads.T);
    for (auto& req : fleet) {  // file units are kW/kWh; the solver runs per-unit
        req.rate_cap /= feeder.base_kva;
        req.energy_need /= feeder.base_kva;
    }
    evsched::AdmmConfig config;
    config.rho = opt.rho;
    config.tol = opt.tol;
    config.max_iter = opt.max_iter;
    config.threads = threads;
    const auto result = evsched::admm_solve(feeder, fleet, loads.p, loads.q, config);
    if (!opt.trace_path.empty())
        evsched::write_text(evsched::admm_trace_csv(result.trace), opt.trace_path);
    if (!opt.out_path.empty())
        evsched::write_solution(result, feeder, fleet, opt.out_path);
    std::cout << "admm: objective " << evsched::format_double(result.objective)
              << ", iterations " << result.iterations << ", op "
              << evsched::format_double(result.residuals.op) << ", od "
              << evsched::format_double(result.residuals.od)
              << (result.converged ? ", converged" : ", NOT converged") << "\n";
    return result.converged ? kExitOk : kExitNotConverged;
}

struct CompareOptions {
    std::string fleet_path, base_path, feeder_path, load_path, out_path;
    std::string cost_spec = "quadratic";
    std::vector<std::string> solvers;
    double eps = 1e-7;
    double rho = 1.0;
    double tol = 1e-3;
    int max_iter = 100000;
    std::string format = "json";
};

int run_compare(const CompareOptions& opt, int threads) {
    struct Entry {
        double cost = 0.0;
        int iterations = 0;
        bool converged = false;
        evsched::Vec total_load;
    };
    std::map<std::string, Entry> entries;
    bool all_converged = true;
    const bool network_mode = !opt.feeder_path.empty();

    if (!network_mode) {
        const evsched::Vec base = evsched::parse_base_load(opt.base_path);
        const int T = static_cast<int>(base.size());
        const auto fleet = evsched::parse_fleet(opt.fleet_path, T);
        const evsched::CostModel cost = cost_from_spec(opt.cost_spec, T);
        for (const auto& solver : opt.solvers) {
            Entry e;
            std::vector<evsched::Vec> profiles;
            if (solver == "fw") {
                evsched::FwStop stop;
                stop.eps_rel = opt.eps;
                stop.max_iter = opt.max_iter;
                const auto res = evsched::schedule(fleet, base, cost, stop, threads);
                e = {res.cost, res.iterations, res.converged, {}};
                profiles = res.profiles;
            } else if (solver == "pgd") {
                evsched::PgdConfig config;
                config.eps_rel = opt.eps;
                config.max_iter = opt.max_iter;
                const auto res = evsched::pgd_schedule(fleet, base, cost, config, threads);
                e = {res.cost, res.iterations, res.converged, {}};
                profiles = res.profiles;
            } else if (solver == "oracle") {
                const auto res = evsched::oracle::solve_aggregate(fleet, base, cost, 1e-10,
                                                                  1e-9, 2000000);
                e = {res.optimum, res.iterations, res.certified, {}};
                profiles = res.profiles;
            } else {
                throw evsched::ValidationError("solver '" + solver +
                                               "' not applicable to an aggregate scenario");
            }
            e.total_load = base + evsched::aggregate_profiles(profiles, T);
            all_converged = all_converged && e.converged;
            entries[solver] = std::move(e);
        }
    } else {
        const evsched::FeederModel feeder = evsched::parse_feeder(opt.feeder_path);
        const evsched::BusLoads loads = evsched::parse_bus_loads(opt.load_path, feeder);
        auto fleet = evsched::parse_fleet(opt.fleet_path, loads.T);
        for (auto& req : fleet) {
            req.rate_cap /= feeder.base_kva;
            req.energy_need /= feeder.base_kva;
        }
        for (const auto& solver : opt.solvers) {
            Entry e;
            std::vector<evsched::Vec> profiles;
            if (solver == "admm") {
                evsched::AdmmConfig config;
                config.rho = opt.rho;
                config.tol = opt.tol;
                config.max_iter = opt.max_iter;
                config.threads = threads;
                const auto res = evsched::admm_solve(feeder, fleet, loads.p, loads.q, config);
                e = {res.objective, res.iterations, res.converged, {}};
                profiles = res.profiles;
            } else if (solver == "oracle") {
                const auto res = evsched::oracle::solve_network(feeder, fleet, loads.p, loads.q);
                e = {res.optimum, res.iterations, res.certified, {}};
                profiles = res.profiles;
            } else {
                throw evsched::ValidationError("solver '" + solver +
                                               "' not applicable to a network scenario");
            }
            e.total_load = evsched::aggregate_profiles(profiles, loads.T);
            all_converged = all_converged && e.converged;
            entries[solver] = std::move(e);
        }
    }

    double max_gap = 0.0;
    for (const auto& [name_a, a] : entries) {
        for (const auto& [name_b, b] : entries) {
            if (name_a >= name_b) continue;
            const double scale = std::max({std::abs(a.cost), std::abs(b.cost), 1e-12});
            max_gap = std::max(max_gap, std::abs(a.cost - b.cost) / scale);
        }
    }

    json j;
    j["mode"] = network_mode ? "network" : "aggregate";
    j["max_pairwise_relative_gap"] = max_gap;
    json js;
    for (const auto& [name, e] : entries) {
        js[name] = {{"cost", e.cost},
                    {"iterations", e.iterations},
                    {"converged", e.converged},
                    {"total_load",
                     std::vector<double>(e.total_load.data(),
                                         e.total_load.data() + e.total_load.size())}};
    }
    j["solvers"] = js;

    std::string text;
    if (opt.format == "csv") {
        text = "solver,cost,iterations,converged\n";
        for (const auto& [name, e] : entries)
            text += name + "," + evsched::format_double(e.cost) + "," +
                    std::to_string(e.iterations) + "," + (e.converged ? "1" : "0") + "\n";
    } else {
        text = j.dump(2) + "\n";
    }
    if (!opt.out_path.empty())
        evsched::write_text(text, opt.out_path);
    else
        std::cout << text;
    if (!opt.out_path.empty())
        std::cout << "max pairwise relative cost gap: " << evsched::format_double(max_gap)
                  << "\n";
    return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EV charging schedulers: aggregate conditional-gradient protocol and "
                 "consensus-ADMM network-constrained dispatch"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "json";
    app.add_option("--seed", seed, "Seed for synthetic instance generation");
    app.add_option("--threads", threads, "Worker threads (results are thread-count invariant)");
    app.add_option("--format", format, "Output format for compare: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* gen = app.add_subcommand("generate", "Write a synthetic instance to a directory");
    std::string gen_kind, gen_out = ".";
    int gen_T = 24;
    gen->add_option("--kind", gen_kind, "valley-59ev | toy-3bus | synthetic-123bus")
        ->required();
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--t", gen_T, "Horizon for synthetic-123bus (slots)");

    ScheduleOptions fw_opt;
    auto* fw = app.add_subcommand("schedule-fw", "Aggregate charging via conditional gradient");
    fw->add_option("--fleet", fw_opt.fleet_path)->required();
    fw->add_option("--base-load", fw_opt.base_path)->required();
    fw->add_option("--cost", fw_opt.cost_spec, "quadratic | quadratic:a[,b] | linear:b");
    fw->add_option("--eps", fw_opt.eps, "Relative cost-change tolerance");
    fw->add_option("--gap-tol", fw_opt.gap_tol, "Duality-gap tolerance (absolute; off if <0)");
    fw->add_option("--max-iter", fw_opt.max_iter);
    fw->add_option("--trace", fw_opt.trace_path, "Per-iteration CSV (iter,cost,gap,eta)");
    fw->add_option("--out", fw_opt.out_path, "Result JSON");

    ScheduleOptions pgd_opt;
    auto* pgd = app.add_subcommand("schedule-pgd", "Aggregate charging via projected gradient");
    pgd->add_option("--fleet", pgd_opt.fleet_path)->required();
    pgd->add_option("--base-load", pgd_opt.base_path)->required();
    pgd->add_option("--cost", pgd_opt.cost_spec);
    pgd->add_option("--eps", pgd_opt.eps);
    pgd->add_option("--step", pgd_opt.step, "Step size (0 selects 1/(M*curvature))");
    pgd->add_option("--max-iter", pgd_opt.max_iter);
    pgd->add_option("--trace", pgd_opt.trace_path, "Per-iteration CSV (iter,cost)");
    pgd->add_option("--out", pgd_opt.out_path);

    NetworkOptions net_opt;
    auto* net = app.add_subcommand("solve-network",
                                   "Network-constrained charging via consensus ADMM");
    net->add_option("--feeder", net_opt.feeder_path)->required();
    net->add_option("--fleet", net_opt.fleet_path)->required();
    net->add_option("--load", net_opt.load_path)->required();
    net->add_option("--rho", net_opt.rho);
    net->add_option("--tol", net_opt.tol, "Residual scale (stop at tol * T * sqrt(buses))");
    net->add_option("--max-iter", net_opt.max_iter);
    net->add_option("--trace", net_opt.trace_path, "Per-iteration CSV (iter,cost,op,od,op_std)");
    net->add_option("--out", net_opt.out_path, "Solution JSON");

    auto* val = app.add_subcommand("validate-feeder", "Parse and validate a feeder file");
    std::string val_path;
    val->add_option("--feeder", val_path)->required();

    CompareOptions cmp_opt;
    auto* cmp = app.add_subcommand("compare", "Run several solvers and report cost gaps");
    cmp->add_option("--solvers", cmp_opt.solvers, "Subset of fw,pgd,oracle,admm")
        ->required()
        ->delimiter(',');
    cmp->add_option("--fleet", cmp_opt.fleet_path)->required();
    cmp->add_option("--base-load", cmp_opt.base_path);
    cmp->add_option("--feeder", cmp_opt.feeder_path);
    cmp->add_option("--load", cmp_opt.load_path);
    cmp->add_option("--cost", cmp_opt.cost_spec);
    cmp->add_option("--eps", cmp_opt.eps);
    cmp->add_option("--rho", cmp_opt.rho);
    cmp->add_option("--tol", cmp_opt.tol);
    cmp->add_option("--max-iter", cmp_opt.max_iter);
    cmp->add_option("--out", cmp_opt.out_path);

    CLI11_PARSE(app, argc, argv);
    cmp_opt.format = format;

    try {
        if (gen->parsed()) {
            const auto files = evsched::generate_instance(gen_kind, seed, gen_out, gen_T);
            for (const auto& p : files.paths) std::cout << p << "\n";
            return kExitOk;
        }
        if (fw->parsed()) return run_schedule(fw_opt, false, threads);
        if (pgd->parsed()) return run_schedule(pgd_opt, true, threads);
        if (net->parsed()) return run_network(net_opt, threads);
        if (val->parsed()) {
            const auto feeder = evsched::parse_feeder(val_path);
            int lines = 0, phases = 0;
            for (const auto& bus : feeder.buses) {
                if (bus.parent >= 0) ++lines;
                phases += bus.phase_count();
            }
            std::cout << "feeder ok: " << feeder.num_buses() << " buses, " << lines
                      << " lines, " << phases << " bus-phases, base "
                      << evsched::format_double(feeder.base_kva) << " kVA\n";
            return kExitOk;
        }
        if (cmp->parsed()) return run_compare(cmp_opt, threads);
    } catch (const evsched::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evsched/admm.hpp"
#include "evsched/errors.hpp"
#include "evsched/fleet.hpp"
#include "evsched/fw.hpp"
#include "evsched/grid.hpp"
#include "evsched/instances.hpp"
#include "evsched/io.hpp"
#include "evsched/oracle.hpp"
#include "evsched/pgd.hpp"

namespace py = pybind11;
using namespace evsched;

namespace {

py::dict fw_result_dict(const FwResult& res) {
    py::dict d;
    d["profiles"] = res.profiles;
    d["cost"] = res.cost;
    d["gap"] = res.gap;
    d["iterations"] = res.iterations;
    d["converged"] = res.converged;
    d["warnings"] = res.warnings;
    return d;
}

py::dict pgd_result_dict(const PgdResult& res) {
    py::dict d;
    d["profiles"] = res.profiles;
    d["cost"] = res.cost;
    d["step"] = res.step;
    d["iterations"] = res.iterations;
    d["converged"] = res.converged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "EV charging schedulers: sorting-based conditional-gradient protocol, "
              "projected-gradient baseline, and consensus-ADMM network dispatch";

    py::register_exception<Error>(m, "EvschedError");

    py::class_<ChargingRequest>(m, "ChargingRequest")
        .def(py::init([](std::string id, std::vector<int> slots, double rate_cap,
                         double energy_need, int bus, int phase) {
                 ChargingRequest r;
                 r.id = std::move(id);
                 r.slots = std::move(slots);
                 r.rate_cap = rate_cap;
                 r.energy_need = energy_need;
                 r.bus = bus;
                 r.phase = phase;
                 return r;
             }),
             py::arg("id"), py::arg("slots"), py::arg("rate_cap"), py::arg("energy_need"),
             py::arg("bus") = -1, py::arg("phase") = -1)
        .def_readwrite("id", &ChargingRequest::id)
        .def_readwrite("slots", &ChargingRequest::slots)
        .def_readwrite("rate_cap", &ChargingRequest::rate_cap)
        .def_readwrite("energy_need", &ChargingRequest::energy_need)
        .def_readwrite("bus", &ChargingRequest::bus)
        .def_readwrite("phase", &ChargingRequest::phase);

    py::class_<CostModel>(m, "CostModel")
        .def_static("valley", &CostModel::valley)
        .def_static("quadratic", [](Vec a, Vec b) { return CostModel::quadratic(a, b); })
        .def_static("linear", &CostModel::linear)
        .def("eval", &CostModel::eval)
        .def("deriv", &CostModel::deriv);

    m.def("validate_request", &validate_request, py::arg("request"), py::arg("t_slots"));
    m.def("energy_need_from_soc", &energy_need_from_soc, py::arg("battery_kwh"),
          py::arg("daily_miles"), py::arg("e100_kwh") = 15.0, py::arg("target_soc") = 0.9);
    m.def("slot_caps", &slot_caps, py::arg("request"), py::arg("t_slots"));
    m.def("total_cost", &total_cost, py::arg("profiles"), py::arg("base_load"),
          py::arg("cost"));

    m.def("common_gradient", &common_gradient, py::arg("base_load"), py::arg("aggregate"),
          py::arg("cost"));
    m.def("sort_prices", &sort_prices, py::arg("gradient"));
    m.def(
        "lmo_greedy",
        [](const Vec& caps, double budget, const std::vector<int>& order) {
            return lmo_greedy(caps, budget, order);
        },
        py::arg("caps"), py::arg("budget"), py::arg("order"));
    m.def("fw_step", &fw_step, py::arg("e"), py::arg("r"), py::arg("k"));

    m.def(
        "schedule_fw",
        [](const std::vector<ChargingRequest>& fleet, const Vec& base_load,
           const CostModel& cost, double eps, double gap_tol, int max_iter, int threads) {
            FwStop stop;
            stop.eps_rel = eps;
            stop.gap_tol = gap_tol;
            stop.max_iter = max_iter;
            return fw_result_dict(schedule(fleet, base_load, cost, stop, threads));
        },
        py::arg("fleet"), py::arg("base_load"), py::arg("cost") = CostModel::valley(),
        py::arg("eps") = 1e-7, py::arg("gap_tol") = -1.0, py::arg("max_iter") = 100000,
        py::arg("threads") = 1);

    m.def("project_capped_simplex", &project_capped_simplex, py::arg("v"), py::arg("caps"),
          py::arg("budget"));
    m.def(
        "schedule_pgd",
        [](const std::vector<ChargingRequest>& fleet, const Vec& base_load,
           const CostModel& cost, double step, double eps, int max_iter, int threads) {
            PgdConfig config;
            config.step = step;
            config.eps_rel = eps;
            config.max_iter = max_iter;
            return pgd_result_dict(pgd_schedule(fleet, base_load, cost, config, threads));
        },
        py::arg("fleet"), py::arg("base_load"), py::arg("cost") = CostModel::valley(),
        py::arg("step") = 0.0, py::arg("eps") = 1e-7, py::arg("max_iter") = 100000,
        py::arg("threads") = 1);

    m.def("zbar", &zbar, py::arg("z"));
    m.def("project_line_disk", &project_line_disk, py::arg("p"), py::arg("q"),
          py::arg("s_max"));
    m.def("project_substation_capacity", &project_substation_capacity, py::arg("p"),
          py::arg("q"), py::arg("sf_max"));

    m.def(
        "oracle_aggregate",
        [](const std::vector<ChargingRequest>& fleet, const Vec& base_load,
           const CostModel& cost, double gap_tol, double gap_tol_rel, int max_iter) {
            const auto rep = oracle::solve_aggregate(fleet, base_load, cost, gap_tol,
                                                     gap_tol_rel, max_iter);
            py::dict d;
            d["optimum"] = rep.optimum;
            d["profiles"] = rep.profiles;
            d["gap"] = rep.gap;
            d["iterations"] = rep.iterations;
            return d;
        },
        py::arg("fleet"), py::arg("base_load"), py::arg("cost") = CostModel::valley(),
        py::arg("gap_tol") = 1e-10, py::arg("gap_tol_rel") = 0.0,
        py::arg("max_iter") = 2000000);

    m.def(
        "generate_instance",
        [](const std::string& kind, std::uint64_t seed, const std::string& out_dir, int T) {
            const auto files = generate_instance(kind, seed, out_dir, T);
            py::dict d;
            d["kind"] = files.kind;
            d["t_slots"] = files.T;
            d["paths"] = files.paths;
            return d;
        },
        py::arg("kind"), py::arg("seed"), py::arg("out_dir"), py::arg("t_slots") = 24);

    m.def(
        "validate_feeder",
        [](const std::string& path) {
            const auto feeder = parse_feeder(path);
            py::dict d;
            d["buses"] = feeder.num_buses();
            d["base_kva"] = feeder.base_kva;
            d["sf_max_pu"] = feeder.sf_max;
            return d;
        },
        py::arg("path"));

    m.def(
        "solve_network",
        [](const std::string& feeder_path, const std::string& fleet_path,
           const std::string& loads_path, double rho, double tol, int max_iter, int threads) {
            const FeederModel feeder = parse_feeder(feeder_path);
            const BusLoads loads = parse_bus_loads(loads_path, feeder);
            auto fleet = parse_fleet(fleet_path, loads.T);
            for (auto& req : fleet) {
                req.rate_cap /= feeder.base_kva;
                req.energy_need /= feeder.base_kva;
            }
            AdmmConfig config;
            config.rho = rho;
            config.tol = tol;
            config.max_iter = max_iter;
            config.threads = threads;
            const auto res = admm_solve(feeder, fleet, loads.p, loads.q, config);
            py::dict d;
            d["converged"] = res.converged;
            d["iterations"] = res.iterations;
            d["objective"] = res.objective;
            d["op"] = res.residuals.op;
            d["od"] = res.residuals.od;
            d["profiles"] = res.profiles;
            return d;
        },
        py::arg("feeder"), py::arg("fleet"), py::arg("loads"), py::arg("rho") = 1.0,
        py::arg("tol") = 1e-3, py::arg("max_iter") = 20000, py::arg("threads") = 1);
}

// Python bindings for the storage bid model, the billing oracles and a
// one-call clearing entry point.  Heavy lifting stays in the C++ core; the
// module exists for notebook-grade exploration of config files and curves.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regmkt/config.hpp"
#include "regmkt/cost.hpp"
#include "regmkt/harness.hpp"
#include "regmkt/market.hpp"
#include "regmkt/worstcase.hpp"

namespace py = pybind11;
using namespace regmkt;

namespace {

py::dict result_dict(const ClearingProblem& p, const ClearingResult& r,
                     const SettlementReport& rep) {
  py::dict out;
  out["status"] = std::string(lp::to_string(r.status));
  out["objective"] = r.objective;
  out["from_mip"] = r.from_mip;
  out["price_up"] = r.price_up;
  out["price_down"] = r.price_down;
  py::dict sched;
  for (std::size_t g = 0; g < p.generators.size(); ++g) {
    py::dict unit;
    unit["energy"] = r.gen_energy[g];
    unit["reg_up"] = r.gen_reg_up[g];
    unit["reg_down"] = r.gen_reg_down[g];
    sched[py::str(p.generators[g].name)] = unit;
  }
  for (std::size_t i = 0; i < p.storages.size(); ++i) {
    py::dict unit;
    unit["reg_up"] = r.storage_reg_up[i];
    unit["reg_down"] = r.storage_reg_down[i];
    unit["soc"] = r.storage_soc[i];
    unit["bid_cost"] = r.storage_bid_cost[i];
    unit["payment"] = rep.storages[i].payment;
    unit["true_profit"] = rep.storages[i].true_profit;
    sched[py::str(p.storages[i].name)] = unit;
  }
  out["units"] = sched;
  out["system_cost"] = rep.system_cost;
  out["true_system_cost"] = rep.true_system_cost;
  return out;
}

py::dict clear_file(const std::string& config_path, const std::string& variant,
                    const std::string& method, double shift, long long seed) {
  const SystemConfig cfg = load_config(config_path);
  const auto problems = validate_config(cfg);
  if (!problems.empty()) throw std::invalid_argument("invalid configuration: " + problems.front());

  std::vector<double> wind(static_cast<std::size_t>(cfg.horizon));
  for (int t = 0; t < cfg.horizon; ++t)
    wind[static_cast<std::size_t>(t)] =
        cfg.wind.power_at(cfg.wind.mean_speed[static_cast<std::size_t>(t)]);
  if (seed >= 0)
    wind = gen_scenarios(cfg.wind, 1, static_cast<std::uint64_t>(seed), cfg.horizon)[0].wind_energy;

  ClearingProblem p = build_problem(cfg, wind, parse_variant(variant), shift);
  p.validate();

  bool all_edcr = true;
  for (const auto& s : p.storages) all_edcr = all_edcr && s.bid.check_edcr();
  const SolveMethod m = parse_method(method);
  ClearingResult res;
  if (m == SolveMethod::Mip || (m == SolveMethod::Auto && !all_edcr)) {
    MipSettings ms;
    ms.big_m = cfg.solver.big_m;
    res = clear_mip(p, ms);
  } else {
    res = clear_convex(p);
  }
  const bool ok = res.status == lp::SolveStatus::Optimal ||
                  (res.status == lp::SolveStatus::NodeLimit && !res.storage_reg_up.empty());
  if (!ok) {
    py::dict out;
    out["status"] = std::string(lp::to_string(res.status));
    return out;
  }
  return result_dict(p, res, settle(p, res, true_bids_of(cfg)));
}

} // namespace

PYBIND11_MODULE(_regmkt, m) {
  m.doc() = "regulation market clearing with state-of-charge dependent storage bids";

  py::class_<StorageBid>(m, "StorageBid")
      .def(py::init([](std::vector<double> breakpoints, std::vector<double> up_costs,
                       std::vector<double> down_costs, double efficiency) {
             StorageBid b;
             b.breakpoints = std::move(breakpoints);
             b.up_costs = std::move(up_costs);
             b.down_costs = std::move(down_costs);
             b.efficiency = efficiency;
             b.validate();
             return b;
           }),
           py::arg("breakpoints"), py::arg("up_costs"), py::arg("down_costs"),
           py::arg("efficiency") = 1.0)
      .def_readonly("breakpoints", &StorageBid::breakpoints)
      .def_readonly("up_costs", &StorageBid::up_costs)
      .def_readonly("down_costs", &StorageBid::down_costs)
      .def_readonly("efficiency", &StorageBid::efficiency)
      .def("pieces", &StorageBid::pieces)
      .def("floor", &StorageBid::floor)
      .def("ceiling", &StorageBid::ceiling)
      .def("capacity", &StorageBid::capacity)
      .def("segment_of", &StorageBid::segment_of, py::arg("soc"))
      .def("check_edcr", &StorageBid::check_edcr, py::arg("tol") = 1e-9)
      .def("project_to_edcr", &StorageBid::project_to_edcr)
      .def("__repr__", [](const StorageBid& b) {
        return "StorageBid(" + std::to_string(b.pieces()) + " pieces, range [" +
               std::to_string(b.floor()) + ", " + std::to_string(b.ceiling()) + "])";
      });

  m.def("reg_up_cost", &reg_up_cost, py::arg("bid"), py::arg("soc"), py::arg("mileage"),
        py::arg("dt"), "billed cost of delivering regulation-up energy from a state of charge");
  m.def("reg_down_cost", &reg_down_cost, py::arg("bid"), py::arg("soc"), py::arg("mileage"),
        py::arg("dt"), "billed cost of absorbing regulation-down energy from a state of charge");
  m.def("edcr_cost", &edcr_cost, py::arg("bid"), py::arg("soc"), py::arg("reg_up"),
        py::arg("reg_down"),
        "worst-case billed cost over a horizon of cleared capacities (equal-ratio bids only)");
  m.def("two_route_cost", &two_route_cost, py::arg("bid"), py::arg("soc"), py::arg("r_up"),
        py::arg("r_down"), "cheaper of the two full-swing deployment orderings");
  m.def("analytical_worst_cost", &analytical_worst_cost, py::arg("bid"), py::arg("soc"),
        py::arg("r_up"), py::arg("r_down"),
        "closed-form single-interval worst case for equal-ratio bids");
  m.def(
      "brute_force_worst_cost",
      [](const StorageBid& bid, double soc, double r_up, double r_down, int steps, int grid) {
        const WorstCaseResult r = brute_force_worst_cost(bid, soc, r_up, r_down, steps, grid);
        return py::make_tuple(r.cost, r.used_up, r.used_down);
      },
      py::arg("bid"), py::arg("soc"), py::arg("r_up"), py::arg("r_down"), py::arg("steps") = 4,
      py::arg("grid") = 5, "enumerated worst case: (cost, used_up, used_down)");

  m.def("clear_file", &clear_file, py::arg("config_path"), py::arg("variant") = "edcr",
        py::arg("method") = "auto", py::arg("shift") = 0.0, py::arg("seed") = -1,
        "load a configuration, clear one instance and return schedules, prices and settlement");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regmkt/cost.hpp"
#include "regmkt/harness.hpp"

using namespace regmkt;

namespace {

StorageBid edcr_bid() {
  StorageBid b;
  b.breakpoints = {0.0, 5.0, 10.0};
  b.up_costs = {10.0, 8.0};
  b.down_costs = {4.0, 6.0};
  return b;
}

StorageBid flat_bid() {
  StorageBid b;
  b.breakpoints = {0.0, 10.0};
  b.up_costs = {9.0};
  b.down_costs = {3.0};
  return b;
}

SystemConfig micro_config() {
  SystemConfig cfg;
  cfg.horizon = 4;
  cfg.network.buses = 1;
  cfg.network.demand = {{12.0, 12.0, 12.0, 12.0}};

  GeneratorSpec g;
  g.name = "g1";
  g.g_max = 30.0;
  g.energy_cost = {{6.0, 30.0}};
  g.reg_up_cap = 6.0;
  g.reg_down_cap = 6.0;
  g.reg_up_cost = 15.0;
  g.reg_down_cost = 15.0;
  cfg.generators = {g};

  cfg.wind_bus = 0;
  cfg.wind.capacity = 5.0;
  cfg.wind.sigma = 2.0;
  cfg.wind.mean_speed = {10.0, 10.0, 10.0, 10.0};

  StorageAsset a;
  a.name = "bat";
  a.initial_soc = 5.0;
  a.reg_up_cap = 3.0;
  a.reg_down_cap = 3.0;
  a.true_bid = edcr_bid();
  a.true_bid.down_costs = {4.0, 7.0}; // deliberately non-EDCR
  a.edcr_bid = edcr_bid();
  a.flat_bid = flat_bid();
  cfg.storages = {a};

  cfg.req_up_base = {2.0, 2.0, 2.0, 2.0};
  cfg.req_down_base = {2.0, 2.0, 2.0, 2.0};

  cfg.study.scenarios = 2;
  cfg.study.seed = 7;
  cfg.study.shifts = {0.0};
  cfg.study.modes = {DispatchMode::OneShot};
  cfg.study.variants = {BidVariant::Edcr, BidVariant::Flat};
  cfg.study.window = 2;
  return cfg;
}

} // namespace

TEST_CASE("power curve: cut-in, cubic ramp, rated plateau, cut-out") {
  WindModel w;
  w.capacity = 20.0;
  CHECK(w.power_at(0.0) == 0.0);
  CHECK(w.power_at(2.9) == 0.0);
  CHECK(w.power_at(3.0) == doctest::Approx(0.0));
  CHECK(w.power_at(7.5) == doctest::Approx(20.0 * (7.5 * 7.5 * 7.5 - 27.0) / (1728.0 - 27.0)));
  CHECK(w.power_at(12.0) == doctest::Approx(20.0));
  CHECK(w.power_at(20.0) == doctest::Approx(20.0));
  CHECK(w.power_at(25.0) == doctest::Approx(20.0));
  CHECK(w.power_at(25.1) == 0.0);
}

TEST_CASE("scenario generation is seeded and truncated") {
  WindModel w;
  w.capacity = 20.0;
  w.sigma = 5.0;
  w.mean_speed = {8.0, 9.0, 10.0};

  const auto a = gen_scenarios(w, 3, 42, 3);
  const auto b = gen_scenarios(w, 3, 42, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].seed == 42 + i);
    CHECK(a[i].wind_speed == b[i].wind_speed); // identical streams
    for (double v : a[i].wind_speed) CHECK(v >= 0.0);
    for (double e : a[i].wind_energy) {
      CHECK(e >= 0.0);
      CHECK(e <= 20.0);
    }
  }
  CHECK(a[0].wind_speed != a[1].wind_speed);

  // A prefix of a larger batch reproduces the smaller batch.
  const auto big = gen_scenarios(w, 10, 42, 3);
  CHECK(big[2].wind_speed == a[2].wind_speed);

  // Zero sigma collapses onto the mean profile.
  w.sigma = 0.0;
  const auto det = gen_scenarios(w, 1, 1, 3);
  CHECK(det[0].wind_speed == w.mean_speed);

  // Deeply negative means truncate to calm.
  w.sigma = 5.0;
  w.mean_speed = {-50.0, -50.0, -50.0};
  const auto calm = gen_scenarios(w, 1, 5, 3);
  for (double v : calm[0].wind_speed) CHECK(v == 0.0);
}

TEST_CASE("slice_problem restricts every per-interval series") {
  const SystemConfig cfg = micro_config();
  std::vector<double> wind = {1.0, 2.0, 3.0, 4.0};
  const ClearingProblem full = build_problem(cfg, wind, BidVariant::Edcr, 1.0);

  const ClearingProblem w = slice_problem(full, 1, 2, {6.5});
  CHECK(w.horizon == 2);
  CHECK(w.network.demand[0] == std::vector<double>{12.0, 12.0});
  CHECK(w.req_up == std::vector<double>{3.0, 3.0});
  CHECK(w.storages[0].initial_soc == 6.5);
  // The wind unit's per-interval cap follows the slice.
  CHECK(w.generators.back().g_max_t == std::vector<double>{2.0, 3.0});

  CHECK_THROWS_AS(slice_problem(full, 3, 2, {5.0}), std::invalid_argument);
  CHECK_THROWS_AS(slice_problem(full, 0, 2, {}), std::invalid_argument);
}

TEST_CASE("build_problem appends wind, clamps its cap and shifts requirements") {
  const SystemConfig cfg = micro_config();
  std::vector<double> wind = {-1.0, 2.0, 99.0, 0.0};
  const ClearingProblem p = build_problem(cfg, wind, BidVariant::Flat, 2.5);
  REQUIRE(p.generators.size() == 2);
  const GeneratorSpec& w = p.generators.back();
  CHECK(w.name == "wind");
  CHECK(w.g_max_t == std::vector<double>{0.0, 2.0, 5.0, 0.0});
  CHECK(w.energy_cost[0].slope == 0.0);
  CHECK(p.req_up == std::vector<double>{4.5, 4.5, 4.5, 4.5});
  CHECK(p.storages[0].bid.pieces() == 1); // flat variant selected
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("one-shot run settles and reports direction splits") {
  const SystemConfig cfg = micro_config();
  const auto scs = gen_scenarios(cfg.wind, 1, cfg.study.seed, cfg.horizon);
  const RunRecord rec = run_one_shot(cfg, scs[0], BidVariant::Edcr, 0.0);
  REQUIRE_MESSAGE(rec.feasible, rec.error);
  CHECK(rec.clearing.status == lp::SolveStatus::Optimal);
  CHECK(rec.settlement.system_cost == doctest::Approx(rec.clearing.objective));
  CHECK(rec.unidirectional_fraction >= 0.0);
  CHECK(rec.unidirectional_fraction <= 1.0);
}

TEST_CASE("rolling run: state chain and stitched objective identity") {
  const SystemConfig cfg = micro_config();
  const auto scs = gen_scenarios(cfg.wind, 1, 11, cfg.horizon);
  const RunRecord rec = run_rolling(cfg, scs[0], BidVariant::Edcr, 0.0, SolveMethod::Auto, 2);
  REQUIRE_MESSAGE(rec.feasible, rec.error);
  const ClearingResult& r = rec.clearing;

  const StorageBid& bid = cfg.storages[0].edcr_bid;
  for (int t = 0; t < 4; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    CHECK(r.storage_soc[0][ts + 1] ==
          doctest::Approx(r.storage_soc[0][ts] + r.storage_reg_down[0][ts] -
                          r.storage_reg_up[0][ts])
              .epsilon(1e-7));
  }

  // Stitched objective = committed generator costs + closed-form storage bill.
  double expect = 0.0;
  for (std::size_t g = 0; g < r.gen_energy.size(); ++g)
    for (int t = 0; t < 4; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      const auto& spec =
          g == 0 ? cfg.generators[0] : build_problem(cfg, scs[0].wind_energy, BidVariant::Edcr, 0.0)
                                           .generators
                                           .back();
      expect += spec.energy_cost[0].slope * r.gen_energy[g][ts] +
                spec.reg_up_cost * r.gen_reg_up[g][ts] + spec.reg_down_cost * r.gen_reg_down[g][ts];
    }
  expect += edcr_cost(bid, 5.0, r.storage_reg_up[0], r.storage_reg_down[0]);
  CHECK(r.objective == doctest::Approx(expect).epsilon(1e-7));

  CHECK(r.price_up.size() == 4);
  CHECK(rec.settlement.system_cost == doctest::Approx(r.objective));
}

TEST_CASE("aggregate means and pairwise deltas") {
  std::vector<RunRecord> records(4);
  for (int i = 0; i < 4; ++i) {
    RunRecord& r = records[static_cast<std::size_t>(i)];
    r.variant = i < 2 ? BidVariant::Edcr : BidVariant::Flat;
    r.mode = DispatchMode::OneShot;
    r.shift = 0.0;
    r.scenario = i % 2;
    r.feasible = true;
    r.settlement.system_cost = i < 2 ? 90.0 + i : 100.0 + i; // edcr: 90, 91; flat: 102, 103
    r.settlement.true_system_cost = r.settlement.system_cost - 1.0;
    StorageSettlement s;
    s.payment = 10.0;
    s.true_profit = i < 2 ? 6.0 : 4.0;
    s.bid_profit = 1.0;
    r.settlement.storages = {s};
    r.unidirectional_fraction = 1.0;
  }
  const auto cells = aggregate(records);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].variant == BidVariant::Edcr);
  CHECK(cells[0].mean_system_cost == doctest::Approx(90.5));
  CHECK(cells[1].mean_system_cost == doctest::Approx(102.5));
  CHECK(cells[0].mean_true_profit == doctest::Approx(6.0));
  CHECK(cells[1].mean_true_profit == doctest::Approx(4.0));

  const auto deltas = compare_variants(cells);
  REQUIRE(deltas.size() == 1);
  CHECK(deltas[0].profit_gain_pct == doctest::Approx(50.0));
  CHECK(deltas[0].system_cost_delta_pct == doctest::Approx(100.0 * (90.5 - 102.5) / 102.5));
}

TEST_CASE("study runs deterministically regardless of thread count") {
  const SystemConfig cfg = micro_config();

  setenv("REGMKT_THREADS", "1", 1);
  const StudyResult a = run_study(cfg);
  setenv("REGMKT_THREADS", "3", 1);
  const StudyResult b = run_study(cfg);
  unsetenv("REGMKT_THREADS");

  REQUIRE(a.records.size() == 4); // 2 variants x 1 mode x 1 shift x 2 scenarios
  REQUIRE(b.records.size() == 4);

  std::ostringstream ma, mb;
  write_metrics_csv(a, ma);
  write_metrics_csv(b, mb);
  CHECK(ma.str() == mb.str());

  std::ostringstream sa, sb;
  write_scenario_csv(cfg, a, sa);
  write_scenario_csv(cfg, b, sb);
  CHECK(sa.str() == sb.str());

  // Long-format header and the delta rows are present.
  CHECK(ma.str().rfind("metric,variant,shift,mode,value\n", 0) == 0);
  CHECK(ma.str().find("profit_gain_pct,edcr_vs_flat") != std::string::npos);
  CHECK(ma.str().find("system_cost_delta_pct,edcr_vs_flat") != std::string::npos);
}

TEST_CASE("config file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "regmkt_cfg_test.json";
  {
    std::ofstream os(path);
    os << R"({
      "horizon": 2,
      "network": {"buses": 1, "demand": [18.5]},
      "generators": [
        {"name": "g1", "bus": 0, "g_max": 30.0,
         "energy_cost": [{"slope": 6.0, "width": 30.0}],
         "reg_up_cap": 6.0, "reg_down_cap": 6.0,
         "reg_up_cost": 15.0, "reg_down_cost": 15.0}
      ],
      "wind": {"bus": 0, "capacity": 5.0, "sigma": 2.0, "mean_speed": [10.0, 11.0]},
      "storages": [
        {"name": "bat", "bus": 0, "initial_soc": 5.0,
         "reg_up_cap": 3.0, "reg_down_cap": 3.0,
         "bids": {
           "true": {"breakpoints": [0.0, 5.0, 10.0], "up_costs": [10.0, 8.0],
                    "down_costs": [4.0, 7.0], "efficiency": 1.0},
           "edcr": {"breakpoints": [0.0, 5.0, 10.0], "up_costs": [10.0, 8.0],
                    "down_costs": [4.0, 6.0], "efficiency": 1.0},
           "flat": {"breakpoints": [0.0, 10.0], "up_costs": [9.0],
                    "down_costs": [3.0], "efficiency": 1.0}
         }}
      ],
      "requirements": {"up": 2.0, "down": [2.0, 2.5]},
      "study": {"scenarios": 3, "seed": 9, "shifts": [0.0, 1.0],
                "modes": ["oneshot", "rolling"], "variants": ["edcr", "flat"],
                "window": 2},
      "solver": {"big_m": 0.0, "mip_gap": 1e-6, "node_limit": 50000}
    })";
  }
  const SystemConfig cfg = load_config(path.string());
  std::filesystem::remove(path);

  CHECK(cfg.horizon == 2);
  CHECK(cfg.network.demand[0] == std::vector<double>{18.5, 18.5}); // constant broadcast
  CHECK(cfg.generators.size() == 1);
  CHECK(cfg.wind.mean_speed == std::vector<double>{10.0, 11.0});
  CHECK(cfg.storages[0].true_bid.down_costs == std::vector<double>{4.0, 7.0});
  CHECK(cfg.req_down_base == std::vector<double>{2.0, 2.5});
  CHECK(cfg.study.scenarios == 3);
  CHECK(cfg.study.modes.size() == 2);
  CHECK(cfg.study.variants[0] == BidVariant::Edcr);
  CHECK(cfg.solver.node_limit == 50000);
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("config errors: I/O and parse problems throw ConfigIoError") {
  CHECK_THROWS_AS(load_config("/nonexistent/regmkt.json"), ConfigIoError);

  const auto path = std::filesystem::temp_directory_path() / "regmkt_bad_test.json";
  {
    std::ofstream os(path);
    os << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path.string()), ConfigIoError);
  {
    std::ofstream os(path);
    os << R"({"horizon": 2})"; // missing sections
  }
  CHECK_THROWS_AS(load_config(path.string()), ConfigIoError);
  std::filesystem::remove(path);
}

TEST_CASE("validate_config flags semantic problems") {
  SystemConfig cfg = micro_config();
  CHECK(validate_config(cfg).empty());

  cfg.storages[0].edcr_bid.down_costs = {4.0, 7.0}; // equal-ratio violated
  auto problems = validate_config(cfg);
  REQUIRE_FALSE(problems.empty());
  CHECK(problems[0].find("k=1") != std::string::npos);

  cfg = micro_config();
  cfg.storages[0].flat_bid = edcr_bid(); // flat slot must be one piece
  CHECK_FALSE(validate_config(cfg).empty());

  cfg = micro_config();
  cfg.storages[0].initial_soc = 42.0;
  CHECK_FALSE(validate_config(cfg).empty());
}

TEST_CASE("true-variant runs fall back to the exact model automatically") {
  SystemConfig cfg = micro_config();
  cfg.horizon = 2;
  cfg.network.demand = {{12.0, 12.0}};
  cfg.wind.mean_speed = {10.0, 10.0};
  cfg.req_up_base = {2.0, 2.0};
  cfg.req_down_base = {2.0, 2.0};
  const auto scs = gen_scenarios(cfg.wind, 1, 3, cfg.horizon);
  const RunRecord rec = run_one_shot(cfg, scs[0], BidVariant::True, 0.0);
  REQUIRE_MESSAGE(rec.feasible, rec.error);
  CHECK(rec.clearing.from_mip);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regmkt/cost.hpp"
#include "regmkt/market.hpp"

using namespace regmkt;

namespace {

GeneratorSpec gen(const std::string& name, double cap, double slope, double ru_cap, double rd_cap,
                  double ru_cost, double rd_cost) {
  GeneratorSpec g;
  g.name = name;
  g.g_max = cap;
  g.energy_cost = {{slope, cap}};
  g.reg_up_cap = ru_cap;
  g.reg_down_cap = rd_cap;
  g.reg_up_cost = ru_cost;
  g.reg_down_cost = rd_cost;
  return g;
}

ClearingProblem base_problem(int horizon) {
  ClearingProblem p;
  p.horizon = horizon;
  p.network.buses = 1;
  p.network.demand = {std::vector<double>(static_cast<std::size_t>(horizon), 10.0)};
  p.generators = {gen("g1", 50.0, 5.0, 10.0, 10.0, 20.0, 20.0)};
  p.req_up.assign(static_cast<std::size_t>(horizon), 2.0);
  p.req_down.assign(static_cast<std::size_t>(horizon), 2.0);
  return p;
}

StorageUnitSpec storage(const std::string& name, StorageBid bid, double soc, double cap_up,
                        double cap_dn) {
  StorageUnitSpec s;
  s.name = name;
  s.initial_soc = soc;
  s.reg_up_cap = cap_up;
  s.reg_down_cap = cap_dn;
  s.bid = std::move(bid);
  return s;
}

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

bool ok(const ClearingResult& r) {
  return r.status == lp::SolveStatus::Optimal ||
         (r.status == lp::SolveStatus::NodeLimit && !r.storage_reg_up.empty());
}

} // namespace

TEST_CASE("single-piece storage: exact and convex clearings coincide") {
  ClearingProblem p = base_problem(2);
  p.storages = {storage("bat", flat_bid(), 5.0, 3.0, 3.0)};

  const ClearingResult lp_res = clear_convex(p);
  const ClearingResult mip_res = clear_mip(p);
  REQUIRE(lp_res.status == lp::SolveStatus::Optimal);
  REQUIRE(ok(mip_res));
  CHECK(mip_res.from_mip);
  CHECK(mip_res.objective == doctest::Approx(lp_res.objective).epsilon(1e-8));
  CHECK(mip_res.objective == doctest::Approx(148.0).epsilon(1e-8));
}

TEST_CASE("EDCR two-piece storage: exact billing matches the epigraph LP") {
  ClearingProblem p = base_problem(2);
  p.storages = {storage("bat", edcr_bid(), 7.0, 3.0, 3.0)};

  const ClearingResult lp_res = clear_convex(p);
  const ClearingResult mip_res = clear_mip(p);
  REQUIRE(lp_res.status == lp::SolveStatus::Optimal);
  REQUIRE(ok(mip_res));
  CHECK(std::fabs(mip_res.objective - lp_res.objective) <=
        1e-5 * std::max(1.0, std::fabs(lp_res.objective)));
  CHECK(mip_res.objective == doctest::Approx(156.0).epsilon(1e-6));

  // The exact model's billed storage cost reproduces the closed form of the
  // schedule it cleared.
  CHECK(mip_res.storage_bid_cost[0] ==
        doctest::Approx(edcr_cost(p.storages[0].bid, 7.0, mip_res.storage_reg_up[0],
                                  mip_res.storage_reg_down[0]))
            .epsilon(1e-6));
}

TEST_CASE("EDCR with charging losses: exact matches convex") {
  StorageBid b;
  b.breakpoints = {1.0, 4.0, 9.0};
  b.up_costs = {12.0, 9.0};
  b.down_costs = {4.0, 6.4}; // jump 2.4 = 0.8 * 3
  b.efficiency = 0.8;
  REQUIRE(b.check_edcr());

  ClearingProblem p = base_problem(2);
  p.storages = {storage("bat", b, 5.0, 2.0, 2.0)};

  const ClearingResult lp_res = clear_convex(p);
  const ClearingResult mip_res = clear_mip(p);
  REQUIRE(lp_res.status == lp::SolveStatus::Optimal);
  REQUIRE(ok(mip_res));
  CHECK(std::fabs(mip_res.objective - lp_res.objective) <=
        1e-5 * std::max(1.0, std::fabs(lp_res.objective)));
}

TEST_CASE("discharge billing follows the state, not the cheapest piece") {
  // From a full store, delivering 6 MWh sweeps 5 MWh through the top piece
  // and 1 MWh through the bottom one: 5*8 + 1*10.  A formulation that let
  // the bill collapse onto the cheap top piece would report 48.
  ClearingProblem p = base_problem(1);
  p.generators[0].reg_up_cap = 0.0;
  p.generators[0].reg_down_cap = 0.0;
  p.req_up = {6.0};
  p.req_down = {0.0};
  p.storages = {storage("bat", edcr_bid(), 10.0, 6.0, 6.0)};

  const ClearingResult r = clear_mip(p);
  REQUIRE(ok(r));
  CHECK(r.storage_reg_up[0][0] == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(r.storage_bid_cost[0] == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("charge billing sweeps upward through dearer pieces") {
  ClearingProblem p = base_problem(1);
  p.generators[0].reg_up_cap = 0.0;
  p.generators[0].reg_down_cap = 0.0;
  p.req_up = {0.0};
  p.req_down = {7.0};
  p.storages = {storage("bat", edcr_bid(), 0.0, 7.0, 7.0)};

  const ClearingResult r = clear_mip(p);
  REQUIRE(ok(r));
  // 5 MWh at 4 then 2 MWh at 6.
  CHECK(r.storage_bid_cost[0] == doctest::Approx(32.0).epsilon(1e-6));
}

TEST_CASE("non-EDCR storage is billed at the cheaper deployment order") {
  StorageBid b = edcr_bid();
  b.down_costs = {4.0, 7.0};
  REQUIRE_FALSE(b.check_edcr());

  ClearingProblem p = base_problem(1);
  p.generators[0].reg_up_cap = 0.0;
  p.generators[0].reg_down_cap = 0.0;
  p.storages = {storage("bat", b, 5.0, 2.0, 2.0)};

  const ClearingResult r = clear_mip(p);
  REQUIRE(ok(r));
  CHECK(r.storage_reg_up[0][0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.storage_reg_down[0][0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.storage_bid_cost[0] == doctest::Approx(two_route_cost(b, 5.0, 2.0, 2.0)).epsilon(1e-6));
  CHECK(r.storage_bid_cost[0] == doctest::Approx(28.0).epsilon(1e-6));

  // Settlement bills the same convention, so bid cost round-trips.
  const SettlementReport rep = settle(p, r, {b});
  CHECK(rep.storages[0].bid_cost == doctest::Approx(r.storage_bid_cost[0]).epsilon(1e-6));
}

TEST_CASE("excursion limits bind on cleared totals per interval") {
  // A full store cannot absorb regulation-down at all: the capacity must be
  // deliverable as a pure down sweep.
  ClearingProblem p = base_problem(1);
  p.storages = {storage("bat", edcr_bid(), 10.0, 3.0, 3.0)};
  const ClearingResult r = clear_mip(p);
  REQUIRE(ok(r));
  CHECK(r.storage_reg_down[0][0] <= 1e-8);
  CHECK(r.gen_reg_down[0][0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("zero requirement leaves the storage idle") {
  ClearingProblem p = base_problem(2);
  p.req_up = {0.0, 0.0};
  p.req_down = {0.0, 0.0};
  p.storages = {storage("bat", edcr_bid(), 7.0, 3.0, 3.0)};
  const ClearingResult r = clear_mip(p);
  REQUIRE(ok(r));
  CHECK(r.objective == doctest::Approx(100.0).epsilon(1e-8));
  CHECK(r.storage_bid_cost[0] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("manual big-M reproduces the automatic choice") {
  ClearingProblem p = base_problem(2);
  p.storages = {storage("bat", edcr_bid(), 7.0, 3.0, 3.0)};
  MipSettings manual;
  manual.big_m = 500.0;
  const ClearingResult a = clear_mip(p);
  const ClearingResult b = clear_mip(p, manual);
  REQUIRE(ok(a));
  REQUIRE(ok(b));
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-8));
}

TEST_CASE("two storages with different curves clear together") {
  ClearingProblem p = base_problem(2);
  p.req_up = {4.0, 4.0};
  p.req_down = {4.0, 4.0};
  p.storages = {storage("bat1", edcr_bid(), 7.0, 3.0, 3.0),
                storage("bat2", flat_bid(), 5.0, 3.0, 3.0)};

  const ClearingResult lp_res = clear_convex(p);
  const ClearingResult mip_res = clear_mip(p);
  REQUIRE(lp_res.status == lp::SolveStatus::Optimal);
  REQUIRE(ok(mip_res));
  CHECK(std::fabs(mip_res.objective - lp_res.objective) <=
        1e-5 * std::max(1.0, std::fabs(lp_res.objective)));
}

TEST_CASE("prices come from the incumbent restriction") {
  ClearingProblem p = base_problem(2);
  p.storages = {storage("bat", edcr_bid(), 7.0, 3.0, 3.0)};
  const ClearingResult r = clear_mip(p);
  REQUIRE(ok(r));
  REQUIRE(r.price_up.size() == 2);
  for (double v : r.price_up) CHECK(v >= 0.0);
  for (double v : r.price_down) CHECK(v >= 0.0);
}

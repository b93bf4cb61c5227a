#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <stdexcept>

#include "regmkt/worstcase.hpp"
#include "support.hpp"

using namespace regmkt;

namespace {

StorageBid non_edcr_bid() {
  StorageBid b;
  b.breakpoints = {0.0, 5.0, 10.0};
  b.up_costs = {10.0, 8.0};
  b.down_costs = {4.0, 7.0}; // down jump 3 exceeds the matched 2
  b.efficiency = 1.0;
  return b;
}

} // namespace

TEST_CASE("trivial budgets") {
  const StorageBid b = non_edcr_bid();
  const WorstCaseResult r = brute_force_worst_cost(b, 5.0, 0.0, 0.0);
  CHECK(r.cost == 0.0);
  CHECK(r.used_up == 0.0);
  CHECK(r.used_down == 0.0);
}

TEST_CASE("single-piece bids: worst case is just the budget at the flat rates") {
  StorageBid b;
  b.breakpoints = {0.0, 10.0};
  b.up_costs = {9.0};
  b.down_costs = {3.0};
  const WorstCaseResult r = brute_force_worst_cost(b, 5.0, 2.0, 1.5);
  CHECK(r.cost == doctest::Approx(9.0 * 2.0 + 3.0 * 1.5).epsilon(1e-12));
  CHECK(analytical_worst_cost(b, 5.0, 2.0, 1.5) == doctest::Approx(r.cost).epsilon(1e-12));
}

TEST_CASE("enumeration equals the closed form on random EDCR bids") {
  std::mt19937_64 rng(60901);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int it = 0; it < 120; ++it) {
    const int K = 1 + static_cast<int>(rng() % 4);
    const double eta = 0.7 + 0.3 * uni(rng);
    const StorageBid b = testing::random_edcr_bid(rng, K, eta);
    const double s = b.floor() + uni(rng) * b.capacity();
    const double r_up = uni(rng) * (s - b.floor());
    const double r_down = uni(rng) * (b.ceiling() - s) / eta;

    const WorstCaseResult wc = brute_force_worst_cost(b, s, r_up, r_down);
    const double closed = analytical_worst_cost(b, s, r_up, r_down);
    CHECK(wc.cost == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("the worst case exhausts both budgets") {
  std::mt19937_64 rng(41255);
  std::uniform_real_distribution<double> uni(0.1, 0.9);
  for (int it = 0; it < 50; ++it) {
    const StorageBid b = testing::random_edcr_bid(rng, 1 + static_cast<int>(rng() % 4),
                                                  0.7 + 0.3 * uni(rng));
    const double s = b.floor() + uni(rng) * b.capacity();
    const double r_up = uni(rng) * (s - b.floor());
    const double r_down = uni(rng) * (b.ceiling() - s) / b.efficiency;
    const WorstCaseResult wc = brute_force_worst_cost(b, s, r_up, r_down);
    CHECK(wc.used_up == doctest::Approx(r_up).epsilon(1e-9));
    CHECK(wc.used_down == doctest::Approx(r_down).epsilon(1e-9));
  }
}

TEST_CASE("analytical_worst_cost rejects non-EDCR curves") {
  CHECK_THROWS_AS(analytical_worst_cost(non_edcr_bid(), 5.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("non-EDCR: the enumerated worst case beats the two-route heuristic") {
  const StorageBid b = non_edcr_bid();
  const double heuristic = two_route_cost(b, 5.0, 2.0, 2.0);
  CHECK(heuristic == doctest::Approx(28.0).epsilon(1e-12));

  const WorstCaseResult wc = brute_force_worst_cost(b, 5.0, 2.0, 2.0);
  // Charge-first already bills 30; zigzags may bill more.
  CHECK(wc.cost >= 30.0 - 1e-9);
  CHECK(wc.cost - heuristic >= 1e-6);
}

TEST_CASE("non-EDCR: same totals, different bills (path dependence)") {
  const StorageBid b = non_edcr_bid();
  MileagePath down_first;
  down_first.down = {2.0, 0.0};
  down_first.up = {0.0, 2.0};
  MileagePath up_first;
  up_first.up = {2.0, 0.0};
  up_first.down = {0.0, 2.0};
  const double a = trajectory_cost(b, 5.0, down_first, 1.0);
  const double c = trajectory_cost(b, 5.0, up_first, 1.0);
  CHECK(a == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(c == doctest::Approx(28.0).epsilon(1e-12));
  CHECK(a - c >= 1e-6);
}

TEST_CASE("argmax path is feasible and reproduces the reported cost") {
  std::mt19937_64 rng(88412);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int it = 0; it < 40; ++it) {
    const StorageBid b = testing::random_bid(rng, 1 + static_cast<int>(rng() % 4),
                                             0.7 + 0.3 * uni(rng));
    const double s = b.floor() + uni(rng) * b.capacity();
    const double r_up = uni(rng) * (s - b.floor());
    const double r_down = uni(rng) * (b.ceiling() - s) / b.efficiency;
    const WorstCaseResult wc = brute_force_worst_cost(b, s, r_up, r_down);
    CHECK(trajectory_cost(b, s, wc.path, 1.0) == doctest::Approx(wc.cost).epsilon(1e-9));
    double tot_up = 0.0, tot_down = 0.0;
    for (double v : wc.path.up) tot_up += v;
    for (double v : wc.path.down) tot_down += v;
    CHECK(tot_up <= r_up + 1e-9);
    CHECK(tot_down <= r_down + 1e-9);
  }
}

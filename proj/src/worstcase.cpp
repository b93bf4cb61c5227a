#include "regmkt/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regmkt {

namespace {

struct Enumerator {
  const StorageBid& bid;
  int steps;
  int grid;
  WorstCaseResult best;
  MileagePath current;

  Enumerator(const StorageBid& b, int steps_, int grid_) : bid(b), steps(steps_), grid(grid_) {
    best.cost = -1.0; // any feasible path costs >= 0
    current.up.assign(static_cast<std::size_t>(steps), 0.0);
    current.down.assign(static_cast<std::size_t>(steps), 0.0);
  }

  double up_room(double e) const { return e - bid.floor(); }
  double down_room(double e) const { return (bid.ceiling() - e) / bid.efficiency; }

  void offer(double cost, double used_up, double used_down) {
    if (cost > best.cost) {
      best.cost = cost;
      best.path = current;
      best.used_up = used_up;
      best.used_down = used_down;
    }
  }

  void walk(int j, double e, double rem_up, double rem_down, double cost, double used_up,
            double used_down) {
    if (j == steps) {
      offer(cost, used_up, used_down);
      return;
    }
    const std::size_t sj = static_cast<std::size_t>(j);
    current.up[sj] = 0.0;
    current.down[sj] = 0.0;
    walk(j + 1, e, rem_up, rem_down, cost, used_up, used_down);
    for (int g = 1; g < grid; ++g) {
      const double frac = static_cast<double>(g) / (grid - 1);
      const double mu = std::min(frac * rem_up, up_room(e));
      if (mu > 1e-12) {
        current.up[sj] = mu;
        current.down[sj] = 0.0;
        walk(j + 1, e - mu, rem_up - mu, rem_down, cost + reg_up_cost(bid, e, mu, 1.0),
             used_up + mu, used_down);
        current.up[sj] = 0.0;
      }
      const double md = std::min(frac * rem_down, down_room(e));
      if (md > 1e-12) {
        current.down[sj] = md;
        walk(j + 1, e + bid.efficiency * md, rem_up, rem_down - md,
             cost + reg_down_cost(bid, e, md, 1.0), used_up, used_down + md);
        current.down[sj] = 0.0;
      }
    }
  }

  void corner(double e0, bool up_first, double r_up, double r_down) {
    if (steps < 2) return;
    std::fill(current.up.begin(), current.up.end(), 0.0);
    std::fill(current.down.begin(), current.down.end(), 0.0);
    double e = e0, cost = 0.0, used_up = 0.0, used_down = 0.0;
    for (int leg = 0; leg < 2; ++leg) {
      const std::size_t sj = static_cast<std::size_t>(leg);
      if (up_first == (leg == 0)) {
        const double mu = std::min(r_up, up_room(e));
        if (mu > 1e-12) {
          current.up[sj] = mu;
          cost += reg_up_cost(bid, e, mu, 1.0);
          e -= mu;
          used_up += mu;
        }
      } else {
        const double md = std::min(r_down, down_room(e));
        if (md > 1e-12) {
          current.down[sj] = md;
          cost += reg_down_cost(bid, e, md, 1.0);
          e += bid.efficiency * md;
          used_down += md;
        }
      }
    }
    offer(cost, used_up, used_down);
  }
};

} // namespace

double analytical_worst_cost(const StorageBid& bid, double soc, double r_up, double r_down) {
  return edcr_cost(bid, soc, {r_up}, {r_down});
}

WorstCaseResult brute_force_worst_cost(const StorageBid& bid, double soc, double r_up,
                                       double r_down, int steps, int grid) {
  if (steps < 0 || grid < 2) throw std::invalid_argument("brute_force_worst_cost: bad steps/grid");
  if (!(r_up >= 0.0) || !(r_down >= 0.0))
    throw std::invalid_argument("brute_force_worst_cost: budgets must be non-negative");
  Enumerator en(bid, steps, grid);
  en.corner(soc, true, r_up, r_down);
  en.corner(soc, false, r_up, r_down);
  en.walk(0, soc, r_up, r_down, 0.0, 0.0, 0.0);
  if (en.best.cost < 0.0) en.best.cost = 0.0;
  return en.best;
}

} // namespace regmkt

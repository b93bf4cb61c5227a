#include "regmkt/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace regmkt {

namespace {

// Clamp a target state of charge that drifted marginally outside the bid
// range; anything beyond the slop is a genuine excursion violation.
double clamp_soc(const StorageBid& bid, double soc, const char* what) {
  const double slop = 1e-7 * std::max(1.0, bid.capacity());
  if (soc < bid.floor() - slop || soc > bid.ceiling() + slop)
    throw std::domain_error(std::string(what) + ": state of charge " + std::to_string(soc) +
                            " leaves the bid range");
  return std::min(std::max(soc, bid.floor()), bid.ceiling());
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be finite and non-negative");
}

} // namespace

double reg_down_cost(const StorageBid& bid, double soc, double mileage, double dt) {
  require_nonnegative(mileage, "reg_down_cost: mileage");
  require_nonnegative(dt, "reg_down_cost: dt");
  const double energy = mileage * dt;
  if (energy == 0.0) return 0.0;
  const double eta = bid.efficiency;
  const double start = clamp_soc(bid, soc, "reg_down_cost");
  const double end = clamp_soc(bid, start + eta * energy, "reg_down_cost");
  const std::size_t m = bid.segment_of(start);
  const std::size_t n = bid.segment_of(end);
  double cost = bid.down_costs[n] * energy;
  for (std::size_t k = m; k < n; ++k)
    cost += (bid.down_costs[k] - bid.down_costs[k + 1]) / eta * (bid.breakpoints[k + 1] - start);
  return cost;
}

double reg_up_cost(const StorageBid& bid, double soc, double mileage, double dt) {
  require_nonnegative(mileage, "reg_up_cost: mileage");
  require_nonnegative(dt, "reg_up_cost: dt");
  const double energy = mileage * dt;
  if (energy == 0.0) return 0.0;
  const double start = clamp_soc(bid, soc, "reg_up_cost");
  const double end = clamp_soc(bid, start - energy, "reg_up_cost");
  const std::size_t m = bid.segment_of(start);
  const std::size_t n = bid.segment_of(end);
  double cost = bid.up_costs[n] * energy;
  for (std::size_t k = n + 1; k <= m; ++k)
    cost += (bid.up_costs[k - 1] - bid.up_costs[k]) * (bid.breakpoints[k] - start);
  return cost;
}

std::vector<double> soc_path(const StorageBid& bid, double soc, const MileagePath& path,
                             double dt) {
  if (path.up.size() != path.down.size())
    throw std::invalid_argument("soc_path: up and down mileage lengths differ");
  std::vector<double> out;
  out.reserve(path.steps() + 1);
  double e = clamp_soc(bid, soc, "soc_path");
  out.push_back(e);
  for (std::size_t j = 0; j < path.steps(); ++j) {
    require_nonnegative(path.up[j], "soc_path: up mileage");
    require_nonnegative(path.down[j], "soc_path: down mileage");
    if (path.up[j] > 1e-9 && path.down[j] > 1e-9)
      throw std::invalid_argument("soc_path: step " + std::to_string(j) +
                                  " moves in both directions");
    e = clamp_soc(bid, e + (bid.efficiency * path.down[j] - path.up[j]) * dt, "soc_path");
    out.push_back(e);
  }
  return out;
}

double trajectory_cost(const StorageBid& bid, double soc, const MileagePath& path, double dt) {
  const std::vector<double> states = soc_path(bid, soc, path, dt);
  double cost = 0.0;
  for (std::size_t j = 0; j < path.steps(); ++j) {
    if (path.down[j] > 0.0) cost += reg_down_cost(bid, states[j], path.down[j], dt);
    if (path.up[j] > 0.0) cost += reg_up_cost(bid, states[j], path.up[j], dt);
  }
  return cost;
}

double closed_form_offset(const StorageBid& bid, double soc) {
  const double eta = bid.efficiency;
  const double e1 = bid.floor();
  const std::size_t i = bid.segment_of(soc);
  double h = bid.down_costs[i] * (e1 - soc) / eta;
  for (std::size_t k = 0; k < i; ++k)
    h -= (bid.down_costs[k] - bid.down_costs[k + 1]) * (bid.breakpoints[k + 1] - e1) / eta;
  return h;
}

double closed_form_intercept(const StorageBid& bid, double soc, std::size_t piece) {
  if (piece >= bid.pieces()) throw std::invalid_argument("closed_form_intercept: piece index");
  const double eta = bid.efficiency;
  const double e1 = bid.floor();
  double a = bid.down_costs[piece] * (soc - e1) / eta + closed_form_offset(bid, soc);
  for (std::size_t k = 0; k < piece; ++k)
    a += (bid.down_costs[k] - bid.down_costs[k + 1]) * (bid.breakpoints[k + 1] - e1) / eta;
  return a;
}

double edcr_cost(const StorageBid& bid, double soc, const std::vector<double>& reg_up,
                 const std::vector<double>& reg_down) {
  if (!bid.check_edcr())
    throw std::domain_error("edcr_cost: bid does not satisfy the equal-ratio condition");
  if (reg_up.size() != reg_down.size())
    throw std::invalid_argument("edcr_cost: horizon lengths differ");
  double total_up = 0.0, total_down = 0.0;
  for (std::size_t t = 0; t < reg_up.size(); ++t) {
    require_nonnegative(reg_up[t], "edcr_cost: reg_up");
    require_nonnegative(reg_down[t], "edcr_cost: reg_down");
    total_up += reg_up[t];
    total_down += reg_down[t];
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bid.pieces(); ++j) {
    const double v = closed_form_intercept(bid, soc, j) + bid.down_costs[j] * total_down +
                     bid.up_costs[j] * total_up;
    best = std::max(best, v);
  }
  return best;
}

double two_route_cost(const StorageBid& bid, double soc, double r_up, double r_down) {
  require_nonnegative(r_up, "two_route_cost: r_up");
  require_nonnegative(r_down, "two_route_cost: r_down");
  const double eta = bid.efficiency;
  const double inf = std::numeric_limits<double>::infinity();
  double down_first = inf, up_first = inf;
  try {
    const double mid = soc + eta * r_down;
    down_first = reg_down_cost(bid, soc, r_down, 1.0) + reg_up_cost(bid, mid, r_up, 1.0);
  } catch (const std::domain_error&) {
  }
  try {
    const double mid = soc - r_up;
    up_first = reg_up_cost(bid, soc, r_up, 1.0) + reg_down_cost(bid, mid, r_down, 1.0);
  } catch (const std::domain_error&) {
  }
  const double best = std::min(down_first, up_first);
  if (best == inf)
    throw std::domain_error("two_route_cost: neither deployment order stays inside the bid range");
  return best;
}

} // namespace regmkt

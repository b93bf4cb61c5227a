#pragma once

#include <cstddef>
#include <vector>

namespace regmkt {

/**
 * SoC-dependent stepwise bid of a storage unit offering regulation capacity.
 *
 * The operating range [breakpoints.front(), breakpoints.back()] is split into
 * pieces(); piece k covers SoC in [breakpoints[k], breakpoints[k+1]).  While
 * the state of charge sits in piece k the unit asks up_costs[k] per MWh of
 * regulation-up energy delivered and down_costs[k] per MWh of grid energy
 * absorbed.  up_costs is strictly decreasing (discharging near the floor is
 * dear), down_costs strictly increasing (charging near the ceiling is dear).
 *
 * efficiency is the charging efficiency: absorbing x MWh from the grid raises
 * the state of charge by efficiency * x.
 */
struct StorageBid {
  std::vector<double> breakpoints;
  std::vector<double> up_costs;
  std::vector<double> down_costs;
  double efficiency = 1.0;

  std::size_t pieces() const { return up_costs.size(); }
  double floor() const { return breakpoints.front(); }
  double ceiling() const { return breakpoints.back(); }
  double capacity() const { return breakpoints.back() - breakpoints.front(); }
  double width(std::size_t k) const { return breakpoints[k + 1] - breakpoints[k]; }

  // Throws std::invalid_argument describing the first violated rule.
  void validate() const;

  // 0-based piece index containing `soc`.  Pieces are closed on the left;
  // the top piece also owns the ceiling.  A small out-of-range slop
  // (1e-9 relative to the capacity) is clamped, anything worse throws
  // std::domain_error.
  std::size_t segment_of(double soc) const;

  // True when adjacent pieces satisfy the equal-decremental-cost-ratio
  // condition  down_costs[k-1] - down_costs[k] = efficiency * (up_costs[k] -
  // up_costs[k-1])  within `tol` (relative).  Single-piece bids pass
  // vacuously.
  bool check_edcr(double tol = 1e-9) const;

  // Nearest well-formed bid satisfying check_edcr: keeps breakpoints,
  // efficiency, up_costs and down_costs[0], rebuilds the remaining down
  // costs from the up-cost decrements.
  StorageBid project_to_edcr() const;
};

} // namespace regmkt

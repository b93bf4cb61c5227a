#pragma once

#include <cstddef>
#include <vector>

#include "regmkt/bid.hpp"

namespace regmkt {

/**
 * Intra-interval deployment path at signal resolution.  Entry j holds the
 * regulation-up and regulation-down mileage (MW) followed during step j; a
 * step moves in at most one direction, so up[j] * down[j] == 0.
 */
struct MileagePath {
  std::vector<double> up;
  std::vector<double> down;

  std::size_t steps() const { return up.size(); }
};

// Billed cost of absorbing `mileage` MW of regulation-down for `dt` hours
// starting from state of charge `soc`.  Energy is billed piece by piece as
// the state of charge sweeps upward; charging losses inflate the billed rate
// of piece k to down_costs[k] / efficiency per stored MWh.
double reg_down_cost(const StorageBid& bid, double soc, double mileage, double dt);

// Billed cost of delivering `mileage` MW of regulation-up for `dt` hours from
// `soc`, billed piece by piece as the state of charge sweeps downward.
double reg_up_cost(const StorageBid& bid, double soc, double mileage, double dt);

// States of charge visited by a path: soc_path(...)[j] is the state before
// step j, and the final entry is the end-of-interval state.
std::vector<double> soc_path(const StorageBid& bid, double soc, const MileagePath& path,
                             double dt);

// Billed cost of a whole deployment path: the step costs above, accumulated
// along the realized state of charge.  Rejects paths that move both
// directions in one step or leave the bid range.
double trajectory_cost(const StorageBid& bid, double soc, const MileagePath& path, double dt);

// Intercept of supporting plane j in the horizon worst-case cost (see
// edcr_cost).  Zero for the piece containing `soc`, non-positive elsewhere.
double closed_form_intercept(const StorageBid& bid, double soc, std::size_t piece);

// The soc-dependent constant shared by all intercepts.
double closed_form_offset(const StorageBid& bid, double soc);

// Worst-case billed cost over a horizon of cleared regulation capacities
// (reg_up[t], reg_down[t]), for bids satisfying check_edcr:
//
//   max over pieces j of  closed_form_intercept(j)
//                         + down_costs[j] * sum(reg_down) + up_costs[j] * sum(reg_up)
//
// Throws std::domain_error when the bid fails check_edcr.
double edcr_cost(const StorageBid& bid, double soc, const std::vector<double>& reg_up,
                 const std::vector<double>& reg_down);

// Single-interval billed cost when the full cleared capacities are deployed
// in one swing each: min(down first then up, up first then down), skipping
// orderings whose excursion leaves the bid range.  This is the cost a
// non-EDCR bid is billed under in the exact formulation.
double two_route_cost(const StorageBid& bid, double soc, double r_up, double r_down);

} // namespace regmkt

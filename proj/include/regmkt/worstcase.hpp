#pragma once

#include "regmkt/cost.hpp"

namespace regmkt {

struct WorstCaseResult {
  double cost = 0.0;
  MileagePath path;       // argmax deployment, energies per step (dt = 1)
  double used_up = 0.0;   // regulation-up energy the argmax actually deploys
  double used_down = 0.0;
};

/**
 * Enumerated worst-case billed cost of one interval: the dearest deployment
 * path of at most `steps` single-direction swings that respects the energy
 * budgets r_up / r_down and the bid range.  Each swing draws a fraction of
 * the remaining budget from a uniform grid of `grid` points on [0, 1]; the
 * exhaust-everything corners (all up then all down, and the reverse) are
 * always included.  Oracle-grade: exponential in `steps`, keep both small.
 */
WorstCaseResult brute_force_worst_cost(const StorageBid& bid, double soc, double r_up,
                                       double r_down, int steps = 4, int grid = 5);

// Closed-form worst-case cost of one interval for bids satisfying
// check_edcr; the enumerated oracle above must agree with this.
double analytical_worst_cost(const StorageBid& bid, double soc, double r_up, double r_down);

} // namespace regmkt

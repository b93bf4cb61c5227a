#include "regmkt/bid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace regmkt {

void StorageBid::validate() const {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("bid: need at least two breakpoints");
  const std::size_t K = breakpoints.size() - 1;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1]))
      throw std::invalid_argument("bid: breakpoints not strictly increasing at index " +
                                  std::to_string(k));
    if (!std::isfinite(breakpoints[k]) || !std::isfinite(breakpoints[k + 1]))
      throw std::invalid_argument("bid: non-finite breakpoint");
  }
  if (up_costs.size() != K)
    throw std::invalid_argument("bid: up_costs must have one entry per piece (" +
                                std::to_string(K) + ")");
  if (down_costs.size() != K)
    throw std::invalid_argument("bid: down_costs must have one entry per piece (" +
                                std::to_string(K) + ")");
  for (std::size_t k = 0; k < K; ++k) {
    if (!(up_costs[k] > 0.0) || !std::isfinite(up_costs[k]))
      throw std::invalid_argument("bid: up_costs[" + std::to_string(k) + "] must be positive");
    if (!(down_costs[k] > 0.0) || !std::isfinite(down_costs[k]))
      throw std::invalid_argument("bid: down_costs[" + std::to_string(k) + "] must be positive");
  }
  for (std::size_t k = 0; k + 1 < K; ++k) {
    if (!(up_costs[k] > up_costs[k + 1]))
      throw std::invalid_argument("bid: up_costs must be strictly decreasing at index " +
                                  std::to_string(k));
    if (!(down_costs[k] < down_costs[k + 1]))
      throw std::invalid_argument("bid: down_costs must be strictly increasing at index " +
                                  std::to_string(k));
  }
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw std::invalid_argument("bid: efficiency must lie in (0, 1]");
}

std::size_t StorageBid::segment_of(double soc) const {
  const double slop = 1e-9 * std::max(1.0, capacity());
  if (soc < floor() - slop || soc > ceiling() + slop)
    throw std::domain_error("segment_of: soc " + std::to_string(soc) +
                            " outside the bid range [" + std::to_string(floor()) + ", " +
                            std::to_string(ceiling()) + "]");
  if (soc >= ceiling()) return pieces() - 1;
  if (soc <= floor()) return 0;
  // Last piece whose left edge is <= soc.
  std::size_t k = 0;
  while (k + 1 < pieces() && breakpoints[k + 1] <= soc) ++k;
  return k;
}

bool StorageBid::check_edcr(double tol) const {
  const double eta = efficiency;
  for (std::size_t k = 1; k < pieces(); ++k) {
    const double dd = down_costs[k - 1] - down_costs[k];
    const double du = eta * (up_costs[k] - up_costs[k - 1]);
    const double scale = std::max({1.0, std::fabs(dd), std::fabs(du)});
    if (std::fabs(dd - du) > tol * scale) return false;
  }
  return true;
}

StorageBid StorageBid::project_to_edcr() const {
  StorageBid out = *this;
  for (std::size_t k = 1; k < pieces(); ++k)
    out.down_costs[k] = out.down_costs[k - 1] + efficiency * (up_costs[k - 1] - up_costs[k]);
  return out;
}

} // namespace regmkt

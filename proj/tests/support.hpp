#pragma once

// Shared test fixtures: independent oracles the implementation is checked
// against.  Everything here is written from first principles (definitions,
// not the library's derived formulas) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "regmkt/bid.hpp"
#include "regmkt/lp.hpp"

namespace testing {

// Integral of a step function over [lo, hi]: values[k] on
// [breakpoints[k], breakpoints[k+1]).
inline double step_integral(const std::vector<double>& breakpoints,
                            const std::vector<double>& values, double lo, double hi) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = std::max(lo, breakpoints[k]);
    const double b = std::min(hi, breakpoints[k + 1]);
    if (b > a) total += values[k] * (b - a);
  }
  return total;
}

// Definition-level billed cost of a one-direction sweep: regulation-down
// absorbing `mileage * dt` MWh of grid energy raises the state of charge by
// efficiency times that, billed at down_costs/efficiency per MWh of state
// traversed; regulation-up lowers the state one-for-one at up_costs.
inline double oracle_down_cost(const regmkt::StorageBid& bid, double soc, double mileage,
                               double dt) {
  const double rise = bid.efficiency * mileage * dt;
  return step_integral(bid.breakpoints, bid.down_costs, soc, soc + rise) / bid.efficiency;
}

inline double oracle_up_cost(const regmkt::StorageBid& bid, double soc, double mileage,
                             double dt) {
  const double drop = mileage * dt;
  return step_integral(bid.breakpoints, bid.up_costs, soc - drop, soc);
}

// Random EDCR bid: up costs strictly decreasing, down costs rebuilt from the
// equal-ratio identity, so check_edcr holds by construction.
inline regmkt::StorageBid random_edcr_bid(std::mt19937_64& rng, int pieces, double efficiency) {
  std::uniform_real_distribution<double> width(0.5, 4.0), start(0.0, 5.0), gap(0.5, 5.0),
      base(1.0, 5.0);
  regmkt::StorageBid b;
  b.efficiency = efficiency;
  b.breakpoints.push_back(start(rng));
  for (int k = 0; k < pieces; ++k) b.breakpoints.push_back(b.breakpoints.back() + width(rng));
  b.up_costs.resize(static_cast<std::size_t>(pieces));
  b.up_costs[static_cast<std::size_t>(pieces) - 1] = base(rng);
  for (int k = pieces - 2; k >= 0; --k)
    b.up_costs[static_cast<std::size_t>(k)] = b.up_costs[static_cast<std::size_t>(k) + 1] + gap(rng);
  b.down_costs.resize(static_cast<std::size_t>(pieces));
  b.down_costs[0] = base(rng);
  for (int k = 1; k < pieces; ++k)
    b.down_costs[static_cast<std::size_t>(k)] =
        b.down_costs[static_cast<std::size_t>(k) - 1] +
        efficiency * (b.up_costs[static_cast<std::size_t>(k) - 1] - b.up_costs[static_cast<std::size_t>(k)]);
  return b;
}

// Random well-formed bid with independent down costs; usually not EDCR.
inline regmkt::StorageBid random_bid(std::mt19937_64& rng, int pieces, double efficiency) {
  regmkt::StorageBid b = random_edcr_bid(rng, pieces, efficiency);
  std::uniform_real_distribution<double> gap(0.5, 5.0), base(1.0, 5.0);
  b.down_costs[0] = base(rng);
  for (int k = 1; k < pieces; ++k)
    b.down_costs[static_cast<std::size_t>(k)] = b.down_costs[static_cast<std::size_t>(k) - 1] + gap(rng);
  return b;
}

// Brute-force LP optimum by vertex enumeration: every vertex of a bounded
// polyhedron activates n independent constraints drawn from rows and variable
// bounds.  Only valid when every variable has finite bounds.
struct VertexOptimum {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

inline VertexOptimum enumerate_vertices(const regmkt::lp::LinearProgram& lp) {
  const int n = static_cast<int>(lp.num_variables());
  const int m = static_cast<int>(lp.num_constraints());

  struct Cand {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < m; ++i) {
    Cand c;
    c.a.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& [j, v] : lp.row(i)) c.a[static_cast<std::size_t>(j)] += v;
    c.rhs = lp.rhs(i);
    cands.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    for (double bound : {lp.lower(j), lp.upper(j)}) {
      Cand c;
      c.a.assign(static_cast<std::size_t>(n), 0.0);
      c.a[static_cast<std::size_t>(j)] = 1.0;
      c.rhs = bound;
      cands.push_back(std::move(c));
    }
  }

  VertexOptimum best;
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::vector<double> x(static_cast<std::size_t>(n));

  auto feasible_point = [&](const std::vector<double>& p) {
    constexpr double tol = 1e-7;
    for (int j = 0; j < n; ++j)
      if (p[static_cast<std::size_t>(j)] < lp.lower(j) - tol ||
          p[static_cast<std::size_t>(j)] > lp.upper(j) + tol)
        return false;
    for (int i = 0; i < m; ++i) {
      double lhs = 0.0;
      for (const auto& [j, v] : lp.row(i)) lhs += v * p[static_cast<std::size_t>(j)];
      const double r = lp.rhs(i);
      switch (lp.sense(i)) {
        case regmkt::lp::Sense::LessEqual:
          if (lhs > r + tol) return false;
          break;
        case regmkt::lp::Sense::GreaterEqual:
          if (lhs < r - tol) return false;
          break;
        case regmkt::lp::Sense::Equal:
          if (std::abs(lhs - r) > tol) return false;
          break;
      }
    }
    return true;
  };

  auto try_vertex = [&] {
    // Solve the n x n active system by Gaussian elimination.
    std::vector<std::vector<double>> A(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    for (int r = 0; r < n; ++r) {
      const Cand& c = cands[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      for (int j = 0; j < n; ++j) A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = c.a[static_cast<std::size_t>(j)];
      A[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)] = c.rhs;
    }
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      double mag = 1e-9;
      for (int r = col; r < n; ++r)
        if (std::abs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) > mag) {
          mag = std::abs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
          piv = r;
        }
      if (piv < 0) return; // singular active set
      std::swap(A[static_cast<std::size_t>(col)], A[static_cast<std::size_t>(piv)]);
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                         A[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        if (f == 0.0) continue;
        for (int j = col; j <= n; ++j)
          A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -=
              f * A[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
      }
    }
    for (int j = 0; j < n; ++j)
      x[static_cast<std::size_t>(j)] = A[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)] /
                                       A[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    if (!feasible_point(x)) return;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.cost(j) * x[static_cast<std::size_t>(j)];
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x = x;
    }
  };

  const int total = static_cast<int>(cands.size());
  std::vector<int> idx;
  // Odometer over all n-subsets of the candidate constraints.
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      try_vertex();
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Exhaustive reference for small MIPs: try every 0/1 assignment of the
// binaries, solve the remaining LP, keep the best.
inline VertexOptimum exhaustive_mip(const regmkt::lp::LinearProgram& lp,
                                    const std::vector<int>& binaries) {
  VertexOptimum best;
  regmkt::lp::LinearProgram work = lp;
  const std::size_t B = binaries.size();
  for (std::uint64_t mask = 0; mask < (1ull << B); ++mask) {
    for (std::size_t b = 0; b < B; ++b) {
      const double v = (mask >> b) & 1 ? 1.0 : 0.0;
      work.set_bounds(binaries[b], v, v);
    }
    const regmkt::lp::Solution sol = regmkt::lp::solve(work);
    if (sol.status != regmkt::lp::SolveStatus::Optimal) continue;
    if (!best.feasible || sol.objective < best.objective) {
      best.feasible = true;
      best.objective = sol.objective;
      best.x = sol.x;
    }
  }
  return best;
}

} // namespace testing

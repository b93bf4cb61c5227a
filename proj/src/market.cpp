#include "regmkt/market.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "regmkt/cost.hpp"
#include "system_builder.hpp"

namespace regmkt {

namespace {

void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_finite_nonneg(double v, const std::string& what) {
  if (!std::isfinite(v) || v < 0.0) fail(what + " must be finite and non-negative");
}

} // namespace

void GeneratorSpec::validate(int horizon) const {
  if (name.empty()) fail("generator: name must not be empty");
  if (bus < 0) fail("generator " + name + ": negative bus index");
  if (!std::isfinite(g_min) || g_min < 0.0) fail("generator " + name + ": bad g_min");
  if (!std::isfinite(g_max) || g_max < g_min) fail("generator " + name + ": bad g_max");
  if (!g_max_t.empty() && g_max_t.size() != static_cast<std::size_t>(horizon))
    fail("generator " + name + ": per-interval cap series must cover the horizon");
  for (double c : g_max_t)
    if (!std::isfinite(c) || c < g_min || c > g_max + 1e-9)
      fail("generator " + name + ": per-interval cap outside [g_min, g_max]");
  if (energy_cost.empty()) fail("generator " + name + ": energy_cost must not be empty");
  double cover = 0.0;
  for (std::size_t q = 0; q < energy_cost.size(); ++q) {
    if (!std::isfinite(energy_cost[q].slope)) fail("generator " + name + ": bad cost slope");
    if (!(energy_cost[q].width > 0.0)) fail("generator " + name + ": cost piece width must be > 0");
    if (q > 0 && energy_cost[q].slope < energy_cost[q - 1].slope - 1e-12)
      fail("generator " + name + ": cost slopes must be nondecreasing (convex offer)");
    cover += energy_cost[q].width;
  }
  if (cover + 1e-9 < g_max)
    fail("generator " + name + ": cost pieces cover less than g_max");
  check_finite_nonneg(reg_up_cap, "generator " + name + ": reg_up_cap");
  check_finite_nonneg(reg_down_cap, "generator " + name + ": reg_down_cap");
  check_finite_nonneg(reg_up_cost, "generator " + name + ": reg_up_cost");
  check_finite_nonneg(reg_down_cost, "generator " + name + ": reg_down_cost");
}

void StorageUnitSpec::validate() const {
  if (name.empty()) fail("storage: name must not be empty");
  if (bus < 0) fail("storage " + name + ": negative bus index");
  bid.validate();
  check_finite_nonneg(reg_up_cap, "storage " + name + ": reg_up_cap");
  check_finite_nonneg(reg_down_cap, "storage " + name + ": reg_down_cap");
  const double slop = 1e-9 * std::max(1.0, bid.capacity());
  if (initial_soc < bid.floor() - slop || initial_soc > bid.ceiling() + slop)
    fail("storage " + name + ": initial_soc outside the bid range");
}

void NetworkSpec::validate(int horizon) const {
  if (buses < 1) fail("network: need at least one bus");
  if (demand.size() != static_cast<std::size_t>(buses))
    fail("network: demand must have one series per bus");
  for (const auto& series : demand) {
    if (series.size() != static_cast<std::size_t>(horizon))
      fail("network: demand series must cover the horizon");
    for (double d : series)
      if (!std::isfinite(d) || d < 0.0) fail("network: demand entries must be non-negative");
  }
  if (shift_factors.size() != line_limits.size())
    fail("network: shift_factors and line_limits must pair up");
  for (const auto& row : shift_factors)
    if (row.size() != static_cast<std::size_t>(buses))
      fail("network: each shift-factor row needs one entry per bus");
  for (const auto& row : shift_factors)
    for (double s : row)
      if (!std::isfinite(s)) fail("network: non-finite shift factor");
  for (double q : line_limits)
    if (!std::isfinite(q) || q <= 0.0) fail("network: line limits must be positive");
}

void ClearingProblem::validate() const {
  if (horizon < 1) fail("problem: horizon must be at least 1");
  network.validate(horizon);
  std::set<std::string> names;
  for (const auto& g : generators) {
    g.validate(horizon);
    if (g.bus >= network.buses) fail("generator " + g.name + ": bus index out of range");
    if (!names.insert(g.name).second) fail("duplicate unit name " + g.name);
  }
  for (const auto& s : storages) {
    s.validate();
    if (s.bus >= network.buses) fail("storage " + s.name + ": bus index out of range");
    if (!names.insert(s.name).second) fail("duplicate unit name " + s.name);
  }
  if (req_up.size() != static_cast<std::size_t>(horizon) ||
      req_down.size() != static_cast<std::size_t>(horizon))
    fail("problem: requirement series must cover the horizon");
  for (double r : req_up) check_finite_nonneg(r, "problem: req_up");
  for (double r : req_down) check_finite_nonneg(r, "problem: req_down");
}

ConvexModel build_convex_model(const ClearingProblem& p) {
  using detail::tag;
  ConvexModel m;
  detail::SystemSkeleton sk = detail::add_system(m.lp, p);
  m.gen_total = std::move(sk.gen_total);
  m.gen_ru = std::move(sk.gen_ru);
  m.gen_rd = std::move(sk.gen_rd);
  m.gen_piece = std::move(sk.gen_piece);
  m.row_balance = std::move(sk.row_balance);
  m.row_req_up = std::move(sk.row_req_up);
  m.row_req_down = std::move(sk.row_req_down);

  const int T = p.horizon;
  const std::size_t ns = p.storages.size();
  m.sto_ru.assign(ns, std::vector<int>(static_cast<std::size_t>(T), -1));
  m.sto_rd = m.sto_ru;
  m.sto_e = m.sto_ru;
  m.psi.assign(ns, -1);

  for (std::size_t i = 0; i < ns; ++i) {
    const StorageUnitSpec& s = p.storages[i];
    const StorageBid& bid = s.bid;
    const double eta = bid.efficiency;
    for (int t = 0; t < T; ++t) {
      const std::size_t st = static_cast<std::size_t>(t);
      m.sto_ru[i][st] = m.lp.add_variable(tag("ru_" + s.name, t), 0.0, s.reg_up_cap, 0.0);
      m.sto_rd[i][st] = m.lp.add_variable(tag("rd_" + s.name, t), 0.0, s.reg_down_cap, 0.0);
      m.sto_e[i][st] =
          m.lp.add_variable(tag("soc_" + s.name, t), bid.floor(), bid.ceiling(), 0.0);
    }
    m.psi[i] = m.lp.add_variable("psi_" + s.name, -lp::kInf, lp::kInf, 1.0);

    for (int t = 0; t < T; ++t) {
      const std::size_t st = static_cast<std::size_t>(t);
      const bool first = t == 0;
      const double s0 = first ? s.initial_soc : 0.0;
      const int dyn =
          m.lp.add_constraint(tag("dyn_" + s.name, t), lp::Sense::Equal, s0);
      m.lp.add_coefficient(dyn, m.sto_e[i][st], 1.0);
      if (!first) m.lp.add_coefficient(dyn, m.sto_e[i][st - 1], -1.0);
      m.lp.add_coefficient(dyn, m.sto_rd[i][st], -eta);
      m.lp.add_coefficient(dyn, m.sto_ru[i][st], 1.0);

      const int exup = m.lp.add_constraint(tag("exup_" + s.name, t),
                                           lp::Sense::GreaterEqual, bid.floor() - s0);
      if (!first) m.lp.add_coefficient(exup, m.sto_e[i][st - 1], 1.0);
      m.lp.add_coefficient(exup, m.sto_ru[i][st], -1.0);

      const int exdn = m.lp.add_constraint(tag("exdn_" + s.name, t), lp::Sense::LessEqual,
                                           bid.ceiling() - s0);
      if (!first) m.lp.add_coefficient(exdn, m.sto_e[i][st - 1], 1.0);
      m.lp.add_coefficient(exdn, m.sto_rd[i][st], eta);

      m.lp.add_coefficient(m.row_req_up[st], m.sto_ru[i][st], 1.0);
      m.lp.add_coefficient(m.row_req_down[st], m.sto_rd[i][st], 1.0);
    }

    for (std::size_t j = 0; j < bid.pieces(); ++j) {
      const int epi =
          m.lp.add_constraint("epi_" + s.name + "_j" + std::to_string(j),
                              lp::Sense::GreaterEqual,
                              closed_form_intercept(bid, s.initial_soc, j));
      m.lp.add_coefficient(epi, m.psi[i], 1.0);
      for (int t = 0; t < T; ++t) {
        const std::size_t st = static_cast<std::size_t>(t);
        m.lp.add_coefficient(epi, m.sto_rd[i][st], -bid.down_costs[j]);
        m.lp.add_coefficient(epi, m.sto_ru[i][st], -bid.up_costs[j]);
      }
    }
  }
  return m;
}

namespace {

lp::SolveStatus map_failure(ClearingResult& out, const lp::Solution& sol) {
  out.status = sol.status;
  out.objective = 0.0;
  return sol.status;
}

double clip0(double v) { return v < 0.0 && v > -1e-7 ? 0.0 : v; }

} // namespace

ClearingResult clear_convex(const ClearingProblem& p, const lp::SimplexOptions& opt) {
  p.validate();
  for (const auto& s : p.storages)
    if (!s.bid.check_edcr())
      throw std::domain_error("clear_convex: bid of storage " + s.name +
                              " fails the equal-ratio condition; clear with the exact model");

  ConvexModel m = build_convex_model(p);
  const lp::Solution sol = lp::solve(m.lp, opt);
  ClearingResult out;
  if (sol.status != lp::SolveStatus::Optimal) {
    map_failure(out, sol);
    return out;
  }
  out.status = sol.status;
  out.objective = sol.objective;
  out.degenerate_duals = sol.primal_degenerate;

  detail::SystemSkeleton sk;
  sk.gen_total = m.gen_total;
  sk.gen_ru = m.gen_ru;
  sk.gen_rd = m.gen_rd;
  sk.row_req_up = m.row_req_up;
  sk.row_req_down = m.row_req_down;
  detail::extract_system(sk, p, sol, out);

  const std::size_t T = static_cast<std::size_t>(p.horizon);
  const std::size_t ns = p.storages.size();
  out.storage_reg_up.assign(ns, std::vector<double>(T, 0.0));
  out.storage_reg_down = out.storage_reg_up;
  out.storage_soc.assign(ns, std::vector<double>(T + 1, 0.0));
  out.storage_bid_cost.assign(ns, 0.0);
  for (std::size_t i = 0; i < ns; ++i) {
    out.storage_soc[i][0] = p.storages[i].initial_soc;
    for (std::size_t t = 0; t < T; ++t) {
      out.storage_reg_up[i][t] = clip0(sol.x[static_cast<std::size_t>(m.sto_ru[i][t])]);
      out.storage_reg_down[i][t] = clip0(sol.x[static_cast<std::size_t>(m.sto_rd[i][t])]);
      out.storage_soc[i][t + 1] = sol.x[static_cast<std::size_t>(m.sto_e[i][t])];
    }
    out.storage_bid_cost[i] = sol.x[static_cast<std::size_t>(m.psi[i])];
  }
  return out;
}

std::vector<UnidirectionalCheck> check_unidirectional_condition(const ClearingProblem& p,
                                                                const ClearingResult& r,
                                                                std::size_t i,
                                                                double product_tol) {
  if (i >= p.storages.size())
    throw std::invalid_argument("check_unidirectional_condition: storage index out of range");
  const StorageBid& bid = p.storages[i].bid;
  const double eta = bid.efficiency;
  const double threshold = bid.up_costs.back() * eta + bid.down_costs.front();
  std::vector<UnidirectionalCheck> out(static_cast<std::size_t>(p.horizon));
  for (std::size_t t = 0; t < out.size(); ++t) {
    UnidirectionalCheck& c = out[t];
    c.condition_holds = threshold > r.price_up[t] * eta + r.price_down[t] + 1e-12;
    c.product = r.storage_reg_up[i][t] * r.storage_reg_down[i][t];
    c.consistent = !c.condition_holds || c.product <= product_tol;
  }
  return out;
}

} // namespace regmkt

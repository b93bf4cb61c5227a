#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "regmkt/cost.hpp"
#include "regmkt/market.hpp"
#include "system_builder.hpp"

namespace regmkt {

namespace {

// Fill-order split of a state of charge across piece widths: lower pieces
// fill completely before the next one takes content.
std::vector<double> fill_split(const StorageBid& bid, double soc) {
  std::vector<double> out(bid.pieces(), 0.0);
  for (std::size_t k = 0; k < bid.pieces(); ++k)
    out[k] = std::min(bid.width(k), std::max(0.0, soc - bid.breakpoints[k]));
  return out;
}

double auto_big_m(const StorageUnitSpec& s, int horizon) {
  const double caps = static_cast<double>(horizon) * (s.reg_up_cap + s.reg_down_cap);
  return 2.0 * std::max(s.bid.capacity(), caps);
}

} // namespace

ExactModel build_exact_model(const ClearingProblem& p, double big_m) {
  using detail::tag;
  ExactModel m;
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
  m.sto_ru.resize(ns);
  m.sto_rd.resize(ns);
  m.sto_e.resize(ns);

  for (std::size_t i = 0; i < ns; ++i) {
    const StorageUnitSpec& s = p.storages[i];
    const StorageBid& bid = s.bid;
    const std::size_t K = bid.pieces();
    const double eta = bid.efficiency;
    const double M = big_m > 0.0 ? big_m : auto_big_m(s, T);
    const std::vector<double> e0 = fill_split(bid, s.initial_soc);

    auto grid = [&](const char* base, auto upper, auto cost) {
      std::vector<std::vector<int>> v(K, std::vector<int>(static_cast<std::size_t>(T), -1));
      for (std::size_t k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t)
          v[k][static_cast<std::size_t>(t)] = m.lp.add_variable(
              tag(std::string(base) + "_" + s.name + "_k" + std::to_string(k), t), 0.0,
              upper(k), cost(k));
      return v;
    };
    const auto zero = [](std::size_t) { return 0.0; };
    const auto cap_up = [&](std::size_t) { return s.reg_up_cap; };
    const auto cap_dn = [&](std::size_t) { return s.reg_down_cap; };
    const auto widths = [&](std::size_t k) { return bid.width(k); };

    // Billed per-piece capacities carry the piece rates in the objective.
    auto ru = grid("ru", cap_up, [&](std::size_t k) { return bid.up_costs[k]; });
    auto rd = grid("rd", cap_dn, [&](std::size_t k) { return bid.down_costs[k]; });
    auto e = grid("soc", widths, zero);
    m.sto_ru[i] = ru;
    m.sto_rd[i] = rd;
    m.sto_e[i] = e;

    if (K == 1) {
      // Single piece: billing is order-independent, no binaries needed.
      for (int t = 0; t < T; ++t) {
        const std::size_t st = static_cast<std::size_t>(t);
        const bool first = t == 0;
        const double c0 = first ? e0[0] : 0.0;
        const int dyn = m.lp.add_constraint(tag("dyn_" + s.name, t), lp::Sense::Equal, c0);
        m.lp.add_coefficient(dyn, e[0][st], 1.0);
        if (!first) m.lp.add_coefficient(dyn, e[0][st - 1], -1.0);
        m.lp.add_coefficient(dyn, rd[0][st], -eta);
        m.lp.add_coefficient(dyn, ru[0][st], 1.0);
        const int exup =
            m.lp.add_constraint(tag("exup_" + s.name, t), lp::Sense::GreaterEqual, -c0);
        if (!first) m.lp.add_coefficient(exup, e[0][st - 1], 1.0);
        m.lp.add_coefficient(exup, ru[0][st], -1.0);
        const int exdn = m.lp.add_constraint(tag("exdn_" + s.name, t), lp::Sense::LessEqual,
                                             bid.capacity() - c0);
        if (!first) m.lp.add_coefficient(exdn, e[0][st - 1], 1.0);
        m.lp.add_coefficient(exdn, rd[0][st], eta);
        m.lp.add_coefficient(m.row_req_up[st], ru[0][st], 1.0);
        m.lp.add_coefficient(m.row_req_down[st], rd[0][st], 1.0);
      }
      continue;
    }

    // Two deployment-order replicas: A charges then discharges, B the
    // reverse.  Legs move piece contents, mids are the turnaround states.
    auto da = grid("dnA", cap_dn, zero);
    auto ua = grid("upA", cap_up, zero);
    auto ia = grid("midA", widths, zero);
    auto ub = grid("upB", cap_up, zero);
    auto db = grid("dnB", cap_dn, zero);
    auto ib = grid("midB", widths, zero);

    for (int t = 0; t < T; ++t) {
      const std::size_t st = static_cast<std::size_t>(t);
      const bool first = t == 0;

      const int selA = m.lp.add_variable(tag("ordA_" + s.name, t), 0.0, 1.0, 0.0);
      const int selB = m.lp.add_variable(tag("ordB_" + s.name, t), 0.0, 1.0, 0.0);
      m.binaries.push_back(selA);
      m.binaries.push_back(selB);
      const int choice = m.lp.add_constraint(tag("ord_" + s.name, t), lp::Sense::Equal, 1.0);
      m.lp.add_coefficient(choice, selA, 1.0);
      m.lp.add_coefficient(choice, selB, 1.0);

      const int totAd = m.lp.add_constraint(tag("totAd_" + s.name, t), lp::Sense::Equal, 0.0);
      const int totAu = m.lp.add_constraint(tag("totAu_" + s.name, t), lp::Sense::Equal, 0.0);
      const int totBu = m.lp.add_constraint(tag("totBu_" + s.name, t), lp::Sense::Equal, 0.0);
      const int totBd = m.lp.add_constraint(tag("totBd_" + s.name, t), lp::Sense::Equal, 0.0);
      const int exup = m.lp.add_constraint(tag("exup_" + s.name, t), lp::Sense::GreaterEqual,
                                           first ? bid.floor() - s.initial_soc : 0.0);
      const int exdn = m.lp.add_constraint(tag("exdn_" + s.name, t), lp::Sense::LessEqual,
                                           bid.ceiling() - (first ? s.initial_soc : bid.floor()));
      const int capU =
          m.lp.add_constraint(tag("capU_" + s.name, t), lp::Sense::LessEqual, s.reg_up_cap);
      const int capD =
          m.lp.add_constraint(tag("capD_" + s.name, t), lp::Sense::LessEqual, s.reg_down_cap);

      for (std::size_t k = 0; k < K; ++k) {
        const double c0 = first ? e0[k] : 0.0;
        const int dyn = m.lp.add_constraint(
            tag("dyn_" + s.name + "_k" + std::to_string(k), t), lp::Sense::Equal, c0);
        m.lp.add_coefficient(dyn, e[k][st], 1.0);
        if (!first) m.lp.add_coefficient(dyn, e[k][st - 1], -1.0);
        m.lp.add_coefficient(dyn, rd[k][st], -eta);
        m.lp.add_coefficient(dyn, ru[k][st], 1.0);

        const int dA1 = m.lp.add_constraint(
            tag("defA1_" + s.name + "_k" + std::to_string(k), t), lp::Sense::Equal, c0);
        m.lp.add_coefficient(dA1, ia[k][st], 1.0);
        if (!first) m.lp.add_coefficient(dA1, e[k][st - 1], -1.0);
        m.lp.add_coefficient(dA1, da[k][st], -eta);
        const int dA2 = m.lp.add_constraint(
            tag("defA2_" + s.name + "_k" + std::to_string(k), t), lp::Sense::Equal, 0.0);
        m.lp.add_coefficient(dA2, e[k][st], 1.0);
        m.lp.add_coefficient(dA2, ia[k][st], -1.0);
        m.lp.add_coefficient(dA2, ua[k][st], 1.0);

        const int dB1 = m.lp.add_constraint(
            tag("defB1_" + s.name + "_k" + std::to_string(k), t), lp::Sense::Equal, c0);
        m.lp.add_coefficient(dB1, ib[k][st], 1.0);
        if (!first) m.lp.add_coefficient(dB1, e[k][st - 1], -1.0);
        m.lp.add_coefficient(dB1, ub[k][st], 1.0);
        const int dB2 = m.lp.add_constraint(
            tag("defB2_" + s.name + "_k" + std::to_string(k), t), lp::Sense::Equal, 0.0);
        m.lp.add_coefficient(dB2, e[k][st], 1.0);
        m.lp.add_coefficient(dB2, ib[k][st], -1.0);
        m.lp.add_coefficient(dB2, db[k][st], -eta);

        m.lp.add_coefficient(totAd, da[k][st], 1.0);
        m.lp.add_coefficient(totAd, rd[k][st], -1.0);
        m.lp.add_coefficient(totAu, ua[k][st], 1.0);
        m.lp.add_coefficient(totAu, ru[k][st], -1.0);
        m.lp.add_coefficient(totBu, ub[k][st], 1.0);
        m.lp.add_coefficient(totBu, ru[k][st], -1.0);
        m.lp.add_coefficient(totBd, db[k][st], 1.0);
        m.lp.add_coefficient(totBd, rd[k][st], -1.0);

        // Selected order must bill exactly the per-piece capacities (leg <=
        // billed piecewise, leg totals == billed totals); the big-M frees
        // the unselected order, which then only certifies feasibility.
        const int jAd = m.lp.add_constraint(
            tag("selAd_" + s.name + "_k" + std::to_string(k), t), lp::Sense::LessEqual, 0.0);
        m.lp.add_coefficient(jAd, da[k][st], 1.0);
        m.lp.add_coefficient(jAd, rd[k][st], -1.0);
        m.lp.add_coefficient(jAd, selA, -M);
        const int jAu = m.lp.add_constraint(
            tag("selAu_" + s.name + "_k" + std::to_string(k), t), lp::Sense::LessEqual, 0.0);
        m.lp.add_coefficient(jAu, ua[k][st], 1.0);
        m.lp.add_coefficient(jAu, ru[k][st], -1.0);
        m.lp.add_coefficient(jAu, selA, -M);
        const int jBu = m.lp.add_constraint(
            tag("selBu_" + s.name + "_k" + std::to_string(k), t), lp::Sense::LessEqual, 0.0);
        m.lp.add_coefficient(jBu, ub[k][st], 1.0);
        m.lp.add_coefficient(jBu, ru[k][st], -1.0);
        m.lp.add_coefficient(jBu, selB, -M);
        const int jBd = m.lp.add_constraint(
            tag("selBd_" + s.name + "_k" + std::to_string(k), t), lp::Sense::LessEqual, 0.0);
        m.lp.add_coefficient(jBd, db[k][st], 1.0);
        m.lp.add_coefficient(jBd, rd[k][st], -1.0);
        m.lp.add_coefficient(jBd, selB, -M);

        if (!first) m.lp.add_coefficient(exup, e[k][st - 1], 1.0);
        m.lp.add_coefficient(exup, ru[k][st], -1.0);
        if (!first) m.lp.add_coefficient(exdn, e[k][st - 1], 1.0);
        m.lp.add_coefficient(exdn, rd[k][st], eta);
        m.lp.add_coefficient(capU, ru[k][st], 1.0);
        m.lp.add_coefficient(capD, rd[k][st], 1.0);
        m.lp.add_coefficient(m.row_req_up[st], ru[k][st], 1.0);
        m.lp.add_coefficient(m.row_req_down[st], rd[k][st], 1.0);
      }

      // Fill order: content can sit in piece k+1 only when piece k is full,
      // enforced on the end state and on both turnaround states.
      const std::vector<std::vector<int>>* states[3] = {&e, &ia, &ib};
      const char* names[3] = {"fillE", "fillA", "fillB"};
      for (int v = 0; v < 3; ++v) {
        for (std::size_t k = 0; k + 1 < K; ++k) {
          const int u = m.lp.add_variable(
              tag(std::string(names[v]) + "_" + s.name + "_k" + std::to_string(k), t), 0.0,
              1.0, 0.0);
          m.binaries.push_back(u);
          const int lo = m.lp.add_constraint(
              tag(std::string(names[v]) + "lo_" + s.name + "_k" + std::to_string(k), t),
              lp::Sense::GreaterEqual, 0.0);
          m.lp.add_coefficient(lo, (*states[v])[k][st], 1.0);
          m.lp.add_coefficient(lo, u, -bid.width(k));
          const int hi = m.lp.add_constraint(
              tag(std::string(names[v]) + "hi_" + s.name + "_k" + std::to_string(k), t),
              lp::Sense::LessEqual, 0.0);
          m.lp.add_coefficient(hi, (*states[v])[k + 1][st], 1.0);
          m.lp.add_coefficient(hi, u, -bid.width(k + 1));
        }
      }
    }
  }
  return m;
}

ClearingResult clear_mip(const ClearingProblem& p, const MipSettings& settings) {
  p.validate();
  ExactModel m = build_exact_model(p, settings.big_m);
  const lp::Solution sol = lp::solve_mip(m.lp, m.binaries, settings.options);

  ClearingResult out;
  out.from_mip = true;
  out.nodes = sol.nodes;
  out.mip_gap = sol.gap;
  if (sol.x.empty() || (sol.status != lp::SolveStatus::Optimal &&
                        sol.status != lp::SolveStatus::NodeLimit)) {
    out.status = sol.status;
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
    const StorageBid& bid = p.storages[i].bid;
    out.storage_soc[i][0] = p.storages[i].initial_soc;
    for (std::size_t t = 0; t < T; ++t) {
      double up = 0.0, dn = 0.0, soc = bid.floor();
      for (std::size_t k = 0; k < bid.pieces(); ++k) {
        const double u = sol.x[static_cast<std::size_t>(m.sto_ru[i][k][t])];
        const double d = sol.x[static_cast<std::size_t>(m.sto_rd[i][k][t])];
        up += u;
        dn += d;
        soc += sol.x[static_cast<std::size_t>(m.sto_e[i][k][t])];
        out.storage_bid_cost[i] += bid.up_costs[k] * u + bid.down_costs[k] * d;
      }
      out.storage_reg_up[i][t] = std::max(0.0, up);
      out.storage_reg_down[i][t] = std::max(0.0, dn);
      out.storage_soc[i][t + 1] = soc;
    }
  }
  return out;
}

} // namespace regmkt

#pragma once

// Shared generator/network/requirement scaffolding for the two clearing
// models.  Requirement rows receive generator coefficients here; each model
// adds its own storage coefficients.

#include <string>
#include <vector>

#include "regmkt/lp.hpp"
#include "regmkt/market.hpp"

namespace regmkt::detail {

struct SystemSkeleton {
  std::vector<std::vector<int>> gen_total, gen_ru, gen_rd;
  std::vector<std::vector<std::vector<int>>> gen_piece;
  std::vector<int> row_balance, row_req_up, row_req_down;
};

inline std::string tag(const std::string& base, int t) { return base + "_t" + std::to_string(t); }

inline SystemSkeleton add_system(lp::LinearProgram& lp, const ClearingProblem& p) {
  SystemSkeleton sk;
  const int T = p.horizon;
  const std::size_t ng = p.generators.size();
  sk.gen_total.assign(ng, std::vector<int>(static_cast<std::size_t>(T), -1));
  sk.gen_ru = sk.gen_total;
  sk.gen_rd = sk.gen_total;
  sk.gen_piece.resize(ng);

  for (std::size_t i = 0; i < ng; ++i) {
    const GeneratorSpec& g = p.generators[i];
    sk.gen_piece[i].assign(g.energy_cost.size(),
                           std::vector<int>(static_cast<std::size_t>(T), -1));
    for (int t = 0; t < T; ++t) {
      const std::size_t st = static_cast<std::size_t>(t);
      sk.gen_total[i][st] =
          lp.add_variable(tag("e_" + g.name, t), g.g_min, g.cap_at(t), 0.0);
      sk.gen_ru[i][st] =
          lp.add_variable(tag("ru_" + g.name, t), 0.0, g.reg_up_cap, g.reg_up_cost);
      sk.gen_rd[i][st] =
          lp.add_variable(tag("rd_" + g.name, t), 0.0, g.reg_down_cap, g.reg_down_cost);
      for (std::size_t q = 0; q < g.energy_cost.size(); ++q)
        sk.gen_piece[i][q][st] =
            lp.add_variable(tag("e_" + g.name + "_p" + std::to_string(q), t), 0.0,
                            g.energy_cost[q].width, g.energy_cost[q].slope);
    }
  }

  sk.row_balance.assign(static_cast<std::size_t>(T), -1);
  sk.row_req_up = sk.row_balance;
  sk.row_req_down = sk.row_balance;
  for (int t = 0; t < T; ++t) {
    const std::size_t st = static_cast<std::size_t>(t);
    double load = 0.0;
    for (int b = 0; b < p.network.buses; ++b)
      load += p.network.demand[static_cast<std::size_t>(b)][st];
    sk.row_balance[st] = lp.add_constraint(tag("balance", t), lp::Sense::Equal, load);
    sk.row_req_up[st] =
        lp.add_constraint(tag("requp", t), lp::Sense::GreaterEqual, p.req_up[st]);
    sk.row_req_down[st] =
        lp.add_constraint(tag("reqdn", t), lp::Sense::GreaterEqual, p.req_down[st]);
    for (std::size_t i = 0; i < ng; ++i) {
      lp.add_coefficient(sk.row_balance[st], sk.gen_total[i][st], 1.0);
      lp.add_coefficient(sk.row_req_up[st], sk.gen_ru[i][st], 1.0);
      lp.add_coefficient(sk.row_req_down[st], sk.gen_rd[i][st], 1.0);
    }

    for (std::size_t ln = 0; ln < p.network.line_limits.size(); ++ln) {
      double rhs = p.network.line_limits[ln];
      for (int b = 0; b < p.network.buses; ++b)
        rhs += p.network.shift_factors[ln][static_cast<std::size_t>(b)] *
               p.network.demand[static_cast<std::size_t>(b)][st];
      const int row = lp.add_constraint(tag("line" + std::to_string(ln), t),
                                        lp::Sense::LessEqual, rhs);
      for (std::size_t i = 0; i < ng; ++i) {
        const double s =
            p.network.shift_factors[ln][static_cast<std::size_t>(p.generators[i].bus)];
        if (s != 0.0) lp.add_coefficient(row, sk.gen_total[i][st], s);
      }
    }

    for (std::size_t i = 0; i < ng; ++i) {
      const GeneratorSpec& g = p.generators[i];
      const int def = lp.add_constraint(tag("def_" + g.name, t), lp::Sense::Equal, 0.0);
      lp.add_coefficient(def, sk.gen_total[i][st], 1.0);
      for (std::size_t q = 0; q < g.energy_cost.size(); ++q)
        lp.add_coefficient(def, sk.gen_piece[i][q][st], -1.0);
      const int head =
          lp.add_constraint(tag("head_" + g.name, t), lp::Sense::LessEqual, g.cap_at(t));
      lp.add_coefficient(head, sk.gen_total[i][st], 1.0);
      lp.add_coefficient(head, sk.gen_ru[i][st], 1.0);
      const int foot =
          lp.add_constraint(tag("foot_" + g.name, t), lp::Sense::GreaterEqual, g.g_min);
      lp.add_coefficient(foot, sk.gen_total[i][st], 1.0);
      lp.add_coefficient(foot, sk.gen_rd[i][st], -1.0);
    }
  }
  return sk;
}

// Copies generator schedules and requirement-row duals out of a solved model.
inline void extract_system(const SystemSkeleton& sk, const ClearingProblem& p,
                           const lp::Solution& sol, ClearingResult& out) {
  const std::size_t T = static_cast<std::size_t>(p.horizon);
  const std::size_t ng = p.generators.size();
  out.gen_energy.assign(ng, std::vector<double>(T, 0.0));
  out.gen_reg_up = out.gen_energy;
  out.gen_reg_down = out.gen_energy;
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t t = 0; t < T; ++t) {
      out.gen_energy[i][t] = sol.x[static_cast<std::size_t>(sk.gen_total[i][t])];
      out.gen_reg_up[i][t] = sol.x[static_cast<std::size_t>(sk.gen_ru[i][t])];
      out.gen_reg_down[i][t] = sol.x[static_cast<std::size_t>(sk.gen_rd[i][t])];
    }
  out.price_up.assign(T, 0.0);
  out.price_down.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    out.price_up[t] = std::max(0.0, sol.duals[static_cast<std::size_t>(sk.row_req_up[t])]);
    out.price_down[t] = std::max(0.0, sol.duals[static_cast<std::size_t>(sk.row_req_down[t])]);
  }
}

} // namespace regmkt::detail

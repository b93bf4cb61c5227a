#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "regmkt/bid.hpp"
#include "regmkt/lp.hpp"

namespace regmkt {

// Convex energy offer segment: `width` MWh per interval at marginal `slope`.
struct EnergyPiece {
  double slope = 0.0;
  double width = 0.0;
};

struct GeneratorSpec {
  std::string name;
  int bus = 0;
  double g_min = 0.0;
  double g_max = 0.0;                  // MWh per interval
  std::vector<double> g_max_t;         // optional per-interval cap (renewables); empty = g_max
  std::vector<EnergyPiece> energy_cost;
  double reg_up_cap = 0.0, reg_down_cap = 0.0;
  double reg_up_cost = 0.0, reg_down_cost = 0.0;

  double cap_at(int t) const { return g_max_t.empty() ? g_max : g_max_t[static_cast<std::size_t>(t)]; }
  void validate(int horizon) const;
};

struct StorageUnitSpec {
  std::string name;
  int bus = 0;
  double initial_soc = 0.0;
  double reg_up_cap = 0.0, reg_down_cap = 0.0;
  StorageBid bid; // the bid-in curve the market clears against

  void validate() const;
};

// DC network as monitored-line shift factors over nodal energy injections.
// An empty shift-factor list models a single copper-plate bus.
struct NetworkSpec {
  int buses = 1;
  std::vector<std::vector<double>> shift_factors; // [line][bus]
  std::vector<double> line_limits;                // [line]
  std::vector<std::vector<double>> demand;        // [bus][t], MWh per interval

  void validate(int horizon) const;
};

struct ClearingProblem {
  int horizon = 0;
  NetworkSpec network;
  std::vector<GeneratorSpec> generators;
  std::vector<StorageUnitSpec> storages;
  std::vector<double> req_up, req_down; // [t]

  void validate() const;
};

struct ClearingResult {
  lp::SolveStatus status = lp::SolveStatus::Infeasible;
  double objective = 0.0;
  bool from_mip = false;
  bool degenerate_duals = false;
  double mip_gap = 0.0;
  long nodes = 0;

  std::vector<std::vector<double>> gen_energy, gen_reg_up, gen_reg_down; // [gen][t]
  std::vector<std::vector<double>> storage_reg_up, storage_reg_down;    // [storage][t]
  std::vector<std::vector<double>> storage_soc;                         // [storage][t+1], [0] = initial
  std::vector<double> storage_bid_cost;                                 // worst-case billed cost per storage
  std::vector<double> price_up, price_down;                             // [t], >= 0
};

// Convex clearing model and its variable/row bookkeeping.  Exposed so the
// CLI can export LP text and tests can reach raw solver output.
struct ConvexModel {
  lp::LinearProgram lp;
  std::vector<std::vector<int>> gen_total, gen_ru, gen_rd; // [gen][t]
  std::vector<std::vector<std::vector<int>>> gen_piece;    // [gen][piece][t]
  std::vector<std::vector<int>> sto_ru, sto_rd, sto_e;     // [storage][t]
  std::vector<int> psi;                                    // [storage]
  std::vector<int> row_balance, row_req_up, row_req_down;  // [t]
};

ConvexModel build_convex_model(const ClearingProblem& p);

// Exact clearing model with per-segment storage accounting, deployment-order
// selection and fill-order binaries.
struct ExactModel {
  lp::LinearProgram lp;
  std::vector<int> binaries;
  std::vector<std::vector<int>> gen_total, gen_ru, gen_rd;
  std::vector<std::vector<std::vector<int>>> gen_piece;
  std::vector<std::vector<std::vector<int>>> sto_ru, sto_rd, sto_e; // [storage][piece][t]
  std::vector<int> row_balance, row_req_up, row_req_down;
};

ExactModel build_exact_model(const ClearingProblem& p, double big_m = 0.0); // <= 0: automatic

// Clears with every storage billed at its worst-case closed form via the
// epigraph LP.  Requires every storage bid to satisfy check_edcr, else
// throws std::domain_error.
ClearingResult clear_convex(const ClearingProblem& p,
                            const lp::SimplexOptions& opt = lp::SimplexOptions::from_env());

struct MipSettings {
  lp::MipOptions options = lp::MipOptions::from_env();
  double big_m = 0.0; // <= 0: automatic
};

// Clears with exact order-of-deployment billing; accepts any valid bid.
// Prices are duals of the incumbent's LP restriction.
ClearingResult clear_mip(const ClearingProblem& p, const MipSettings& settings = MipSettings{});

struct StorageSettlement {
  double payment = 0.0;
  double bid_cost = 0.0;
  double bid_profit = 0.0;
  double true_cost = 0.0;
  double true_profit = 0.0;
};

struct SettlementReport {
  std::vector<StorageSettlement> storages;
  double system_cost = 0.0;      // clearing objective, storage at bid-in cost
  double true_system_cost = 0.0; // same with storage billed at the true bids
};

// Pays cleared capacities at the clearing prices; costs the schedule at the
// bid-in and at the true curves (closed form for EDCR curves, order-of-
// deployment billing otherwise).
SettlementReport settle(const ClearingProblem& p, const ClearingResult& r,
                        const std::vector<StorageBid>& true_bids);

struct UnidirectionalCheck {
  bool condition_holds = false; // price threshold inequality strictly satisfied
  double product = 0.0;         // cleared up * cleared down at t
  bool consistent = true;       // condition implies product == 0
};

// Per-interval check that the sufficient price condition for unidirectional
// clearing is never violated by the cleared schedule of storage `i`.
std::vector<UnidirectionalCheck> check_unidirectional_condition(const ClearingProblem& p,
                                                                const ClearingResult& r,
                                                                std::size_t i,
                                                                double product_tol = 1e-9);

void write_schedule_csv(const ClearingProblem& p, const ClearingResult& r, std::ostream& os);
void write_prices_csv(const ClearingResult& r, std::ostream& os);
void write_settlement_csv(const ClearingProblem& p, const SettlementReport& rep, std::ostream& os);

} // namespace regmkt

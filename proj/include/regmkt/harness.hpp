#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "regmkt/config.hpp"
#include "regmkt/market.hpp"

namespace regmkt {

enum class SolveMethod { Auto, Lp, Mip };

SolveMethod parse_method(const std::string& s);

struct Scenario {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<double> wind_speed;  // m/s per interval
  std::vector<double> wind_energy; // MWh per interval
};

// Independent scenarios, seeded base_seed + index so any prefix of the batch
// is reproducible regardless of batch size or thread count.
std::vector<Scenario> gen_scenarios(const WindModel& wind, int count, std::uint64_t base_seed,
                                    int horizon);

// One simulated market run: a variant/mode/shift cell evaluated on a scenario.
struct RunRecord {
  BidVariant variant = BidVariant::Edcr;
  DispatchMode mode = DispatchMode::OneShot;
  double shift = 0.0;
  int scenario = 0;
  bool feasible = false;
  std::string error;
  ClearingResult clearing;     // stitched across windows in rolling mode
  SettlementReport settlement; // bid-in and true-cost accounting
  double unidirectional_fraction = 0.0; // intervals where every storage moves one way
};

RunRecord run_one_shot(const SystemConfig& cfg, const Scenario& sc, BidVariant variant,
                       double shift, SolveMethod method = SolveMethod::Auto);

// Receding horizon: clear a `window`-interval lookahead, commit the first
// interval, advance the state of charge by the committed schedule, repeat.
// Final windows shrink instead of padding past the horizon.
RunRecord run_rolling(const SystemConfig& cfg, const Scenario& sc, BidVariant variant,
                      double shift, SolveMethod method = SolveMethod::Auto, int window = 4);

// Restriction of a problem to intervals [t0, t0+len), with storage initial
// states replaced by the realized ones.
ClearingProblem slice_problem(const ClearingProblem& p, int t0, int len,
                              const std::vector<double>& socs);

struct StudyCell {
  BidVariant variant = BidVariant::Edcr;
  DispatchMode mode = DispatchMode::OneShot;
  double shift = 0.0;
  int runs = 0;
  double mean_system_cost = 0.0;      // bid-in clearing objective
  double mean_true_system_cost = 0.0; // objective with bids swapped for true costs
  double mean_payment = 0.0;          // storage regulation revenue
  double mean_bid_profit = 0.0;
  double mean_true_profit = 0.0;
  double unidirectional_fraction = 0.0;
};

// Pairwise comparison of the equal-ratio curve against the flat curve within
// one mode/shift cell, in percent.
struct StudyDelta {
  DispatchMode mode = DispatchMode::OneShot;
  double shift = 0.0;
  double profit_gain_pct = 0.0;         // true profit, equal-ratio vs flat
  double system_cost_delta_pct = 0.0;   // negative means the equal-ratio run is cheaper
};

struct StudyResult {
  std::vector<Scenario> scenarios;
  std::vector<RunRecord> records; // variant-major, then mode, shift, scenario
  std::vector<StudyCell> cells;
  std::vector<StudyDelta> deltas;
};

// Runs the full plan from cfg.study. Scenario runs execute concurrently
// (REGMKT_THREADS, default hardware) and are folded in a fixed order, so
// output is byte-stable across thread counts. Throws SolverError if any run
// comes back infeasible.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StudyResult run_study(const SystemConfig& cfg);

std::vector<StudyCell> aggregate(const std::vector<RunRecord>& records);
std::vector<StudyDelta> compare_variants(const std::vector<StudyCell>& cells);

// scenario_results.csv, aggregate.csv and the long-format metrics.csv
// (metric,variant,shift,mode,value).
void write_scenario_csv(const SystemConfig& cfg, const StudyResult& r, std::ostream& os);
void write_aggregate_csv(const StudyResult& r, std::ostream& os);
void write_metrics_csv(const StudyResult& r, std::ostream& os);

} // namespace regmkt

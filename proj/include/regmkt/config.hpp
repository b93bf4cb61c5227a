#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "regmkt/market.hpp"

namespace regmkt {

// I/O or parse failure while reading a configuration; maps to CLI exit 1,
// while semantic validation problems map to exit 2.
struct ConfigIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindModel {
  std::vector<double> mean_speed; // m/s, one per interval
  double sigma = 5.0;
  double cut_in = 3.0;
  double rated_speed = 12.0;
  double cut_out = 25.0;
  double capacity = 20.0; // MWh per interval

  // Cut-in/cubic/rated/cut-out availability curve.
  double power_at(double speed) const;
};

enum class BidVariant { True, Edcr, Flat };
enum class DispatchMode { OneShot, Rolling };

const char* to_string(BidVariant v);
const char* to_string(DispatchMode m);
BidVariant parse_variant(const std::string& s);
DispatchMode parse_mode(const std::string& s);

// Storage asset with its three bid curves; the study picks one per variant.
struct StorageAsset {
  std::string name;
  int bus = 0;
  double initial_soc = 0.0;
  double reg_up_cap = 0.0, reg_down_cap = 0.0;
  StorageBid true_bid, edcr_bid, flat_bid;

  const StorageBid& bid(BidVariant v) const;
};

struct StudyPlan {
  int scenarios = 100;
  std::uint64_t seed = 1;
  std::vector<double> shifts;
  std::vector<DispatchMode> modes;
  std::vector<BidVariant> variants;
  int window = 4;
};

struct SolverConfig {
  double big_m = 0.0;   // 0: automatic
  double mip_gap = 0.0; // 0: library default
  long node_limit = 0;  // 0: library default
};

struct SystemConfig {
  int horizon = 24;
  NetworkSpec network;
  std::vector<GeneratorSpec> generators; // thermal units; wind is appended per scenario
  std::string wind_name = "wind";
  int wind_bus = 0;
  WindModel wind;
  std::vector<StorageAsset> storages;
  std::vector<double> req_up_base, req_down_base; // per interval
  StudyPlan study;
  SolverConfig solver;
};

// Parses the JSON configuration.  Throws ConfigIoError on missing files,
// malformed JSON, or missing/mistyped keys.
SystemConfig load_config(const std::string& path);

// Semantic validation: structural rules for every unit and bid, equal-ratio
// condition where the convex clearing requires it, study plan sanity.
// Returns human-readable violations; empty means valid.
std::vector<std::string> validate_config(const SystemConfig& cfg);

// Assembles the clearing problem for one scenario: thermal units plus a
// zero-cost wind unit capped at `wind_energy`, storage bidding the chosen
// curve, requirements shifted by `shift` in both directions.
ClearingProblem build_problem(const SystemConfig& cfg, const std::vector<double>& wind_energy,
                              BidVariant variant, double shift);

// True bids per storage, aligned with build_problem's storage order.
std::vector<StorageBid> true_bids_of(const SystemConfig& cfg);

} // namespace regmkt

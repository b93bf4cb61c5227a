#include "regmkt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace regmkt {

using nlohmann::json;

double WindModel::power_at(double speed) const {
  if (speed < cut_in || speed > cut_out) return 0.0;
  if (speed >= rated_speed) return capacity;
  const double c3 = cut_in * cut_in * cut_in;
  const double r3 = rated_speed * rated_speed * rated_speed;
  const double v3 = speed * speed * speed;
  return capacity * (v3 - c3) / (r3 - c3);
}

const char* to_string(BidVariant v) {
  switch (v) {
    case BidVariant::True: return "true";
    case BidVariant::Edcr: return "edcr";
    case BidVariant::Flat: return "flat";
  }
  return "?";
}

const char* to_string(DispatchMode m) {
  return m == DispatchMode::OneShot ? "oneshot" : "rolling";
}

BidVariant parse_variant(const std::string& s) {
  if (s == "true") return BidVariant::True;
  if (s == "edcr") return BidVariant::Edcr;
  if (s == "flat") return BidVariant::Flat;
  throw std::invalid_argument("unknown bid variant '" + s + "' (expected true|edcr|flat)");
}

DispatchMode parse_mode(const std::string& s) {
  if (s == "oneshot") return DispatchMode::OneShot;
  if (s == "rolling") return DispatchMode::Rolling;
  throw std::invalid_argument("unknown mode '" + s + "' (expected oneshot|rolling)");
}

const StorageBid& StorageAsset::bid(BidVariant v) const {
  switch (v) {
    case BidVariant::True: return true_bid;
    case BidVariant::Edcr: return edcr_bid;
    case BidVariant::Flat: return flat_bid;
  }
  return true_bid;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigIoError("config: " + where + ": " + what);
}

const json& member(const json& j, const std::string& where, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing key '" + key + "'");
  return *it;
}

double num(const json& j, const std::string& where, const std::string& key) {
  const json& v = member(j, where, key);
  if (!v.is_number()) fail(where, "'" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& where, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  return num(j, where, key);
}

long integer(const json& j, const std::string& where, const std::string& key) {
  const json& v = member(j, where, key);
  if (!v.is_number_integer()) fail(where, "'" + key + "' must be an integer");
  return v.get<long>();
}

std::string text(const json& j, const std::string& where, const std::string& key) {
  const json& v = member(j, where, key);
  if (!v.is_string()) fail(where, "'" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) fail(where, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// A per-interval series may be given as a constant or as a full array.
std::vector<double> series(const json& v, const std::string& where, int horizon) {
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(horizon), v.get<double>());
  std::vector<double> out = num_array(v, where);
  if (static_cast<int>(out.size()) != horizon)
    fail(where, "expected " + std::to_string(horizon) + " entries, got " + std::to_string(out.size()));
  return out;
}

StorageBid parse_bid(const json& j, const std::string& where) {
  StorageBid b;
  b.breakpoints = num_array(member(j, where, "breakpoints"), where + ".breakpoints");
  b.up_costs = num_array(member(j, where, "up_costs"), where + ".up_costs");
  b.down_costs = num_array(member(j, where, "down_costs"), where + ".down_costs");
  b.efficiency = num_or(j, where, "efficiency", 1.0);
  return b;
}

GeneratorSpec parse_generator(const json& j, const std::string& where) {
  GeneratorSpec g;
  g.name = text(j, where, "name");
  g.bus = static_cast<int>(integer(j, where, "bus"));
  g.g_min = num_or(j, where, "g_min", 0.0);
  g.g_max = num(j, where, "g_max");
  const json& pieces = member(j, where, "energy_cost");
  if (!pieces.is_array() || pieces.empty()) fail(where, "'energy_cost' must be a non-empty array");
  for (const auto& p : pieces) {
    EnergyPiece piece;
    piece.slope = num(p, where + ".energy_cost", "slope");
    piece.width = num(p, where + ".energy_cost", "width");
    g.energy_cost.push_back(piece);
  }
  g.reg_up_cap = num_or(j, where, "reg_up_cap", 0.0);
  g.reg_down_cap = num_or(j, where, "reg_down_cap", 0.0);
  g.reg_up_cost = num_or(j, where, "reg_up_cost", 0.0);
  g.reg_down_cost = num_or(j, where, "reg_down_cost", 0.0);
  return g;
}

} // namespace

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigIoError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigIoError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigIoError("config: top level must be an object");

  SystemConfig cfg;
  cfg.horizon = static_cast<int>(integer(j, "top", "horizon"));
  if (cfg.horizon <= 0) fail("top", "'horizon' must be positive");

  const json& net = member(j, "top", "network");
  cfg.network.buses = static_cast<int>(integer(net, "network", "buses"));
  if (net.contains("shift_factors")) {
    const json& sf = net.at("shift_factors");
    if (!sf.is_array()) fail("network.shift_factors", "expected an array of arrays");
    for (const auto& row : sf) cfg.network.shift_factors.push_back(num_array(row, "network.shift_factors"));
    cfg.network.line_limits = num_array(member(net, "network", "line_limits"), "network.line_limits");
  }
  const json& dem = member(net, "network", "demand");
  if (!dem.is_array() || static_cast<int>(dem.size()) != cfg.network.buses)
    fail("network.demand", "expected one series per bus");
  for (const auto& row : dem) cfg.network.demand.push_back(series(row, "network.demand", cfg.horizon));

  const json& gens = member(j, "top", "generators");
  if (!gens.is_array()) fail("generators", "expected an array");
  for (std::size_t i = 0; i < gens.size(); ++i)
    cfg.generators.push_back(parse_generator(gens[i], "generators[" + std::to_string(i) + "]"));

  const json& wind = member(j, "top", "wind");
  cfg.wind_name = wind.contains("name") ? text(wind, "wind", "name") : std::string("wind");
  cfg.wind_bus = static_cast<int>(integer(wind, "wind", "bus"));
  cfg.wind.capacity = num(wind, "wind", "capacity");
  cfg.wind.sigma = num_or(wind, "wind", "sigma", 5.0);
  cfg.wind.cut_in = num_or(wind, "wind", "cut_in", 3.0);
  cfg.wind.rated_speed = num_or(wind, "wind", "rated_speed", 12.0);
  cfg.wind.cut_out = num_or(wind, "wind", "cut_out", 25.0);
  cfg.wind.mean_speed = series(member(wind, "wind", "mean_speed"), "wind.mean_speed", cfg.horizon);

  const json& stos = member(j, "top", "storages");
  if (!stos.is_array()) fail("storages", "expected an array");
  for (std::size_t i = 0; i < stos.size(); ++i) {
    const std::string where = "storages[" + std::to_string(i) + "]";
    const json& s = stos[i];
    StorageAsset a;
    a.name = text(s, where, "name");
    a.bus = static_cast<int>(integer(s, where, "bus"));
    a.initial_soc = num(s, where, "initial_soc");
    a.reg_up_cap = num(s, where, "reg_up_cap");
    a.reg_down_cap = num(s, where, "reg_down_cap");
    const json& bids = member(s, where, "bids");
    a.true_bid = parse_bid(member(bids, where + ".bids", "true"), where + ".bids.true");
    a.edcr_bid = parse_bid(member(bids, where + ".bids", "edcr"), where + ".bids.edcr");
    a.flat_bid = parse_bid(member(bids, where + ".bids", "flat"), where + ".bids.flat");
    cfg.storages.push_back(std::move(a));
  }

  const json& req = member(j, "top", "requirements");
  cfg.req_up_base = series(member(req, "requirements", "up"), "requirements.up", cfg.horizon);
  cfg.req_down_base = series(member(req, "requirements", "down"), "requirements.down", cfg.horizon);

  if (j.contains("study")) {
    const json& st = j.at("study");
    cfg.study.scenarios = static_cast<int>(integer(st, "study", "scenarios"));
    cfg.study.seed = static_cast<std::uint64_t>(integer(st, "study", "seed"));
    cfg.study.shifts = num_array(member(st, "study", "shifts"), "study.shifts");
    for (const auto& m : member(st, "study", "modes")) {
      if (!m.is_string()) fail("study.modes", "expected strings");
      try {
        cfg.study.modes.push_back(parse_mode(m.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        fail("study.modes", e.what());
      }
    }
    for (const auto& v : member(st, "study", "variants")) {
      if (!v.is_string()) fail("study.variants", "expected strings");
      try {
        cfg.study.variants.push_back(parse_variant(v.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        fail("study.variants", e.what());
      }
    }
    cfg.study.window = static_cast<int>(num_or(st, "study", "window", 4.0));
  }

  if (j.contains("solver")) {
    const json& so = j.at("solver");
    cfg.solver.big_m = num_or(so, "solver", "big_m", 0.0);
    cfg.solver.mip_gap = num_or(so, "solver", "mip_gap", 0.0);
    cfg.solver.node_limit = static_cast<long>(num_or(so, "solver", "node_limit", 0.0));
  }
  return cfg;
}

namespace {

void check_bid(const StorageAsset& a, const char* label, const StorageBid& b, bool require_edcr,
               std::vector<std::string>& out) {
  const std::string head = "storage '" + a.name + "' " + label + " bid: ";
  try {
    b.validate();
  } catch (const std::exception& e) {
    out.push_back(head + e.what());
    return;
  }
  if (a.initial_soc < b.floor() - 1e-9 || a.initial_soc > b.ceiling() + 1e-9)
    out.push_back(head + "initial_soc outside the bid's state range");
  if (require_edcr && !b.check_edcr()) {
    // Report the first piece boundary where the equal-ratio condition breaks.
    int bad = -1;
    for (int k = 1; k < b.pieces(); ++k) {
      const double dd = b.down_costs[static_cast<std::size_t>(k) - 1] - b.down_costs[static_cast<std::size_t>(k)];
      const double du = b.efficiency * (b.up_costs[static_cast<std::size_t>(k)] - b.up_costs[static_cast<std::size_t>(k) - 1]);
      if (std::abs(dd - du) > 1e-9 * std::max({1.0, std::abs(dd), std::abs(du)})) {
        bad = k;
        break;
      }
    }
    out.push_back(head + "violates the equal-ratio condition at piece boundary k=" + std::to_string(bad));
  }
}

} // namespace

std::vector<std::string> validate_config(const SystemConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& a : cfg.storages) {
    check_bid(a, "true", a.true_bid, false, out);
    check_bid(a, "edcr", a.edcr_bid, true, out);
    check_bid(a, "flat", a.flat_bid, true, out);
    if (a.flat_bid.pieces() != 1)
      out.push_back("storage '" + a.name + "' flat bid: expected a single state-independent piece");
    if (a.reg_up_cap < 0 || a.reg_down_cap < 0)
      out.push_back("storage '" + a.name + "': regulation capacities must be nonnegative");
  }
  if (cfg.study.scenarios <= 0) out.push_back("study: scenarios must be positive");
  if (cfg.study.window <= 0) out.push_back("study: window must be positive");
  for (double s : cfg.study.shifts)
    if (s < 0) out.push_back("study: requirement shifts must be nonnegative");

  // Structural validation of the assembled problem, using the deterministic
  // wind profile; scenario noise never changes shapes, only magnitudes.
  std::vector<double> wind(static_cast<std::size_t>(cfg.horizon));
  for (int t = 0; t < cfg.horizon; ++t)
    wind[static_cast<std::size_t>(t)] = cfg.wind.power_at(cfg.wind.mean_speed[static_cast<std::size_t>(t)]);
  const double max_shift =
      cfg.study.shifts.empty() ? 0.0 : *std::max_element(cfg.study.shifts.begin(), cfg.study.shifts.end());
  for (BidVariant v : {BidVariant::True, BidVariant::Edcr, BidVariant::Flat}) {
    try {
      build_problem(cfg, wind, v, max_shift).validate();
    } catch (const std::exception& e) {
      out.push_back(std::string("problem (") + to_string(v) + " variant): " + e.what());
      break; // shapes are shared; one report is enough
    }
  }
  return out;
}

ClearingProblem build_problem(const SystemConfig& cfg, const std::vector<double>& wind_energy,
                              BidVariant variant, double shift) {
  if (static_cast<int>(wind_energy.size()) != cfg.horizon)
    throw std::invalid_argument("build_problem: wind series length mismatch");
  ClearingProblem p;
  p.horizon = cfg.horizon;
  p.network = cfg.network;
  p.generators = cfg.generators;

  GeneratorSpec wind;
  wind.name = cfg.wind_name;
  wind.bus = cfg.wind_bus;
  wind.g_min = 0.0;
  wind.g_max = cfg.wind.capacity;
  wind.g_max_t.resize(wind_energy.size());
  for (std::size_t t = 0; t < wind_energy.size(); ++t)
    wind.g_max_t[t] = std::min(cfg.wind.capacity, std::max(0.0, wind_energy[t]));
  wind.energy_cost.push_back({0.0, cfg.wind.capacity});
  p.generators.push_back(std::move(wind));

  for (const auto& a : cfg.storages) {
    StorageUnitSpec s;
    s.name = a.name;
    s.bus = a.bus;
    s.initial_soc = a.initial_soc;
    s.reg_up_cap = a.reg_up_cap;
    s.reg_down_cap = a.reg_down_cap;
    s.bid = a.bid(variant);
    p.storages.push_back(std::move(s));
  }

  p.req_up = cfg.req_up_base;
  p.req_down = cfg.req_down_base;
  for (auto& r : p.req_up) r += shift;
  for (auto& r : p.req_down) r += shift;
  return p;
}

std::vector<StorageBid> true_bids_of(const SystemConfig& cfg) {
  std::vector<StorageBid> out;
  out.reserve(cfg.storages.size());
  for (const auto& a : cfg.storages) out.push_back(a.true_bid);
  return out;
}

} // namespace regmkt

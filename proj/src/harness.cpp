#include "regmkt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "regmkt/cost.hpp"

namespace regmkt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Cleared capacities count as one-directional when the smaller side is noise.
constexpr double kDirTol = 1e-6;

double unidirectional_fraction_of(const ClearingResult& r) {
  std::size_t pairs = 0, uni = 0;
  for (std::size_t i = 0; i < r.storage_reg_up.size(); ++i)
    for (std::size_t t = 0; t < r.storage_reg_up[i].size(); ++t) {
      ++pairs;
      if (std::min(r.storage_reg_up[i][t], r.storage_reg_down[i][t]) <= kDirTol) ++uni;
    }
  return pairs == 0 ? 1.0 : static_cast<double>(uni) / static_cast<double>(pairs);
}

// Stand-alone energy cost of a committed output level: convex offers are
// filled cheapest piece first, which is what the clearing does.
double energy_cost_of(const GeneratorSpec& g, double e) {
  double rem = e, cost = 0.0;
  for (const auto& piece : g.energy_cost) {
    if (rem <= 0.0) break;
    const double take = std::min(piece.width, rem);
    cost += piece.slope * take;
    rem -= take;
  }
  return cost;
}

// Bid-in billing of a whole schedule; mirrors settlement's convention.
double billed_cost(const StorageBid& bid, const std::vector<double>& ru,
                   const std::vector<double>& rd, const std::vector<double>& soc) {
  if (bid.check_edcr()) return edcr_cost(bid, soc[0], ru, rd);
  double total = 0.0;
  for (std::size_t t = 0; t < ru.size(); ++t)
    total += two_route_cost(bid, soc[t], ru[t], rd[t]);
  return total;
}

bool solved(const ClearingResult& r) {
  if (r.status == lp::SolveStatus::Optimal) return true;
  return r.status == lp::SolveStatus::NodeLimit && !r.storage_reg_up.empty();
}

ClearingResult dispatch(const ClearingProblem& p, SolveMethod method, const SolverConfig& sv) {
  bool all_edcr = true;
  for (const auto& s : p.storages) all_edcr = all_edcr && s.bid.check_edcr();
  const bool use_mip = method == SolveMethod::Mip || (method == SolveMethod::Auto && !all_edcr);
  if (use_mip) {
    MipSettings ms;
    ms.big_m = sv.big_m;
    if (sv.mip_gap > 0.0) ms.options.gap_tol = sv.mip_gap;
    if (sv.node_limit > 0) ms.options.node_limit = sv.node_limit;
    return clear_mip(p, ms);
  }
  return clear_convex(p); // throws std::domain_error when a bid is not EDCR
}

int thread_count() {
  if (const char* s = std::getenv("REGMKT_THREADS")) {
    const int v = std::atoi(s);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 8u));
}

} // namespace

SolveMethod parse_method(const std::string& s) {
  if (s == "auto") return SolveMethod::Auto;
  if (s == "lp") return SolveMethod::Lp;
  if (s == "mip") return SolveMethod::Mip;
  throw std::invalid_argument("unknown method '" + s + "' (expected auto|lp|mip)");
}

std::vector<Scenario> gen_scenarios(const WindModel& wind, int count, std::uint64_t base_seed,
                                    int horizon) {
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Scenario sc;
    sc.index = i;
    sc.seed = base_seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(sc.seed);
    sc.wind_speed.resize(static_cast<std::size_t>(horizon));
    sc.wind_energy.resize(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
      double v = wind.mean_speed[static_cast<std::size_t>(t)];
      if (wind.sigma > 0.0) {
        // Box-Muller, spelled out so streams are identical on every platform.
        const double scale = 1.0 / 9007199254740992.0; // 2^-53
        const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * scale; // (0, 1]
        const double u2 = static_cast<double>(rng() >> 11) * scale;         // [0, 1)
        v += wind.sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
      }
      v = std::max(0.0, v);
      sc.wind_speed[static_cast<std::size_t>(t)] = v;
      sc.wind_energy[static_cast<std::size_t>(t)] = wind.power_at(v);
    }
    out.push_back(std::move(sc));
  }
  return out;
}

ClearingProblem slice_problem(const ClearingProblem& p, int t0, int len,
                              const std::vector<double>& socs) {
  if (t0 < 0 || len <= 0 || t0 + len > p.horizon)
    throw std::invalid_argument("slice_problem: window out of range");
  if (socs.size() != p.storages.size())
    throw std::invalid_argument("slice_problem: need one state per storage");
  const auto a = static_cast<std::size_t>(t0);
  const auto b = static_cast<std::size_t>(t0 + len);

  ClearingProblem w = p;
  w.horizon = len;
  for (auto& d : w.network.demand) d = std::vector<double>(d.begin() + static_cast<long>(a), d.begin() + static_cast<long>(b));
  for (auto& g : w.generators)
    if (!g.g_max_t.empty())
      g.g_max_t = std::vector<double>(g.g_max_t.begin() + static_cast<long>(a),
                                      g.g_max_t.begin() + static_cast<long>(b));
  for (std::size_t i = 0; i < w.storages.size(); ++i) w.storages[i].initial_soc = socs[i];
  w.req_up = std::vector<double>(p.req_up.begin() + static_cast<long>(a), p.req_up.begin() + static_cast<long>(b));
  w.req_down = std::vector<double>(p.req_down.begin() + static_cast<long>(a), p.req_down.begin() + static_cast<long>(b));
  return w;
}

RunRecord run_one_shot(const SystemConfig& cfg, const Scenario& sc, BidVariant variant,
                       double shift, SolveMethod method) {
  RunRecord rec;
  rec.variant = variant;
  rec.mode = DispatchMode::OneShot;
  rec.shift = shift;
  rec.scenario = sc.index;
  try {
    ClearingProblem p = build_problem(cfg, sc.wind_energy, variant, shift);
    p.validate();
    rec.clearing = dispatch(p, method, cfg.solver);
    if (!solved(rec.clearing)) {
      rec.error = "clearing failed: " + std::string(lp::to_string(rec.clearing.status));
      return rec;
    }
    rec.settlement = settle(p, rec.clearing, true_bids_of(cfg));
    rec.unidirectional_fraction = unidirectional_fraction_of(rec.clearing);
    rec.feasible = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

RunRecord run_rolling(const SystemConfig& cfg, const Scenario& sc, BidVariant variant,
                      double shift, SolveMethod method, int window) {
  RunRecord rec;
  rec.variant = variant;
  rec.mode = DispatchMode::Rolling;
  rec.shift = shift;
  rec.scenario = sc.index;
  try {
    ClearingProblem full = build_problem(cfg, sc.wind_energy, variant, shift);
    full.validate();
    const std::size_t T = static_cast<std::size_t>(full.horizon);
    const std::size_t ng = full.generators.size();
    const std::size_t ns = full.storages.size();

    ClearingResult st;
    st.gen_energy.assign(ng, std::vector<double>(T, 0.0));
    st.gen_reg_up = st.gen_energy;
    st.gen_reg_down = st.gen_energy;
    st.storage_reg_up.assign(ns, std::vector<double>(T, 0.0));
    st.storage_reg_down = st.storage_reg_up;
    st.storage_soc.assign(ns, std::vector<double>(T + 1, 0.0));
    st.storage_bid_cost.assign(ns, 0.0);
    st.price_up.assign(T, 0.0);
    st.price_down.assign(T, 0.0);

    std::vector<double> socs(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      socs[i] = full.storages[i].initial_soc;
      st.storage_soc[i][0] = socs[i];
    }

    double gen_cost = 0.0;
    for (int t0 = 0; t0 < full.horizon; ++t0) {
      const int len = std::min(window, full.horizon - t0);
      const ClearingProblem w = slice_problem(full, t0, len, socs);
      const ClearingResult res = dispatch(w, method, cfg.solver);
      if (!solved(res)) {
        rec.error = "window at t=" + std::to_string(t0) +
                    " failed: " + std::string(lp::to_string(res.status));
        return rec;
      }
      const std::size_t t = static_cast<std::size_t>(t0);
      for (std::size_t g = 0; g < ng; ++g) {
        st.gen_energy[g][t] = res.gen_energy[g][0];
        st.gen_reg_up[g][t] = res.gen_reg_up[g][0];
        st.gen_reg_down[g][t] = res.gen_reg_down[g][0];
        gen_cost += energy_cost_of(full.generators[g], res.gen_energy[g][0]) +
                    full.generators[g].reg_up_cost * res.gen_reg_up[g][0] +
                    full.generators[g].reg_down_cost * res.gen_reg_down[g][0];
      }
      for (std::size_t i = 0; i < ns; ++i) {
        const double ru = res.storage_reg_up[i][0];
        const double rd = res.storage_reg_down[i][0];
        st.storage_reg_up[i][t] = ru;
        st.storage_reg_down[i][t] = rd;
        // Full-utilization dynamics of the committed interval.
        const StorageBid& bid = full.storages[i].bid;
        socs[i] = std::clamp(socs[i] + bid.efficiency * rd - ru, bid.floor(), bid.ceiling());
        st.storage_soc[i][t + 1] = socs[i];
      }
      st.price_up[t] = res.price_up[0];
      st.price_down[t] = res.price_down[0];
      st.from_mip = st.from_mip || res.from_mip;
      st.degenerate_duals = st.degenerate_duals || res.degenerate_duals;
      st.mip_gap = std::max(st.mip_gap, res.mip_gap);
      st.nodes += res.nodes;
    }

    st.status = lp::SolveStatus::Optimal;
    st.objective = gen_cost;
    for (std::size_t i = 0; i < ns; ++i) {
      st.storage_bid_cost[i] = billed_cost(full.storages[i].bid, st.storage_reg_up[i],
                                           st.storage_reg_down[i], st.storage_soc[i]);
      st.objective += st.storage_bid_cost[i];
    }

    rec.clearing = std::move(st);
    rec.settlement = settle(full, rec.clearing, true_bids_of(cfg));
    rec.unidirectional_fraction = unidirectional_fraction_of(rec.clearing);
    rec.feasible = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

StudyResult run_study(const SystemConfig& cfg) {
  StudyResult out;
  out.scenarios = gen_scenarios(cfg.wind, cfg.study.scenarios, cfg.study.seed, cfg.horizon);

  struct Task {
    BidVariant variant;
    DispatchMode mode;
    double shift;
    int scenario;
  };
  std::vector<Task> tasks;
  for (BidVariant v : cfg.study.variants)
    for (DispatchMode m : cfg.study.modes)
      for (double s : cfg.study.shifts)
        for (int i = 0; i < cfg.study.scenarios; ++i) tasks.push_back({v, m, s, i});

  out.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& tk = tasks[i];
      const Scenario& sc = out.scenarios[static_cast<std::size_t>(tk.scenario)];
      out.records[i] = tk.mode == DispatchMode::OneShot
                           ? run_one_shot(cfg, sc, tk.variant, tk.shift)
                           : run_rolling(cfg, sc, tk.variant, tk.shift, SolveMethod::Auto,
                                         cfg.study.window);
    }
  };
  const int nthreads = std::min<int>(thread_count(), static_cast<int>(tasks.size()) > 0
                                                         ? static_cast<int>(tasks.size())
                                                         : 1);
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::string failures;
  int nfail = 0;
  for (const auto& r : out.records)
    if (!r.feasible) {
      if (nfail < 3)
        failures += "\n  [" + std::string(to_string(r.variant)) + "/" + to_string(r.mode) +
                    " shift=" + num(r.shift) + " scenario=" + std::to_string(r.scenario) +
                    "] " + r.error;
      ++nfail;
    }
  if (nfail > 0)
    throw SolverError("study: " + std::to_string(nfail) + " run(s) failed:" + failures);

  out.cells = aggregate(out.records);
  out.deltas = compare_variants(out.cells);
  return out;
}

std::vector<StudyCell> aggregate(const std::vector<RunRecord>& records) {
  std::vector<StudyCell> cells;
  auto cell_of = [&](const RunRecord& r) -> StudyCell& {
    for (auto& c : cells)
      if (c.variant == r.variant && c.mode == r.mode && c.shift == r.shift) return c;
    StudyCell c;
    c.variant = r.variant;
    c.mode = r.mode;
    c.shift = r.shift;
    cells.push_back(c);
    return cells.back();
  };
  for (const auto& r : records) {
    if (!r.feasible) continue;
    StudyCell& c = cell_of(r);
    ++c.runs;
    c.mean_system_cost += r.settlement.system_cost;
    c.mean_true_system_cost += r.settlement.true_system_cost;
    double pay = 0.0, bid = 0.0, tru = 0.0;
    for (const auto& s : r.settlement.storages) {
      pay += s.payment;
      bid += s.bid_profit;
      tru += s.true_profit;
    }
    c.mean_payment += pay;
    c.mean_bid_profit += bid;
    c.mean_true_profit += tru;
    c.unidirectional_fraction += r.unidirectional_fraction;
  }
  for (auto& c : cells)
    if (c.runs > 0) {
      const double n = c.runs;
      c.mean_system_cost /= n;
      c.mean_true_system_cost /= n;
      c.mean_payment /= n;
      c.mean_bid_profit /= n;
      c.mean_true_profit /= n;
      c.unidirectional_fraction /= n;
    }
  return cells;
}

std::vector<StudyDelta> compare_variants(const std::vector<StudyCell>& cells) {
  std::vector<StudyDelta> out;
  for (const auto& e : cells) {
    if (e.variant != BidVariant::Edcr) continue;
    for (const auto& f : cells) {
      if (f.variant != BidVariant::Flat || f.mode != e.mode || f.shift != e.shift) continue;
      StudyDelta d;
      d.mode = e.mode;
      d.shift = e.shift;
      d.profit_gain_pct =
          100.0 * (e.mean_true_profit - f.mean_true_profit) / std::max(std::abs(f.mean_true_profit), 1e-9);
      d.system_cost_delta_pct =
          100.0 * (e.mean_system_cost - f.mean_system_cost) / std::max(std::abs(f.mean_system_cost), 1e-9);
      out.push_back(d);
    }
  }
  return out;
}

void write_scenario_csv(const SystemConfig& cfg, const StudyResult& r, std::ostream& os) {
  os << "scenario,variant,mode,shift,storage,system_cost,true_system_cost,payment,bid_cost,"
        "bid_profit,true_cost,true_profit\n";
  for (const auto& rec : r.records)
    for (std::size_t i = 0; i < rec.settlement.storages.size(); ++i) {
      const auto& s = rec.settlement.storages[i];
      os << rec.scenario << ',' << to_string(rec.variant) << ',' << to_string(rec.mode) << ','
         << num(rec.shift) << ',' << cfg.storages[i].name << ',' << num(rec.settlement.system_cost)
         << ',' << num(rec.settlement.true_system_cost) << ',' << num(s.payment) << ','
         << num(s.bid_cost) << ',' << num(s.bid_profit) << ',' << num(s.true_cost) << ','
         << num(s.true_profit) << '\n';
    }
}

void write_aggregate_csv(const StudyResult& r, std::ostream& os) {
  os << "variant,mode,shift,runs,mean_system_cost,mean_true_system_cost,mean_payment,"
        "mean_bid_profit,mean_true_profit,unidirectional_fraction\n";
  for (const auto& c : r.cells)
    os << to_string(c.variant) << ',' << to_string(c.mode) << ',' << num(c.shift) << ',' << c.runs
       << ',' << num(c.mean_system_cost) << ',' << num(c.mean_true_system_cost) << ','
       << num(c.mean_payment) << ',' << num(c.mean_bid_profit) << ',' << num(c.mean_true_profit)
       << ',' << num(c.unidirectional_fraction) << '\n';
}

void write_metrics_csv(const StudyResult& r, std::ostream& os) {
  os << "metric,variant,shift,mode,value\n";
  auto row = [&](const char* metric, const std::string& variant, double shift, DispatchMode mode,
                 double value) {
    os << metric << ',' << variant << ',' << num(shift) << ',' << to_string(mode) << ','
       << num(value) << '\n';
  };
  for (const auto& c : r.cells) {
    row("mean_system_cost", to_string(c.variant), c.shift, c.mode, c.mean_system_cost);
    row("mean_true_system_cost", to_string(c.variant), c.shift, c.mode, c.mean_true_system_cost);
    row("mean_payment", to_string(c.variant), c.shift, c.mode, c.mean_payment);
    row("mean_bid_profit", to_string(c.variant), c.shift, c.mode, c.mean_bid_profit);
    row("mean_true_profit", to_string(c.variant), c.shift, c.mode, c.mean_true_profit);
    row("unidirectional_fraction", to_string(c.variant), c.shift, c.mode,
        c.unidirectional_fraction);
  }
  for (const auto& d : r.deltas) {
    row("profit_gain_pct", "edcr_vs_flat", d.shift, d.mode, d.profit_gain_pct);
    row("system_cost_delta_pct", "edcr_vs_flat", d.shift, d.mode, d.system_cost_delta_pct);
  }
}

} // namespace regmkt

// Command-line front end: validate configurations, clear single instances,
// run comparison studies.  Exit codes: 0 success, 1 I/O or config parse
// error, 2 validation error, 3 solver failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regmkt/config.hpp"
#include "regmkt/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw regmkt::ConfigIoError("cannot create output directory '" + dir.string() + "'");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw regmkt::ConfigIoError("cannot write '" + p.string() + "'");
  return os;
}

int cmd_validate(const std::string& config_path) {
  const regmkt::SystemConfig cfg = regmkt::load_config(config_path);
  const std::vector<std::string> problems = regmkt::validate_config(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << "\n";
    return kExitValidation;
  }
  std::cout << "configuration OK: horizon=" << cfg.horizon << " buses=" << cfg.network.buses
            << " generators=" << cfg.generators.size() << "+wind storages=" << cfg.storages.size()
            << "\n";
  for (const auto& a : cfg.storages) {
    std::cout << "  storage " << a.name << ": true bid "
              << (a.true_bid.check_edcr() ? "satisfies" : "does not satisfy")
              << " the equal-ratio condition (" << a.true_bid.pieces() << " pieces)\n";
  }
  return kExitOk;
}

int cmd_clear(const std::string& config_path, const std::string& out_dir,
              const std::string& variant_s, const std::string& method_s, double shift,
              long long seed, bool emit_lp) {
  const regmkt::SystemConfig cfg = regmkt::load_config(config_path);
  {
    const auto problems = regmkt::validate_config(cfg);
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "error: " << p << "\n";
      return kExitValidation;
    }
  }
  const regmkt::BidVariant variant = regmkt::parse_variant(variant_s);
  const regmkt::SolveMethod method = regmkt::parse_method(method_s);

  // Deterministic wind from the mean speeds unless a scenario seed is given.
  std::vector<double> wind(static_cast<std::size_t>(cfg.horizon));
  for (int t = 0; t < cfg.horizon; ++t)
    wind[static_cast<std::size_t>(t)] = cfg.wind.power_at(cfg.wind.mean_speed[static_cast<std::size_t>(t)]);
  if (seed >= 0)
    wind = regmkt::gen_scenarios(cfg.wind, 1, static_cast<std::uint64_t>(seed), cfg.horizon)[0]
               .wind_energy;

  regmkt::ClearingProblem p = regmkt::build_problem(cfg, wind, variant, shift);
  p.validate();

  const bool use_mip = [&] {
    bool all_edcr = true;
    for (const auto& s : p.storages) all_edcr = all_edcr && s.bid.check_edcr();
    if (method == regmkt::SolveMethod::Lp && !all_edcr) {
      // clear_convex would throw the same complaint; fail early with context.
      throw std::domain_error(
          "a bid-in curve fails the equal-ratio condition, so the convex clearing does not "
          "price it correctly; rerun with --method mip");
    }
    return method == regmkt::SolveMethod::Mip || (method == regmkt::SolveMethod::Auto && !all_edcr);
  }();

  if (emit_lp && !out_dir.empty()) {
    ensure_dir(out_dir);
    auto os = open_out(fs::path(out_dir) / "model.lp");
    if (use_mip) {
      regmkt::ExactModel m = regmkt::build_exact_model(p, cfg.solver.big_m);
      regmkt::lp::write_lp_text(m.lp, os, m.binaries);
    } else {
      regmkt::ConvexModel m = regmkt::build_convex_model(p);
      regmkt::lp::write_lp_text(m.lp, os, {});
    }
  }

  regmkt::ClearingResult res;
  if (use_mip) {
    regmkt::MipSettings ms;
    ms.big_m = cfg.solver.big_m;
    if (cfg.solver.mip_gap > 0.0) ms.options.gap_tol = cfg.solver.mip_gap;
    if (cfg.solver.node_limit > 0) ms.options.node_limit = cfg.solver.node_limit;
    res = regmkt::clear_mip(p, ms);
  } else {
    res = regmkt::clear_convex(p);
  }

  const bool ok = res.status == regmkt::lp::SolveStatus::Optimal ||
                  (res.status == regmkt::lp::SolveStatus::NodeLimit && !res.storage_reg_up.empty());
  if (!ok) {
    std::cerr << "error: clearing failed: " << regmkt::lp::to_string(res.status) << "\n";
    return kExitSolver;
  }

  const regmkt::SettlementReport rep = regmkt::settle(p, res, regmkt::true_bids_of(cfg));
  std::cout << "cleared " << regmkt::to_string(variant) << " variant with the "
            << (use_mip ? "exact" : "convex") << " model: status="
            << regmkt::lp::to_string(res.status) << " objective=" << res.objective;
  if (res.from_mip) std::cout << " gap=" << res.mip_gap << " nodes=" << res.nodes;
  std::cout << "\n";
  for (std::size_t i = 0; i < rep.storages.size(); ++i)
    std::cout << "  storage " << p.storages[i].name << ": payment=" << rep.storages[i].payment
              << " bid_cost=" << rep.storages[i].bid_cost
              << " true_profit=" << rep.storages[i].true_profit << "\n";
  if (res.degenerate_duals)
    std::cout << "  note: the clearing LP is degenerate; prices may not be unique\n";

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    {
      auto os = open_out(fs::path(out_dir) / "schedule.csv");
      regmkt::write_schedule_csv(p, res, os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "prices.csv");
      regmkt::write_prices_csv(res, os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "settlement.csv");
      regmkt::write_settlement_csv(p, rep, os);
    }
    std::cout << "wrote schedule.csv, prices.csv, settlement.csv"
              << (emit_lp ? ", model.lp" : "") << " to " << out_dir << "\n";
  }
  return kExitOk;
}

json summary_json(const regmkt::StudyResult& r) {
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"variant", regmkt::to_string(c.variant)},
                     {"mode", regmkt::to_string(c.mode)},
                     {"shift", c.shift},
                     {"runs", c.runs},
                     {"mean_system_cost", c.mean_system_cost},
                     {"mean_true_system_cost", c.mean_true_system_cost},
                     {"mean_payment", c.mean_payment},
                     {"mean_bid_profit", c.mean_bid_profit},
                     {"mean_true_profit", c.mean_true_profit},
                     {"unidirectional_fraction", c.unidirectional_fraction}});
  json deltas = json::array();
  for (const auto& d : r.deltas)
    deltas.push_back({{"mode", regmkt::to_string(d.mode)},
                      {"shift", d.shift},
                      {"profit_gain_pct", d.profit_gain_pct},
                      {"system_cost_delta_pct", d.system_cost_delta_pct}});
  return json{{"cells", cells}, {"deltas", deltas}};
}

int cmd_study(const std::string& config_path, const std::string& out_dir, long long seed,
              int scenarios, const std::string& mode_s, const std::string& variant_s) {
  regmkt::SystemConfig cfg = regmkt::load_config(config_path);
  {
    const auto problems = regmkt::validate_config(cfg);
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "error: " << p << "\n";
      return kExitValidation;
    }
  }
  if (seed >= 0) cfg.study.seed = static_cast<std::uint64_t>(seed);
  if (scenarios > 0) cfg.study.scenarios = scenarios;
  if (!mode_s.empty()) cfg.study.modes = {regmkt::parse_mode(mode_s)};
  if (!variant_s.empty()) cfg.study.variants = {regmkt::parse_variant(variant_s)};
  if (cfg.study.modes.empty() || cfg.study.variants.empty() || cfg.study.shifts.empty()) {
    std::cerr << "error: study plan is empty (variants/modes/shifts)\n";
    return kExitValidation;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const regmkt::StudyResult result = regmkt::run_study(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::cout << "study: " << result.records.size() << " runs over " << cfg.study.scenarios
            << " scenarios in " << secs << "s\n";
  std::cout << "variant   mode     shift  mean_cost      mean_true_profit  unidirectional\n";
  for (const auto& c : result.cells) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-9s %-8s %5g  %-13.6g  %-16.6g  %.4f",
                  regmkt::to_string(c.variant), regmkt::to_string(c.mode), c.shift,
                  c.mean_system_cost, c.mean_true_profit, c.unidirectional_fraction);
    std::cout << line << "\n";
  }
  for (const auto& d : result.deltas) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "equal-ratio vs flat (%s, shift %g): profit %+.3f%% system cost %+.3f%%",
                  regmkt::to_string(d.mode), d.shift, d.profit_gain_pct, d.system_cost_delta_pct);
    std::cout << line << "\n";
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    {
      auto os = open_out(fs::path(out_dir) / "scenario_results.csv");
      regmkt::write_scenario_csv(cfg, result, os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "aggregate.csv");
      regmkt::write_aggregate_csv(result, os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "metrics.csv");
      regmkt::write_metrics_csv(result, os);
    }
    {
      auto os = open_out(fs::path(out_dir) / "study_summary.json");
      os << summary_json(result).dump(2) << "\n";
    }
    std::cout << "wrote scenario_results.csv, aggregate.csv, metrics.csv, study_summary.json to "
              << out_dir << "\n";
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"regulation market clearing with state-dependent storage bids"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::string variant = "edcr", method = "auto", mode, study_variant;
  double shift = 0.0;
  long long seed = -1;
  int scenarios = 0;
  bool emit_lp = false;

  CLI::App* v = app.add_subcommand("validate", "check a configuration file");
  v->add_option("--config", config_path, "configuration JSON")->required();

  CLI::App* c = app.add_subcommand("clear", "clear a single instance");
  c->add_option("--config", config_path, "configuration JSON")->required();
  c->add_option("--out", out_dir, "output directory for CSV files");
  c->add_option("--variant", variant, "bid variant: true|edcr|flat")->capture_default_str();
  c->add_option("--method", method, "solver: auto|lp|mip")->capture_default_str();
  c->add_option("--shift", shift, "requirement shift added to both directions")
      ->capture_default_str();
  c->add_option("--seed", seed, "sample one wind scenario with this seed (default: mean wind)");
  c->add_flag("--emit-lp", emit_lp, "also write the model in LP text format");

  CLI::App* s = app.add_subcommand("study", "run the scenario study from the config");
  s->add_option("--config", config_path, "configuration JSON")->required();
  s->add_option("--out", out_dir, "output directory for CSV/JSON results");
  s->add_option("--seed", seed, "override the study base seed");
  s->add_option("--scenarios", scenarios, "override the scenario count");
  s->add_option("--mode", mode, "restrict to one mode: oneshot|rolling");
  s->add_option("--variant", study_variant, "restrict to one variant: true|edcr|flat");

  try {
    app.parse(argc, argv);
    if (v->parsed()) return cmd_validate(config_path);
    if (c->parsed()) return cmd_clear(config_path, out_dir, variant, method, shift, seed, emit_lp);
    return cmd_study(config_path, out_dir, seed, scenarios, mode, study_variant);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  } catch (const regmkt::ConfigIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const regmkt::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

// hdx: analytic evaluation, simulation and duplex optimization of a two-tier
// hybrid-duplex network. Exit codes: 0 ok, 1 other failure, 2 configuration
// error, 3 I/O error, 4 exhaustive-search budget refusal.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hdx/config.hpp"
#include "hdx/csv.hpp"
#include "hdx/experiments.hpp"
#include "hdx/instance_io.hpp"
#include "hdx/rng.hpp"

namespace fs = std::filesystem;
using namespace hdx;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kBudget = 4 };

struct Common {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 1;
  int snapshots = 60;
  int slots = 20;
  int workers = 1;
  std::string t_grid = "-20:40:0.5";
  double side_m = 5000.0;
};

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(parse_number(tok));
  if (parts.size() != 3) throw ConfigError("--t-grid wants lo:hi:step_db, got '" + spec + "'");
  try {
    return make_threshold_grid(parts[0], parts[1], parts[2]);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--t-grid: ") + e.what());
  }
}

std::vector<double> parse_list(const std::string& spec, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  try {
    while (std::getline(ss, tok, ',')) out.push_back(parse_number(tok));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
  if (out.empty()) throw ConfigError(std::string(flag) + " is empty");
  return out;
}

NetworkParams load_params(const Common& c, double default_user_density_per_km2) {
  NetworkParams p = NetworkParams::defaults();
  p.user_density = default_user_density_per_km2 * kPerKm2;
  if (!c.config.empty()) {
    if (!fs::exists(c.config)) throw IoError("cannot read config " + c.config);
    p = load_config(c.config, p);
  }
  p.validate();
  return p;
}

std::vector<std::string> run_comments(const Common& c, const NetworkParams& p, const char* cmd) {
  std::vector<std::string> out{"command = " + std::string(cmd), "seed = " + std::to_string(c.seed),
                               "snapshots = " + std::to_string(c.snapshots),
                               "slots = " + std::to_string(c.slots)};
  std::stringstream ss(to_config_text(p));
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line.front() != '#' && line.front() != '[') out.push_back("param " + line);
  return out;
}

SimulationConfig sim_config(const Common& c, const NetworkParams& p, const std::vector<double>& grid) {
  SimulationConfig s;
  s.params = p;
  s.side_m = c.side_m;
  s.snapshots = c.snapshots;
  s.slots = c.slots;
  s.seed = c.seed;
  s.workers = c.workers;
  s.grid_db = grid;
  return s;
}

void report(const std::string& what) { std::cout << what << '\n'; }

int cmd_analytic(const Common& c, bool with_se) {
  const NetworkParams p = load_params(c, 50.0);
  const auto grid = parse_grid(c.t_grid);
  const fs::path out(c.out);
  const auto comments = run_comments(c, p, "analytic");
  const auto curves = analytic_curves(p, grid, {}, c.workers);
  write_ccdf_csv(out / "analytic_ccdf.csv", curves, "analytic", comments);
  if (with_se) {
    const auto se = AnalyticModel(p).spectral_efficiency();
    write_se_csv(out / "analytic_se.csv", se, "analytic", comments);
    report("s_total " + format_number(se.s_total));
  }
  report("wrote " + (out / "analytic_ccdf.csv").string());
  return kOk;
}

int cmd_simulate(const Common& c, const std::string& samples_path) {
  const NetworkParams p = load_params(c, 50.0);
  const auto grid = parse_grid(c.t_grid);
  const fs::path out(c.out);
  const auto comments = run_comments(c, p, "simulate");
  std::unique_ptr<CsvWriter> samples;
  if (!samples_path.empty()) {
    samples = std::make_unique<CsvWriter>(
        samples_path, "hdx-samples",
        std::vector<std::string>{"seed", "snapshot", "user", "slot", "channel", "duplex", "link",
                                 "tier", "sinr_db", "signal", "from_bs", "from_user", "rsi",
                                 "noise"},
        comments);
  }
  const auto sink = samples ? std::function<void(std::size_t, const SinrSample&)>(
                                  [&](std::size_t i, const SinrSample& s) {
                                    auto& w = *samples;
                                    w.cell(std::to_string(derive_seed(c.seed, 2, i)));
                                    w.cell(i).cell(static_cast<long long>(s.user));
                                    w.cell(static_cast<long long>(s.slot));
                                    w.cell(channel_name(s.channel)).cell(duplex_name(s.duplex));
                                    w.cell(link_name(s.link)).cell(tier_name(s.tier));
                                    w.cell(linear_to_db(s.sinr)).cell(s.signal);
                                    w.cell(s.from_bs).cell(s.from_user).cell(s.rsi);
                                    w.cell(s.noise).end_row();
                                  })
                            : nullptr;
  const auto res = run_simulation(sim_config(c, p, grid), sink);
  if (samples) samples->close();
  write_ccdf_csv(out / "empirical_ccdf.csv", empirical_curves(res.stats), "simulation", comments);
  write_se_csv(out / "empirical_se.csv", res.stats.spectral_efficiency(), "simulation", comments);
  write_association_csv(out / "association.csv", res.stats.association(),
                        association_probabilities(p));
  report("wrote " + (out / "empirical_ccdf.csv").string());
  return kOk;
}

int cmd_compare(const Common& c) {
  const NetworkParams p = load_params(c, 50.0);
  const auto grid = parse_grid(c.t_grid);
  const fs::path out(c.out);
  const auto comments = run_comments(c, p, "compare");
  const auto analytic = analytic_curves(p, grid, {}, c.workers);
  const auto res = run_simulation(sim_config(c, p, grid));
  const auto empirical = empirical_curves(res.stats);
  const auto rows = compare_curves(analytic, empirical);
  write_comparison_csv(out / "compare.csv", rows, comments);
  write_ccdf_csv(out / "analytic_ccdf.csv", analytic, "analytic", comments);
  write_ccdf_csv(out / "empirical_ccdf.csv", empirical, "simulation", comments);
  report("max_abs_deviation " + format_number(max_abs_deviation(rows)));
  return kOk;
}

struct OptimizeFlags {
  std::string lambda2 = "10,20,30,40";
  double budget = 1e6;
  std::string cells, links;
  bool exhaustive = false;
  std::string form = "printed";
  std::string convention = "printed";
  bool slots_set = false;
  bool snapshots_set = false;
};

RateForm parse_form(const std::string& s) {
  if (s == "printed") return RateForm::Printed;
  if (s == "shannon") return RateForm::Shannon;
  throw ConfigError("--rate-form must be printed or shannon");
}

int cmd_optimize(const Common& c, const OptimizeFlags& f) {
  const fs::path out(c.out);
  const RateForm form = parse_form(f.form);
  if (!f.cells.empty() || !f.links.empty()) {
    if (f.cells.empty() || f.links.empty()) throw ConfigError("--cells and --links go together");
    const ThresholdConvention conv = f.convention == "consistent" ? ThresholdConvention::Consistent
                                     : f.convention == "printed"
                                         ? ThresholdConvention::AsPrinted
                                         : throw ConfigError("--threshold-convention must be printed or consistent");
    const OptimizerInstance inst = read_instance(f.cells, f.links);
    fs::create_directories(out);
    const DuplexAssignment g = greedy_select(inst, form);
    write_assignment(out / "greedy.txt", g, thresholds_from_delta(inst, g.delta, conv), "greedy");
    report("greedy objective " + format_number(g.objective));
    if (f.exhaustive) {
      const DuplexAssignment e = exhaustive_search(inst, f.budget, form);
      write_assignment(out / "exhaustive.txt", e, thresholds_from_delta(inst, e.delta, conv),
                       "exhaustive");
      report("exhaustive objective " + format_number(e.objective));
    }
    return kOk;
  }
  OptimizeConfig cfg = OptimizeConfig::defaults();
  cfg.params = load_params(c, 150.0);
  cfg.lambda2_per_km2 = parse_list(f.lambda2, "--lambda2-sweep");
  cfg.snapshots = f.snapshots_set ? c.snapshots : 200;
  cfg.slots = f.slots_set ? c.slots : 1000;
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  cfg.exhaustive_budget = f.budget;
  cfg.form = form;
  const auto rep = run_optimize(cfg);
  Common shown = c;
  shown.snapshots = cfg.snapshots;
  shown.slots = cfg.slots;
  write_optimize_summary_csv(out / "optimize_summary.csv", rep,
                             run_comments(shown, cfg.params, "optimize"));
  write_optimize_snapshots_csv(out / "optimize_snapshots.csv", rep);
  for (const auto& s : rep.summary) {
    report("lambda2 " + format_number(s.lambda2_per_km2) + " gain_vs_hd " +
           format_number(s.gain_vs_hd) + " win_fraction " + format_number(s.win_fraction));
  }
  return kOk;
}

int cmd_figures_data(const Common& c, const std::string& g1, const std::string& g2,
                     const OptimizeFlags& f) {
  const NetworkParams p = load_params(c, 50.0);
  const auto grid = parse_grid(c.t_grid);
  const fs::path out(c.out);
  const auto g1_list = parse_list(g1, "--gamma1-sweep");
  const auto g2_list = parse_list(g2, "--gamma2-sweep");
  // CCDF overlays.
  cmd_compare(c);
  // Spectral efficiency against the macro threshold, perfect and imperfect SIC,
  // then against the small-cell threshold with perfect SIC.
  auto s1 = analytic_se_sweep(p, Tier::One, g1_list, {-kInf, linear_to_db(p.rsi_ratio)}, {},
                              c.workers);
  write_sweep_csv(out / "se_gamma1_sweep.csv", s1, "analytic");
  auto s2 = analytic_se_sweep(p, Tier::Two, g2_list, {-kInf}, {}, c.workers);
  write_sweep_csv(out / "se_gamma2_sweep.csv", s2, "analytic");
  // Optimization gain against small-cell density.
  OptimizeFlags of = f;
  Common oc = c;
  if (!f.snapshots_set) oc.snapshots = 200;
  if (!f.slots_set) oc.slots = 1000;
  of.snapshots_set = of.slots_set = true;
  of.cells.clear();
  of.links.clear();
  oc.config = c.config;
  cmd_optimize(oc, of);
  report("wrote figure inputs to " + out.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier hybrid-duplex network analysis"};
  app.require_subcommand(1);
  Common c;
  OptimizeFlags of;
  std::string samples_path, g1 = "-inf,-100,-90,-80,-70,-60,-50,-40,inf",
                            g2 = "-inf,-90,-80,-70,-60,-50,-40,inf";
  bool no_se = false;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", c.config, "parameter file (key = value)");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--seed", c.seed, "master seed");
    s->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--t-grid", c.t_grid, "SINR grid lo:hi:step_db");
  };
  auto sim = [&](CLI::App* s) {
    s->add_option("--snapshots", c.snapshots, "network realizations")->check(CLI::PositiveNumber);
    s->add_option("--slots", c.slots, "time slots per realization")->check(CLI::PositiveNumber);
    s->add_option("--side-m", c.side_m, "side of the simulated square (m)")
        ->check(CLI::PositiveNumber);
  };
  auto opt = [&](CLI::App* s) {
    s->add_option("--lambda2-sweep", of.lambda2, "small-cell densities (BS/km^2)");
    s->add_option("--exhaustive-budget", of.budget, "largest lattice to search exhaustively");
    s->add_option("--rate-form", of.form, "printed | shannon");
  };

  auto* a = app.add_subcommand("analytic", "analytic CCDFs and spectral efficiency");
  common(a);
  a->add_flag("--no-se", no_se, "skip the spectral efficiency");
  auto* s = app.add_subcommand("simulate", "Monte Carlo CCDFs and spectral efficiency");
  common(s);
  sim(s);
  s->add_option("--write-samples", samples_path, "also dump every SINR sample to this CSV");
  auto* cmp = app.add_subcommand("compare", "analytic vs simulated CCDFs");
  common(cmp);
  sim(cmp);
  auto* o = app.add_subcommand("optimize", "duplex selection over random layouts or one instance");
  common(o);
  sim(o);
  opt(o);
  o->add_option("--cells", of.cells, "instance cells CSV");
  o->add_option("--links", of.links, "instance links CSV");
  o->add_flag("--exhaustive", of.exhaustive, "also run exhaustive search on the instance");
  o->add_option("--threshold-convention", of.convention, "printed | consistent");
  auto* fd = app.add_subcommand("figures-data", "every CSV the figure scripts read");
  common(fd);
  sim(fd);
  opt(fd);
  fd->add_option("--gamma1-sweep", g1, "macro thresholds (dB; -inf / inf allowed)");
  fd->add_option("--gamma2-sweep", g2, "small-cell thresholds (dB; -inf / inf allowed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  for (auto* sub : {o, fd}) {
    if (sub->parsed()) {
      of.snapshots_set = sub->count("--snapshots") > 0;
      of.slots_set = sub->count("--slots") > 0;
    }
  }

  try {
    if (a->parsed()) return cmd_analytic(c, !no_se);
    if (s->parsed()) return cmd_simulate(c, samples_path);
    if (cmp->parsed()) return cmd_compare(c);
    if (o->parsed()) return cmd_optimize(c, of);
    if (fd->parsed()) return cmd_figures_data(c, g1, g2, of);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget refusal: " << e.what() << '\n';
    return kBudget;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParamError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

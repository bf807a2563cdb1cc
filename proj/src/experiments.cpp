#include "hdx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hdx/csv.hpp"
#include "hdx/rng.hpp"

namespace hdx {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<CurveLabel> all_curve_labels() {
  std::vector<CurveLabel> out(std::begin(kCurveLabels), std::end(kCurveLabels));
  for (const auto& l : kCurveLabels)
    for (Tier k : kTiers) out.push_back(l.with_tier(k));
  return out;
}

std::vector<CcdfCurve> analytic_curves(const NetworkParams& p, std::span<const double> grid_db,
                                       const QuadratureSpec& q, int workers) {
  const auto labels = all_curve_labels();
  std::vector<CcdfCurve> out(labels.size());
  parallel_for(labels.size(), workers, [&](std::size_t i) {
    const AnalyticModel model(p, q);
    out[i] = model.ccdf(labels[i], grid_db);
  });
  return out;
}

std::vector<CcdfCurve> empirical_curves(const SampleAccumulator& stats) {
  std::vector<CcdfCurve> out;
  for (const auto& l : all_curve_labels()) out.push_back(stats.ccdf(l));
  return out;
}

void write_ccdf_csv(const std::filesystem::path& path, const std::vector<CcdfCurve>& curves,
                    const std::string& source, const std::vector<std::string>& comments) {
  CsvWriter w(path, "hdx-ccdf",
              {"label", "channel", "duplex", "link", "tier", "T_db", "probability",
               "ci_half_width", "samples", "source"},
              comments);
  for (const auto& c : curves) {
    const auto& l = c.label;
    for (std::size_t i = 0; i < c.thresholds_db.size(); ++i) {
      w.cell(to_string(l)).cell(channel_name(l.channel)).cell(duplex_name(l.duplex));
      w.cell(link_name(l.link)).cell(tier_name(l.tier)).cell(c.thresholds_db[i]);
      w.cell(c.probabilities[i]);
      w.cell(i < c.ci_half_width.size() ? c.ci_half_width[i] : 0.0);
      w.cell(c.samples).cell(source).end_row();
    }
  }
  w.close();
}

std::vector<ComparisonRow> compare_curves(const std::vector<CcdfCurve>& analytic,
                                          const std::vector<CcdfCurve>& empirical) {
  std::vector<ComparisonRow> rows;
  for (const auto& a : analytic) {
    const auto it = std::find_if(empirical.begin(), empirical.end(),
                                 [&](const CcdfCurve& e) { return e.label == a.label; });
    if (it == empirical.end()) continue;
    if (it->thresholds_db != a.thresholds_db)
      throw std::invalid_argument("curves for " + to_string(a.label) + " use different grids");
    for (std::size_t i = 0; i < a.thresholds_db.size(); ++i) {
      ComparisonRow r;
      r.label = a.label;
      r.t_db = a.thresholds_db[i];
      r.analytic = a.probabilities[i];
      r.empirical = it->probabilities[i];
      r.ci_half_width = i < it->ci_half_width.size() ? it->ci_half_width[i] : 0.0;
      r.samples = it->samples;
      rows.push_back(r);
    }
  }
  return rows;
}

double max_abs_deviation(const std::vector<ComparisonRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.deviation()));
  return m;
}

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows,
                          const std::vector<std::string>& comments) {
  auto all = comments;
  all.push_back("max_abs_deviation = " + format_number(max_abs_deviation(rows)));
  CsvWriter w(path, "hdx-compare",
              {"label", "T_db", "analytic", "empirical", "ci_half_width", "deviation", "samples"},
              all);
  for (const auto& r : rows) {
    w.cell(to_string(r.label)).cell(r.t_db).cell(r.analytic).cell(r.empirical);
    w.cell(r.ci_half_width).cell(r.deviation()).cell(r.samples).end_row();
  }
  w.close();
}

void write_se_csv(const std::filesystem::path& path, const SpectralEfficiencyReport& r,
                  const std::string& source, const std::vector<std::string>& comments) {
  CsvWriter w(path, "hdx-se", {"key", "value", "source"}, comments);
  for (const auto& [k, v] : r.key_values()) w.cell(k).cell(v).cell(source).end_row();
  w.close();
}

void write_association_csv(const std::filesystem::path& path, const AssociationCounts& counts,
                           const AssociationProbabilities& analytic) {
  CsvWriter w(path, "hdx-association",
              {"class", "frequency", "analytic", "ci_half_width", "count", "total"});
  const auto f = counts.frequencies();
  const std::uint64_t n = counts.total();
  auto row = [&](const std::string& name, double freq, double an, std::uint64_t c) {
    w.cell(name).cell(freq).cell(an).cell(wilson_half_width(freq, n));
    w.cell(static_cast<long long>(c)).cell(static_cast<long long>(n)).end_row();
  };
  for (Tier k : kTiers) {
    const std::string t = std::to_string(number(k));
    row("tier" + t + "_FD", f.fd[idx(k)], analytic.fd[idx(k)], counts.fd[idx(k)]);
    row("tier" + t + "_HD", f.hd[idx(k)], analytic.hd[idx(k)], counts.hd[idx(k)]);
    row("tier" + t, f.tier[idx(k)], analytic.tier[idx(k)], counts.fd[idx(k)] + counts.hd[idx(k)]);
  }
  w.close();
}

// ---------------------------------------------------------------------------

PowerThreshold threshold_from_db(double db) {
  if (std::isinf(db)) return db < 0 ? PowerThreshold::zero() : PowerThreshold::infinite();
  return PowerThreshold::from_db(db);
}

std::vector<SweepPoint> analytic_se_sweep(const NetworkParams& p, Tier swept,
                                          const std::vector<double>& gamma_db,
                                          const std::vector<double>& beta_db,
                                          const QuadratureSpec& q, int workers) {
  std::vector<SweepPoint> pts;
  for (double b : beta_db)
    for (double g : gamma_db) {
      SweepPoint s;
      s.beta_db = b;
      s.tier = number(swept);
      s.gamma_db = g;
      pts.push_back(s);
    }
  parallel_for(pts.size(), workers, [&](std::size_t i) {
    NetworkParams v = p;
    v.rsi_ratio = std::isinf(pts[i].beta_db) && pts[i].beta_db < 0 ? 0.0
                                                                   : db_to_linear(pts[i].beta_db);
    v.gamma[idx(swept)] = threshold_from_db(pts[i].gamma_db);
    pts[i].se = AnalyticModel(v, q).spectral_efficiency();
  });
  return pts;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points,
                     const std::string& source) {
  CsvWriter w(path, "hdx-se-sweep",
              {"beta_db", "swept_tier", "gamma_db", "s_total", "s_downlink", "s_uplink", "s_tier1",
               "s_tier2", "source"});
  for (const auto& s : points) {
    w.cell(s.beta_db).cell(s.tier).cell(s.gamma_db).cell(s.se.s_total).cell(s.se.s_downlink);
    w.cell(s.se.s_uplink).cell(s.se.s_tier[0]).cell(s.se.s_tier[1]).cell(source).end_row();
  }
  w.close();
}

// ---------------------------------------------------------------------------

OptimizeConfig OptimizeConfig::defaults() {
  OptimizeConfig c;
  c.params = NetworkParams::defaults();
  c.params.user_density = 150.0 * kPerKm2;
  return c;
}

bool SnapshotOutcome::hybrid_wins() const {
  for (std::size_t k = 1; k < sum_rate.size(); ++k)
    if (!(sum_rate[0] > sum_rate[k])) return false;
  return true;
}

OptimizeReport run_optimize(const OptimizeConfig& cfg) {
  cfg.params.validate();
  if (cfg.lambda2_per_km2.empty()) throw std::invalid_argument("empty small-cell density sweep");
  if (cfg.snapshots <= 0 || cfg.slots <= 0) throw std::invalid_argument("need snapshots and slots");
  OptimizeReport rep;
  const std::size_t per = static_cast<std::size_t>(cfg.snapshots);
  rep.outcomes.resize(cfg.lambda2_per_km2.size() * per);
  parallel_for(rep.outcomes.size(), cfg.workers, [&](std::size_t i) {
    const std::size_t d = i / per;
    const int s = static_cast<int>(i % per);
    NetworkParams p = cfg.params;
    p.bs_density[idx(Tier::Two)] = cfg.lambda2_per_km2[d] * kPerKm2;
    SnapshotOutcome& o = rep.outcomes[i];
    o.lambda2_per_km2 = cfg.lambda2_per_km2[d];
    o.snapshot = s;
    o.seed = derive_seed(derive_seed(cfg.seed, 7, d), 2, static_cast<std::uint64_t>(s));
    SnapshotOptions so;
    so.enforce_region_guard = false;
    // A layout without a single user has nothing to optimize; redraw it.
    Snapshot snap;
    for (std::uint64_t attempt = 0;; ++attempt) {
      snap = sample_snapshot(p, cfg.side_m, derive_seed(o.seed, 8, attempt), so);
      if (!snap.users.empty()) break;
    }
    std::vector<std::uint32_t> cell_bs;
    std::vector<std::vector<std::uint32_t>> members;
    const OptimizerInstance inst = extract_instance(snap, p, &cell_bs, &members);
    o.cells = inst.cells();
    o.users = inst.total_users();
    const DuplexAssignment g = greedy_select(inst, cfg.form);
    o.greedy_steps = g.trace.size() - 1;
    o.model_objective = g.objective;
    if (lattice_size(inst) <= cfg.exhaustive_budget)
      o.exhaustive_objective = exhaustive_search(inst, cfg.exhaustive_budget, cfg.form).objective;
    std::vector<std::pair<Scheme, Delta>> plans{{Scheme::Hybrid, g.delta}};
    for (std::size_t k = 1; k < kSchemes.size(); ++k)
      plans.emplace_back(kSchemes[k], baseline_delta(inst, kSchemes[k]));
    const SchemeRates r =
        simulate_schemes(snap, p, cell_bs, members, plans, cfg.slots, derive_seed(o.seed, 4, 0));
    std::copy(r.sum_rate.begin(), r.sum_rate.end(), o.sum_rate.begin());
  });
  for (std::size_t d = 0; d < cfg.lambda2_per_km2.size(); ++d) {
    DensitySummary s;
    s.lambda2_per_km2 = cfg.lambda2_per_km2[d];
    s.snapshots = per;
    std::size_t wins = 0;
    for (std::size_t i = d * per; i < (d + 1) * per; ++i) {
      const auto& o = rep.outcomes[i];
      for (std::size_t k = 0; k < kSchemes.size(); ++k) s.mean_rate[k] += o.sum_rate[k] / per;
      wins += o.hybrid_wins() ? 1 : 0;
      s.exhaustive_runs += o.exhaustive_objective ? 1 : 0;
    }
    s.win_fraction = static_cast<double>(wins) / static_cast<double>(per);
    s.gain_vs_hd = s.mean_rate[0] / s.mean_rate[1] - 1.0;
    rep.summary.push_back(s);
  }
  return rep;
}

void write_optimize_summary_csv(const std::filesystem::path& path, const OptimizeReport& r,
                                const std::vector<std::string>& comments) {
  std::vector<std::string> cols{"lambda2_per_km2", "snapshots"};
  for (Scheme s : kSchemes) cols.push_back(std::string("rate_") + scheme_name(s));
  for (const char* c : {"gain_vs_hd", "win_fraction", "exhaustive_runs"}) cols.emplace_back(c);
  CsvWriter w(path, "hdx-optimize-summary", cols, comments);
  for (const auto& s : r.summary) {
    w.cell(s.lambda2_per_km2).cell(s.snapshots);
    for (double v : s.mean_rate) w.cell(v);
    w.cell(s.gain_vs_hd).cell(s.win_fraction).cell(s.exhaustive_runs).end_row();
  }
  w.close();
}

void write_optimize_snapshots_csv(const std::filesystem::path& path, const OptimizeReport& r) {
  std::vector<std::string> cols{"lambda2_per_km2", "snapshot", "seed", "cells", "users",
                                "greedy_steps", "model_objective", "exhaustive_objective"};
  for (Scheme s : kSchemes) cols.push_back(std::string("rate_") + scheme_name(s));
  cols.emplace_back("hybrid_wins");
  CsvWriter w(path, "hdx-optimize-snapshots", cols);
  for (const auto& o : r.outcomes) {
    w.cell(o.lambda2_per_km2).cell(o.snapshot).cell(std::to_string(o.seed)).cell(o.cells);
    w.cell(o.users).cell(o.greedy_steps).cell(o.model_objective);
    if (o.exhaustive_objective) {
      w.cell(*o.exhaustive_objective);
    } else {
      w.cell(std::string_view(""));
    }
    for (double v : o.sum_rate) w.cell(v);
    w.cell(o.hybrid_wins() ? 1 : 0).end_row();
  }
  w.close();
}

}  // namespace hdx

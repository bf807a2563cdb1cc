#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hdx/analytic.hpp"
#include "hdx/montecarlo.hpp"
#include "hdx/optimizer.hpp"

namespace hdx {

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads; the first
/// exception thrown by any task is rethrown after all threads stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// --- CCDF tables ------------------------------------------------------------

/// The six mixture curves followed by their per-tier versions.
std::vector<CurveLabel> all_curve_labels();

std::vector<CcdfCurve> analytic_curves(const NetworkParams& p, std::span<const double> grid_db,
                                       const QuadratureSpec& q = {}, int workers = 1);
std::vector<CcdfCurve> empirical_curves(const SampleAccumulator& stats);

/// `label,channel,duplex,link,tier,T_db,probability,ci_half_width,samples`.
void write_ccdf_csv(const std::filesystem::path& path, const std::vector<CcdfCurve>& curves,
                    const std::string& source, const std::vector<std::string>& comments = {});

struct ComparisonRow {
  CurveLabel label;
  double t_db = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double ci_half_width = 0.0;
  std::size_t samples = 0;
  double deviation() const { return analytic - empirical; }
};

std::vector<ComparisonRow> compare_curves(const std::vector<CcdfCurve>& analytic,
                                          const std::vector<CcdfCurve>& empirical);
/// Largest |analytic - empirical| over the rows (0 when empty).
double max_abs_deviation(const std::vector<ComparisonRow>& rows);
void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows,
                          const std::vector<std::string>& comments = {});

/// `key,value` rows of a spectral efficiency report.
void write_se_csv(const std::filesystem::path& path, const SpectralEfficiencyReport& r,
                  const std::string& source, const std::vector<std::string>& comments = {});

/// `class,frequency,analytic,ci_half_width,count,total`.
void write_association_csv(const std::filesystem::path& path, const AssociationCounts& counts,
                           const AssociationProbabilities& analytic);

// --- Threshold sweeps -------------------------------------------------------

/// A threshold in dB relative to 1 W; -inf means zero (all FD), +inf infinity.
PowerThreshold threshold_from_db(double db);

struct SweepPoint {
  double beta_db = 0.0;
  int tier = 1;  // which threshold was swept
  double gamma_db = 0.0;
  SpectralEfficiencyReport se;
};

/// Analytic spectral efficiency with one tier's threshold swept and the
/// other left at its value in `p`, for each beta.
std::vector<SweepPoint> analytic_se_sweep(const NetworkParams& p, Tier swept,
                                          const std::vector<double>& gamma_db,
                                          const std::vector<double>& beta_db,
                                          const QuadratureSpec& q = {}, int workers = 1);

/// `beta_db,swept_tier,gamma_db,s_total,s_downlink,s_uplink,s_tier1,s_tier2,source`.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points,
                     const std::string& source);

// --- Duplex optimization over random layouts --------------------------------

struct OptimizeConfig {
  NetworkParams params;  // lambda2 is overridden per density
  std::vector<double> lambda2_per_km2{10, 20, 30, 40};
  int snapshots = 200;
  int slots = 1000;
  double side_m = 1000.0;
  std::uint64_t seed = 1;
  int workers = 1;
  double exhaustive_budget = 1e6;
  RateForm form = RateForm::Printed;

  /// Settings of the density-sweep experiment: lambda_u = 150 users/km^2.
  static OptimizeConfig defaults();
};

inline constexpr std::array<Scheme, 5> kSchemes{Scheme::Hybrid, Scheme::AllHd, Scheme::AllFd,
                                                Scheme::MacroFdSmallHd, Scheme::MacroHdSmallFd};

struct SnapshotOutcome {
  double lambda2_per_km2 = 0.0;
  int snapshot = 0;
  std::uint64_t seed = 0;
  std::size_t cells = 0;
  std::size_t users = 0;
  std::size_t greedy_steps = 0;
  double model_objective = 0.0;             // greedy objective
  std::optional<double> exhaustive_objective;  // when under budget
  std::array<double, 5> sum_rate{};         // achieved, indexed like kSchemes
  bool hybrid_wins() const;
};

struct DensitySummary {
  double lambda2_per_km2 = 0.0;
  std::array<double, 5> mean_rate{};
  double gain_vs_hd = 0.0;   // mean hybrid / mean all-HD - 1
  double win_fraction = 0.0;  // snapshots where hybrid beats all four baselines
  std::size_t snapshots = 0;
  std::size_t exhaustive_runs = 0;
};

struct OptimizeReport {
  std::vector<SnapshotOutcome> outcomes;
  std::vector<DensitySummary> summary;
};

OptimizeReport run_optimize(const OptimizeConfig& cfg);

/// Per-density table: `lambda2_per_km2,snapshots,rate_<scheme>...,gain_vs_hd,win_fraction,exhaustive_runs`.
void write_optimize_summary_csv(const std::filesystem::path& path, const OptimizeReport& r,
                                const std::vector<std::string>& comments = {});
void write_optimize_snapshots_csv(const std::filesystem::path& path, const OptimizeReport& r);

}  // namespace hdx

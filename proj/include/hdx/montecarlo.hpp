#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hdx/analytic.hpp"
#include "hdx/association.hpp"
#include "hdx/params.hpp"

namespace hdx {

class MonteCarloError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMinDistance = 1e-3;  // m; floor on every link distance
inline constexpr double kWindowFraction = 0.6;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One PPP realization on a square of side `side` (m) with association and
/// duplex classes resolved. BSs are stored flat, tier 1 first.
struct Snapshot {
  double side = 0.0;
  std::uint64_t seed = 0;
  int resamples = 0;  // redraws because no BS was realized at all
  std::array<std::size_t, 2> bs_count{};
  std::vector<double> bs_x, bs_y, bs_power;
  std::vector<Tier> bs_tier;
  std::vector<Point> users;
  std::vector<std::uint32_t> serving;
  std::vector<double> serving_distance;
  std::vector<UserClass> user_class;
  std::vector<std::vector<std::uint32_t>> cell_users;
  std::vector<std::uint32_t> round_robin_offset;

  std::size_t num_bs() const { return bs_x.size(); }
  /// Inside the central window of the given fraction of the side.
  bool in_window(const Point& p, double fraction = kWindowFraction) const;
};

struct SnapshotOptions {
  /// Reject regions narrower than 5 / sqrt(min lambda); small optimizer
  /// layouts turn this off.
  bool enforce_region_guard = true;
};

Snapshot sample_snapshot(const NetworkParams& p, double side_m, std::uint64_t seed,
                         const SnapshotOptions& opt = {});

/// One SINR observation of a measured user. sinr == signal / (from_bs +
/// from_user + rsi + noise).
struct SinrSample {
  Channel channel = Channel::One;
  Link link = Link::Downlink;
  Duplex duplex = Duplex::FD;
  Tier tier = Tier::One;
  double sinr = 0.0;
  double signal = 0.0;
  double from_bs = 0.0;
  double from_user = 0.0;
  double rsi = 0.0;
  double noise = 0.0;
  std::uint32_t user = 0;
  std::uint32_t slot = 0;

  CurveLabel label() const { return {channel, duplex, link, tier}; }
};

using SampleSink = std::function<void(const SinrSample&)>;

/// Measures the given users over `n_slots` slots; each one is treated as the
/// typical user, so its own cell schedules it and contributes no interference.
void measure_users(const Snapshot& s, const NetworkParams& p, int n_slots,
                   std::span<const std::uint32_t> users, const SampleSink& sink);

/// The user nearest the region center (inside the window) as the typical user.
std::vector<SinrSample> measure_typical(const Snapshot& s, const NetworkParams& p, int n_slots);

/// Class of a user placed at the center of a fresh BS realization (the
/// typical user of the Palm distribution). Independent across seeds, which
/// is what a per-user binomial check of the association law needs.
UserClass sample_typical_class(const NetworkParams& p, double side_m, std::uint64_t seed);

/// Users inside the central window.
std::vector<std::uint32_t> window_users(const Snapshot& s, double fraction = kWindowFraction);

struct AssociationCounts {
  std::array<std::uint64_t, 2> fd{};
  std::array<std::uint64_t, 2> hd{};

  std::uint64_t total() const { return fd[0] + fd[1] + hd[0] + hd[1]; }
  void add(UserClass c);
  AssociationProbabilities frequencies() const;
};

/// Wilson score interval half-width at 95%.
double wilson_half_width(double p, std::uint64_t n);

/// Streaming statistics over SINR samples: per-class CCDF counts on a fixed
/// grid, log2(1 + sinr) sums and association counts.
class SampleAccumulator {
 public:
  explicit SampleAccumulator(std::vector<double> grid_db = default_threshold_grid());

  void add(const SinrSample& s);
  void add_user(UserClass c) { assoc_.add(c); }
  /// Order-sensitive only in the floating sums; merge in a fixed order.
  void merge(const SampleAccumulator& o);

  std::uint64_t samples(const CurveLabel& label) const;
  CcdfCurve ccdf(const CurveLabel& label) const;
  double mean_log2(const CurveLabel& label) const;
  SpectralEfficiencyReport spectral_efficiency() const;
  const AssociationCounts& association() const { return assoc_; }
  const std::vector<double>& grid_db() const { return grid_db_; }

 private:
  struct Stats {
    std::vector<std::uint64_t> bins;  // bins[j]: samples exceeding exactly j grid points
    std::uint64_t n = 0;
    double log2_sum = 0.0;
  };
  static std::size_t slot_of(const CurveLabel& label, Tier t);
  std::vector<const Stats*> group(const CurveLabel& label) const;

  std::vector<double> grid_db_;
  std::vector<double> grid_lin_;
  std::array<Stats, 12> stats_;
  AssociationCounts assoc_;
};

CcdfCurve empirical_ccdf(std::span<const SinrSample> samples, const CurveLabel& label,
                         std::span<const double> grid_db);

SpectralEfficiencyReport empirical_spectral_efficiency(std::span<const SinrSample> samples,
                                                       const AssociationProbabilities& weights);

struct SimulationConfig {
  NetworkParams params;
  double side_m = 5000.0;
  int snapshots = 60;
  int slots = 20;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<double> grid_db = default_threshold_grid();
  /// true: every window user is measured; false: only the nearest-center user.
  bool whole_window = true;
  SnapshotOptions snapshot;
};

struct SimulationResult {
  SampleAccumulator stats;
  std::uint64_t resamples = 0;
};

/// Runs all snapshots (concurrently when workers > 1) and reduces them in
/// snapshot order, so the result does not depend on the worker count.
/// `sink`, if set, receives every sample with its snapshot index, in order.
SimulationResult run_simulation(
    const SimulationConfig& cfg,
    const std::function<void(std::size_t, const SinrSample&)>& sink = nullptr);

}  // namespace hdx

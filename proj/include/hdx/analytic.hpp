#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hdx/association.hpp"
#include "hdx/intensity.hpp"
#include "hdx/params.hpp"

namespace hdx {

enum class Channel : std::uint8_t { One = 1, Two = 2 };

/// Identifies one SINR distribution: channel, duplex mode, link direction and
/// either a serving tier or the association-weighted mixture (tier empty).
struct CurveLabel {
  Channel channel = Channel::One;
  Duplex duplex = Duplex::FD;
  Link link = Link::Downlink;
  std::optional<Tier> tier;

  CurveLabel with_tier(std::optional<Tier> t) const {
    CurveLabel c = *this;
    c.tier = t;
    return c;
  }
  friend bool operator==(const CurveLabel&, const CurveLabel&) = default;
};

/// The six distributions the model defines (FD users on both channels and
/// both links, HD users downlink on channel 1 and uplink on channel 2).
inline constexpr std::array<CurveLabel, 6> kCurveLabels{{
    {Channel::One, Duplex::FD, Link::Downlink, std::nullopt},
    {Channel::One, Duplex::FD, Link::Uplink, std::nullopt},
    {Channel::One, Duplex::HD, Link::Downlink, std::nullopt},
    {Channel::Two, Duplex::FD, Link::Downlink, std::nullopt},
    {Channel::Two, Duplex::FD, Link::Uplink, std::nullopt},
    {Channel::Two, Duplex::HD, Link::Uplink, std::nullopt},
}};

bool is_defined(const CurveLabel& c);
std::string channel_name(Channel c);
std::string duplex_name(Duplex d);
std::string link_name(Link l);
std::string tier_name(std::optional<Tier> t);
std::string to_string(const CurveLabel& c);

class CurveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TailTruncationError : public std::runtime_error {
 public:
  TailTruncationError(const std::string& what, double tail, double accumulated)
      : std::runtime_error(what), tail_(tail), accumulated_(accumulated) {}
  double tail() const { return tail_; }
  double accumulated() const { return accumulated_; }

 private:
  double tail_;
  double accumulated_;
};

/// Sampled complementary CDF over a threshold grid in dB. Empirical curves
/// also carry Wilson 95% half-widths and sample counts.
struct CcdfCurve {
  CurveLabel label;
  std::vector<double> thresholds_db;
  std::vector<double> probabilities;
  std::vector<double> ci_half_width;
  std::size_t samples = 0;
};

/// Default grid: -20 dB to 40 dB in 0.5 dB steps.
std::vector<double> default_threshold_grid();
/// Inclusive grid lo:hi:step in dB.
std::vector<double> make_threshold_grid(double lo_db, double hi_db, double step_db);

struct QuadratureSpec {
  double inner_abs_tol = 1e-8;  // Laplace exponents
  double outer_abs_tol = 1e-6;  // distance integral of each CCDF point
  double se_abs_tol = 1e-6;     // threshold integral of each spectral efficiency term
  double f_tail_cutoff = 1e-12; // truncate the distance pdf below this fraction of its peak

  QuadratureSpec halved() const {
    QuadratureSpec q = *this;
    q.inner_abs_tol *= 0.5;
    q.outer_abs_tol *= 0.5;
    q.se_abs_tol *= 0.5;
    return q;
  }
};

struct ModelOptions {
  /// Drop interference from FD users (the "neglected FD-user interference"
  /// approximation); combine with beta = 0 for the perfect-SIC limit.
  bool suppress_fd_user_interference = false;
};

struct SpectralEfficiencyOptions {
  double t_min = 1e-6;  // below this the CCDF is treated as 1
  double t_max = 1e14;
  double max_tail_fraction = 1e-6;
};

struct SpectralEfficiencyTerm {
  CurveLabel label;  // always carries a tier
  double value = 0.0;  // (1/2) E[log2(1 + SINR)] for that class
};

struct SpectralEfficiencyReport {
  double s_total = 0.0;
  double s_downlink = 0.0;
  double s_uplink = 0.0;
  std::array<double, 2> s_tier{};
  std::vector<SpectralEfficiencyTerm> breakdown;

  double term(const CurveLabel& label) const;
  /// Flat key/value view used by the CSV writers.
  std::vector<std::pair<std::string, double>> key_values() const;
};

/// Assembles the report from per-class terms and association weights; shared
/// by the analytic and the empirical estimators.
SpectralEfficiencyReport assemble_report(std::vector<SpectralEfficiencyTerm> terms,
                                         const AssociationProbabilities& weights);

/// Numerical evaluation of the SINR distributions and spectral efficiencies.
/// Holds a Laplace-factor cache, so an instance must not be shared across
/// threads; give each worker its own copy.
class AnalyticModel {
 public:
  explicit AnalyticModel(const NetworkParams& p, QuadratureSpec q = {}, ModelOptions o = {});

  /// Laplace functional of one interferer class of tier t for a tier-k link at
  /// serving distance r and linear threshold T; value in (0, 1].
  double laplace(NodeClass c, Tier k, Tier t, Link dir, double r, double T) const;
  double laplace_exponent(NodeClass c, Tier k, Tier t, Link dir, double r, double T) const;

  /// P(SINR > T | serving distance r) for a tier-specific label.
  double conditional_ccdf(const CurveLabel& label, double r, double T) const;

  /// P(SINR > T) for a tier-specific or mixture label; T linear.
  double ccdf_point(const CurveLabel& label, double T) const;

  CcdfCurve ccdf(const CurveLabel& label, std::span<const double> grid_db) const;
  CcdfCurve ccdf_mixture(Channel ch, Duplex d, Link l, std::span<const double> grid_db) const;

  /// (1/2) E[log2(1 + SINR)] for a tier-specific label.
  double spectral_efficiency_term(const CurveLabel& label,
                                  const SpectralEfficiencyOptions& o = {}) const;
  SpectralEfficiencyReport spectral_efficiency(const SpectralEfficiencyOptions& o = {}) const;

  /// Serving-distance integration range for tier k users of a duplex class.
  std::pair<double, double> distance_range(Tier k, Duplex d) const;

  const NetworkParams& params() const { return params_; }
  const AssociationProbabilities& association() const { return assoc_; }
  const IntensityModel& intensities() const { return intensity_; }
  const QuadratureSpec& quadrature() const { return quad_; }

  /// Interferer classes present in the distribution of a label.
  static std::array<NodeClass, 3> interferers(const CurveLabel& label);

 private:
  struct CacheKey {
    std::uint64_t r_bits, t_bits;
    std::uint8_t cls, k, t, dir;
    friend bool operator==(const CacheKey&, const CacheKey&) = default;
  };
  struct CacheHash {
    std::size_t operator()(const CacheKey& k) const noexcept;
  };

  double signal_power(const CurveLabel& label) const;
  double self_noise(const CurveLabel& label) const;
  double pdf_weight(Tier k, Duplex d) const;

  NetworkParams params_;
  IntensityModel intensity_;
  AssociationProbabilities assoc_;
  QuadratureSpec quad_;
  ModelOptions opts_;
  std::array<double, 2> pdf_density_{};  // lambda_k + lambda_kbar (P_kbar / P_k)^(2/alpha)
  std::array<std::array<double, 2>, 2> uplink_area_ratio_{};  // p^I_{k,t}
  mutable std::unordered_map<CacheKey, double, CacheHash> cache_;
};

/// Specialized closed forms for pure half-duplex networks (every gamma = inf)
/// and for full-duplex networks with perfect SIC and FD-user interference
/// neglected (every gamma = 0). Evaluated through a code path independent of
/// AnalyticModel.
enum class LimitMode : std::uint8_t { HalfOnly, FullOnlyApprox };

struct LimitResult {
  LimitMode mode = LimitMode::HalfOnly;
  std::vector<CcdfCurve> curves;  // downlink and uplink, per tier and mixture
  double s_total = 0.0;
  double s_downlink = 0.0;
  double s_uplink = 0.0;
};

LimitResult limit_forms(LimitMode mode, const NetworkParams& p,
                             std::span<const double> grid_db, const QuadratureSpec& q = {},
                             const SpectralEfficiencyOptions& se = {});

/// Single point of a limit curve (downlink or uplink) for tier k or the mixture.
double limit_ccdf_point(LimitMode mode, const NetworkParams& p, Link link,
                        std::optional<Tier> tier, double T, const QuadratureSpec& q = {});

}  // namespace hdx

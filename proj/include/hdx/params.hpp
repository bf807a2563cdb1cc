#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace hdx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Two-tier network: tier 1 is the macro layer, tier 2 the small-cell layer.
enum class Tier : std::uint8_t { One = 0, Two = 1 };

inline constexpr std::array<Tier, 2> kTiers{Tier::One, Tier::Two};

constexpr std::size_t idx(Tier t) { return static_cast<std::size_t>(t); }
constexpr Tier other(Tier t) { return t == Tier::One ? Tier::Two : Tier::One; }
constexpr int number(Tier t) { return static_cast<int>(t) + 1; }

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unit conversions. Everything inside the library is linear: Watts, meters,
// nodes per square meter.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double ratio);

/// d^-alpha for d in meters. Throws std::domain_error for d <= 0.
double path_loss(double distance_m, double alpha);

/// Thermal noise over `bandwidth_hz` for a density given in dBm/Hz, in Watts.
double noise_power(double bandwidth_hz, double noise_density_dbm_hz);

inline constexpr double kPerKm2 = 1e-6;  // (nodes/km^2) -> (nodes/m^2)

/// Received-power threshold for duplex switching. Zero and infinity are
/// explicit states: zero puts every user of the tier in full duplex, infinity
/// puts every user in half duplex.
class PowerThreshold {
 public:
  enum class Kind : std::uint8_t { Zero, Finite, Infinite };

  constexpr PowerThreshold() = default;

  static constexpr PowerThreshold zero() { return PowerThreshold{Kind::Zero, 0.0}; }
  static constexpr PowerThreshold infinite() { return PowerThreshold{Kind::Infinite, kInf}; }
  static PowerThreshold watts(double w);
  /// dB relative to 1 W; -inf maps to zero() and +inf to infinite().
  static PowerThreshold from_db(double db);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_infinite() const { return kind_ == Kind::Infinite; }
  double watts() const { return watts_; }
  double to_db() const;

  /// True when `received_w` qualifies for full duplex (received >= threshold).
  bool admits(double received_w) const;

  friend bool operator==(const PowerThreshold&, const PowerThreshold&) = default;

 private:
  constexpr PowerThreshold(Kind k, double w) : kind_(k), watts_(w) {}
  Kind kind_ = Kind::Zero;
  double watts_ = 0.0;
};

struct NetworkParams {
  std::array<double, 2> bs_density{};  // per m^2
  double user_density = 0.0;           // per m^2
  std::array<double, 2> bs_power{};    // W
  double user_power = 0.0;             // W
  double alpha = 0.0;
  double rsi_ratio = 0.0;  // beta, linear
  std::array<PowerThreshold, 2> gamma{};
  double bandwidth_hz = 0.0;  // total W, split equally over two channels
  double noise_dbm_hz = -174.0;

  double density(Tier t) const { return bs_density[idx(t)]; }
  double power(Tier t) const { return bs_power[idx(t)]; }
  const PowerThreshold& threshold(Tier t) const { return gamma[idx(t)]; }

  double rsi_bs(Tier t) const { return rsi_ratio * power(t); }
  double rsi_user() const { return rsi_ratio * user_power; }
  double channel_bandwidth() const { return 0.5 * bandwidth_hz; }
  /// Noise power on one channel.
  double noise() const { return noise_power(channel_bandwidth(), noise_dbm_hz); }

  /// Throws ParamError when an invariant is violated.
  void validate() const;

  /// Reference evaluation setting: lambda = {1, 10} BS/km^2, 50 users/km^2,
  /// alpha 3.5, P = {46, 30, 23} dBm, beta -70 dB, W 20 MHz, -174 dBm/Hz,
  /// gamma = {-71, -76} dB.
  static NetworkParams defaults();
};

/// Distances implied by the association and switching rules.
class DerivedScales {
 public:
  explicit DerivedScales(const NetworkParams& p);

  /// Full-duplex radius (P_k / gamma_k)^(1/alpha); +inf for gamma = 0, 0 for
  /// gamma = inf.
  double delta(Tier k) const { return delta_[idx(k)]; }
  /// Distance to the nearest BS of the other tier at the association boundary.
  double mu(Tier k, double x) const;
  /// Exclusion radius r (P_t / P_k)^(1/alpha) of tier t around a user served
  /// by tier k at distance r.
  double cap_delta(Tier k, Tier t, double r) const;
  /// (P_t / P_k)^(1/alpha).
  double power_ratio_root(Tier k, Tier t) const { return ratio_root_[idx(k)][idx(t)]; }

 private:
  std::array<double, 2> delta_{};
  std::array<std::array<double, 2>, 2> ratio_root_{};
};

}  // namespace hdx

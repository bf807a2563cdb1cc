#include "hdx/params.hpp"

#include <cmath>

namespace hdx {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

double path_loss(double distance_m, double alpha) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("path_loss: distance must be positive");
  }
  return std::pow(distance_m, -alpha);
}

double noise_power(double bandwidth_hz, double noise_density_dbm_hz) {
  return dbm_to_watts(noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz));
}

PowerThreshold PowerThreshold::watts(double w) {
  if (std::isnan(w) || w < 0.0) throw ParamError("threshold must be >= 0 W");
  if (w == 0.0) return zero();
  if (std::isinf(w)) return infinite();
  return PowerThreshold{Kind::Finite, w};
}

PowerThreshold PowerThreshold::from_db(double db) {
  if (std::isnan(db)) throw ParamError("threshold dB value is NaN");
  if (db == -kInf) return zero();
  if (db == kInf) return infinite();
  return PowerThreshold{Kind::Finite, db_to_linear(db)};
}

double PowerThreshold::to_db() const {
  switch (kind_) {
    case Kind::Zero:
      return -kInf;
    case Kind::Infinite:
      return kInf;
    case Kind::Finite:
      break;
  }
  return linear_to_db(watts_);
}

bool PowerThreshold::admits(double received_w) const {
  switch (kind_) {
    case Kind::Zero:
      return true;
    case Kind::Infinite:
      return false;
    case Kind::Finite:
      break;
  }
  return received_w >= watts_;
}

void NetworkParams::validate() const {
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw ParamError("alpha must be > 2");
  for (Tier t : kTiers) {
    if (!(density(t) > 0.0) || !std::isfinite(density(t))) {
      throw ParamError("BS densities must be positive");
    }
    if (!(power(t) > 0.0) || !std::isfinite(power(t))) {
      throw ParamError("BS powers must be positive");
    }
  }
  if (!(user_density >= 0.0) || !std::isfinite(user_density)) {
    throw ParamError("user density must be nonnegative");
  }
  if (!(user_power > 0.0) || !std::isfinite(user_power)) {
    throw ParamError("user power must be positive");
  }
  if (!(rsi_ratio >= 0.0) || !std::isfinite(rsi_ratio)) {
    throw ParamError("RSI ratio must be >= 0");
  }
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
    throw ParamError("bandwidth must be positive");
  }
  if (!std::isfinite(noise_dbm_hz)) throw ParamError("noise density must be finite");
}

NetworkParams NetworkParams::defaults() {
  NetworkParams p;
  p.bs_density = {1.0 * kPerKm2, 10.0 * kPerKm2};
  p.user_density = 50.0 * kPerKm2;
  p.bs_power = {dbm_to_watts(46.0), dbm_to_watts(30.0)};
  p.user_power = dbm_to_watts(23.0);
  p.alpha = 3.5;
  p.rsi_ratio = db_to_linear(-70.0);
  p.gamma = {PowerThreshold::from_db(-71.0), PowerThreshold::from_db(-76.0)};
  p.bandwidth_hz = 20e6;
  p.noise_dbm_hz = -174.0;
  return p;
}

DerivedScales::DerivedScales(const NetworkParams& p) {
  for (Tier k : kTiers) {
    const PowerThreshold& g = p.threshold(k);
    if (g.is_zero()) {
      delta_[idx(k)] = kInf;
    } else if (g.is_infinite()) {
      delta_[idx(k)] = 0.0;
    } else {
      delta_[idx(k)] = std::pow(p.power(k) / g.watts(), 1.0 / p.alpha);
    }
    for (Tier t : kTiers) {
      ratio_root_[idx(k)][idx(t)] =
          k == t ? 1.0 : std::pow(p.power(t) / p.power(k), 1.0 / p.alpha);
    }
  }
}

double DerivedScales::mu(Tier k, double x) const {
  if (std::isinf(x)) return kInf;
  return x * ratio_root_[idx(k)][idx(other(k))];
}

double DerivedScales::cap_delta(Tier k, Tier t, double r) const {
  if (std::isinf(r)) return kInf;
  return r * ratio_root_[idx(k)][idx(t)];
}

}  // namespace hdx

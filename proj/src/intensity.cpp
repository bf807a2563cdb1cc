#include "hdx/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hdx {
namespace {

// 1 - exp(-x) for x in [0, inf], without cancellation for small x.
double activity(double x) {
  if (std::isinf(x)) return 1.0;
  return -std::expm1(-x);
}

}  // namespace

ThinnedDensities thinned_densities(const NetworkParams& p) {
  const AssociationProbabilities a = association_probabilities(p);
  ThinnedDensities d;
  for (Tier t : kTiers) {
    const double lambda = p.density(t);
    d.fd[idx(t)] = a.hd[idx(t)] == 0.0 ? lambda : lambda * (a.fd[idx(t)] / a.tier[idx(t)]);
    d.hd[idx(t)] = lambda - d.fd[idx(t)];
  }
  return d;
}

IntensityModel::IntensityModel(const NetworkParams& p)
    : params_(p), scales_(p), thinned_(thinned_densities(p)) {
  for (Tier k : kTiers) {
    for (Tier t : kTiers) {
      // (P_k / P_t)^(1/alpha) is the reciprocal of the stored (P_t / P_k) root.
      const double root = k == t ? 1.0 : 1.0 / scales_.power_ratio_root(k, t);
      zeta_denominator_[idx(k)][idx(t)] = k == t ? 0.0 : std::max(root - 1.0, 0.0);
      const double rr = scales_.power_ratio_root(k, t);
      user_exclusion_density_[idx(k)][idx(t)] = p.density(t) * rr * rr;
    }
  }
}

double IntensityModel::zeta(Link dir, Tier k, Tier t, double r, double y) const {
  const double den = zeta_denominator_[idx(k)][idx(t)];
  if (den == 0.0) return kInf;
  const double span = dir == Link::Downlink ? r + y : y;
  return span / den;
}

double IntensityModel::operator()(const IntensityQuery& q) const {
  const Tier k = q.serving;
  const Tier t = q.interfering;
  const double lu = params_.user_density;
  constexpr double pi = std::numbers::pi;

  switch (q.node) {
    case NodeClass::BsFd: {
      const double lfd = thinned_.fd[idx(t)];
      if (lfd == 0.0) return 0.0;
      const double z = zeta(q.direction, k, t, q.r, q.y);
      return lfd * activity(lu * pi * z * z);
    }
    case NodeClass::BsHd: {
      const double lhd = thinned_.hd[idx(t)];
      if (lhd == 0.0) return 0.0;
      const double dt = scales_.delta(t);
      const double z = zeta(q.direction, k, t, q.r, q.y);
      if (z <= dt) return 0.0;
      if (std::isinf(z)) return lhd;
      return lhd * activity(lu * pi * (z * z - dt * dt));
    }
    case NodeClass::UserFd:
    case NodeClass::UserHd: {
      const double lt = q.node == NodeClass::UserFd ? thinned_.fd[idx(t)] : thinned_.hd[idx(t)];
      if (lt == 0.0) return 0.0;
      const double span = q.direction == Link::Downlink ? q.r + q.y : q.y;
      return lt * activity(pi * span * span * user_exclusion_density_[idx(k)][idx(t)]);
    }
  }
  return 0.0;
}

double intensity(const IntensityQuery& q, const NetworkParams& p) { return IntensityModel(p)(q); }

}  // namespace hdx

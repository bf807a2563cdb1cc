#include "hdx/association.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdx {

UserClass classify_user(double d1, double d2, const NetworkParams& p) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw std::domain_error("classify_user: distances must be positive");
  }
  const double rx1 = p.power(Tier::One) * path_loss(d1, p.alpha);
  const double rx2 = p.power(Tier::Two) * path_loss(d2, p.alpha);
  UserClass c;
  c.tier = rx1 >= rx2 ? Tier::One : Tier::Two;
  const double rx = c.tier == Tier::One ? rx1 : rx2;
  c.duplex = p.threshold(c.tier).admits(rx) ? Duplex::FD : Duplex::HD;
  return c;
}

AssociationProbabilities association_probabilities(const NetworkParams& p) {
  const DerivedScales sc(p);
  const double e = 2.0 / p.alpha;
  const std::array<double, 2> weight{p.density(Tier::One) * std::pow(p.power(Tier::One), e),
                                     p.density(Tier::Two) * std::pow(p.power(Tier::Two), e)};
  const double total = weight[0] + weight[1];

  AssociationProbabilities a;
  for (Tier k : kTiers) {
    const double share = weight[idx(k)] / total;
    const double dk = sc.delta(k);
    // Probability that the serving distance exceeds delta_k given tier k.
    double beyond = 0.0;
    if (dk == 0.0) {
      beyond = 1.0;
    } else if (!std::isinf(dk)) {
      const double mu = sc.mu(k, dk);
      beyond = std::exp(-std::numbers::pi * p.density(k) * dk * dk -
                        std::numbers::pi * p.density(other(k)) * mu * mu);
    }
    a.hd[idx(k)] = share * beyond;
    a.fd[idx(k)] = share * (1.0 - beyond);
    a.tier[idx(k)] = a.fd[idx(k)] + a.hd[idx(k)];
  }
  return a;
}

double duplex_gain(double xi, double eps, double n_d, double n_u, double rsi_d, double rsi_u) {
  const double half = 0.5 * std::log2(1.0 + xi / n_d) + 0.5 * std::log2(1.0 + eps * xi / n_u);
  const double full = std::log2(1.0 + xi / (rsi_d + n_d)) + std::log2(1.0 + eps * xi / (rsi_u + n_u));
  return half - full;
}

}  // namespace hdx

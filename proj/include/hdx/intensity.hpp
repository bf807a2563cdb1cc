#pragma once

#include <array>
#include <cstdint>

#include "hdx/association.hpp"
#include "hdx/params.hpp"

namespace hdx {

enum class Link : std::uint8_t { Downlink, Uplink };

/// Interferer populations seen by a typical link.
enum class NodeClass : std::uint8_t { BsFd, BsHd, UserFd, UserHd };

inline constexpr std::array<NodeClass, 4> kNodeClasses{NodeClass::BsFd, NodeClass::BsHd,
                                                       NodeClass::UserFd, NodeClass::UserHd};

struct IntensityQuery {
  Link direction = Link::Downlink;
  NodeClass node = NodeClass::BsFd;
  Tier serving = Tier::One;
  Tier interfering = Tier::One;
  double r = 0.0;  // typical user to tagged BS (m)
  double y = 0.0;  // interferer to victim (m): victim is the user on the
                   // downlink and the tagged BS on the uplink
};

/// Densities of BSs scheduling FD users and BSs scheduling HD users;
/// fd[t] + hd[t] == lambda_t.
struct ThinnedDensities {
  std::array<double, 2> fd{};
  std::array<double, 2> hd{};
};

ThinnedDensities thinned_densities(const NetworkParams& p);

/// Intensity measure functions of the interferer processes, conditioned on
/// the serving distance r. Each BS class is thinned by the probability that
/// its coverage disc of radius zeta holds at least one (FD or HD) user; user
/// classes are thinned by the probability that their BS is not the tagged one.
class IntensityModel {
 public:
  explicit IntensityModel(const NetworkParams& p);

  double operator()(const IntensityQuery& q) const;

  /// Coverage radius of an interfering tier-t BS, +inf when the serving tier
  /// does not out-power the interfering tier.
  double zeta(Link dir, Tier k, Tier t, double r, double y) const;

  const ThinnedDensities& thinned() const { return thinned_; }
  const DerivedScales& scales() const { return scales_; }
  const NetworkParams& params() const { return params_; }

 private:
  NetworkParams params_;
  DerivedScales scales_;
  ThinnedDensities thinned_;
  // max{(P_k / P_t)^(1/alpha) - 1, 0}, indexed [k][t].
  std::array<std::array<double, 2>, 2> zeta_denominator_{};
  // lambda_t (P_t / P_k)^(2/alpha), indexed [k][t].
  std::array<std::array<double, 2>, 2> user_exclusion_density_{};
};

/// One-shot convenience wrapper around IntensityModel.
double intensity(const IntensityQuery& q, const NetworkParams& p);

}  // namespace hdx

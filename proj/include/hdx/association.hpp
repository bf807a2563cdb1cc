#pragma once

#include <array>
#include <cstdint>

#include "hdx/params.hpp"

namespace hdx {

enum class Duplex : std::uint8_t { FD, HD };

struct UserClass {
  Tier tier = Tier::One;
  Duplex duplex = Duplex::HD;
  friend bool operator==(const UserClass&, const UserClass&) = default;
};

/// Max-average-received-power association followed by the received-power
/// duplex rule. `d1`, `d2` are distances (m) to the nearest BS of each tier.
/// Exact power ties go to tier 1; received power equal to gamma_k is FD.
UserClass classify_user(double d1, double d2, const NetworkParams& p);

/// Closed-form probabilities that the typical user is an FD / HD user of each
/// tier. `tier[k]` is defined as fd[k] + hd[k].
struct AssociationProbabilities {
  std::array<double, 2> fd{};
  std::array<double, 2> hd{};
  std::array<double, 2> tier{};

  double of(Tier k, Duplex d) const { return d == Duplex::FD ? fd[idx(k)] : hd[idx(k)]; }
};

AssociationProbabilities association_probabilities(const NetworkParams& p);

/// Rate difference (bits/s/Hz) between half duplex and full duplex for a user
/// whose average downlink received power is `xi`. Positive means half duplex
/// is the better mode. `eps` is the user-to-BS transmit power ratio, `n_d` and
/// `n_u` the downlink/uplink interference-plus-noise, `rsi_d` / `rsi_u` the
/// residual self-interference at the user and at its BS.
double duplex_gain(double xi, double eps, double n_d, double n_u, double rsi_d, double rsi_u);

}  // namespace hdx

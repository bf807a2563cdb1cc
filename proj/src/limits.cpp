// Closed forms of the two limit regimes, written out directly from the
// network parameters. Deliberately shares no formula code with AnalyticModel
// so the two can be checked against each other.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hdx/analytic.hpp"
#include "radial.hpp"

namespace hdx {
namespace {

constexpr double kPi = std::numbers::pi;

class LimitEvaluator {
 public:
  LimitEvaluator(LimitMode mode, const NetworkParams& p, const QuadratureSpec& q)
      : mode_(mode), p_(p), q_(q) {
    p_.validate();
    if (mode_ == LimitMode::FullOnlyApprox) p_.rsi_ratio = 0.0;
    const double e = 2.0 / p_.alpha;
    double total = 0.0;
    for (Tier k : kTiers) total += p_.density(k) * std::pow(p_.power(k), e);
    for (Tier k : kTiers) {
      share_[idx(k)] = p_.density(k) * std::pow(p_.power(k), e) / total;
      const Tier o = other(k);
      spread_[idx(k)] = p_.density(k) + p_.density(o) * std::pow(p_.power(o) / p_.power(k), e);
    }
  }

  double share(Tier k) const { return share_[idx(k)]; }

  double ccdf(Link link, Tier k, double T) const {
    const double c = spread_[idx(k)];
    const double rmax = detail::pdf_tail_radius(c, 0.0, q_.f_tail_cutoff);
    const double psig = link == Link::Downlink ? p_.power(k) : p_.user_power;
    const double sigma2 = p_.noise();
    const double a = p_.alpha;
    const double r_noise = std::pow(psig / (T * sigma2), 1.0 / a);
    const double r_dense = std::pow(T, -1.0 / a) / std::sqrt(kPi * c);
    const auto pts = detail::outer_points(0.0, rmax, c, std::min(r_noise, r_dense));
    const double norm = 2.0 * kPi * p_.density(k) / share_[idx(k)];
    auto f = [&](double r) {
      if (!(r > 0.0)) return 0.0;
      const double noise = T * std::pow(r, a) * sigma2 / psig;
      return norm * r * std::exp(-kPi * c * r * r - noise - exponent(link, k, r, T));
    };
    quad::Options opt;
    opt.abs_tol = q_.outer_abs_tol;
    return std::clamp(quad::integrate_panels(f, pts, opt).value, 0.0, 1.0);
  }

  double mixture(Link link, double T) const {
    double s = 0.0;
    for (Tier k : kTiers) s += share_[idx(k)] * ccdf(link, k, T);
    return std::clamp(s, 0.0, 1.0);
  }

 private:
  // Sum over tiers of the interference exponents.
  double exponent(Link link, Tier k, double r, double T) const {
    const double a = p_.alpha;
    const double lu = p_.user_density;
    const double ra = std::pow(r, a);
    double total = 0.0;
    for (Tier t : kTiers) {
      const double lt = p_.density(t);
      const double up = std::pow(p_.power(t) / p_.power(k), 1.0 / a);  // (P_t/P_k)^(1/a)
      const double den = std::max(1.0 / up - 1.0, 0.0);
      const double excl = r * up;
      std::vector<double> scales;
      detail::add_scale(scales, r);
      detail::add_scale(scales, 1.0 / std::sqrt(kPi * lu));
      detail::add_scale(scales, 1.0 / std::sqrt(kPi * lt));
      const double tol = q_.inner_abs_tol / (2.0 * kPi);

      if (link == Link::Downlink) {
        // Every BS of tier t outside r (P_t/P_k)^(1/a), active when it covers a user.
        const double cc = T * ra * p_.power(t) / p_.power(k);
        detail::add_scale(scales, std::pow(cc, 1.0 / a));
        detail::add_scale(scales, excl);
        auto g = [&](double y) {
          const double cover = den == 0.0 ? kInf : (r + y) / den;
          const double act = std::isinf(cover) ? 1.0 : -std::expm1(-lu * kPi * cover * cover);
          return lt * act * y * detail::kernel(cc, y, a);
        };
        total += detail::radial_integral(g, excl, kInf, scales, a, tol);
      } else if (mode_ == LimitMode::HalfOnly) {
        // Uplink users of tier t, thinned by the chance their BS is the tagged one.
        const double cc = T * ra;
        detail::add_scale(scales, std::pow(cc, 1.0 / a));
        const double dens = lt * up * up;
        auto g = [&](double y) {
          return lt * -std::expm1(-kPi * y * y * dens) * y * detail::kernel(cc, y, a);
        };
        total += detail::radial_integral(g, 0.0, kInf, scales, a, tol);
      } else {
        // Downlink BSs hitting the tagged BS; only a fraction of the disc of
        // radius excl + r can hold them.
        const double cc = T * ra * p_.power(t) / p_.user_power;
        const double edge = excl + r;
        detail::add_scale(scales, std::pow(cc, 1.0 / a));
        detail::add_scale(scales, edge);
        const double rt = std::pow(p_.power(t), 1.0 / a);
        const double rk = std::pow(p_.power(k), 1.0 / a);
        const double frac = 1.0 - (rt / (rt + rk)) * (rt / (rt + rk));
        auto g = [&](double y) {
          const double cover = den == 0.0 ? kInf : y / den;
          const double act = std::isinf(cover) ? 1.0 : -std::expm1(-lu * kPi * cover * cover);
          return lt * act * y * detail::kernel(cc, y, a);
        };
        total += frac * detail::radial_integral(g, 0.0, edge, scales, a, tol) +
                 detail::radial_integral(g, edge, kInf, scales, a, tol);
      }
    }
    return 2.0 * kPi * total;
  }

  LimitMode mode_;
  NetworkParams p_;
  QuadratureSpec q_;
  std::array<double, 2> share_{};
  std::array<double, 2> spread_{};
};

CurveLabel limit_label(LimitMode mode, Link link, std::optional<Tier> tier) {
  if (mode == LimitMode::HalfOnly) {
    return link == Link::Downlink ? CurveLabel{Channel::One, Duplex::HD, Link::Downlink, tier}
                                  : CurveLabel{Channel::Two, Duplex::HD, Link::Uplink, tier};
  }
  return CurveLabel{Channel::One, Duplex::FD, link, tier};
}

}  // namespace

double limit_ccdf_point(LimitMode mode, const NetworkParams& p, Link link,
                        std::optional<Tier> tier, double T, const QuadratureSpec& q) {
  const LimitEvaluator ev(mode, p, q);
  return tier ? ev.ccdf(link, *tier, T) : ev.mixture(link, T);
}

LimitResult limit_forms(LimitMode mode, const NetworkParams& p,
                             std::span<const double> grid_db, const QuadratureSpec& q,
                             const SpectralEfficiencyOptions& se) {
  const LimitEvaluator ev(mode, p, q);
  LimitResult out;
  out.mode = mode;
  for (Link link : {Link::Downlink, Link::Uplink}) {
    for (std::optional<Tier> tier : {std::optional<Tier>(Tier::One),
                                     std::optional<Tier>(Tier::Two), std::optional<Tier>()}) {
      CcdfCurve c;
      c.label = limit_label(mode, link, tier);
      c.thresholds_db.assign(grid_db.begin(), grid_db.end());
      for (double tdb : grid_db) {
        const double T = db_to_linear(tdb);
        c.probabilities.push_back(tier ? ev.ccdf(link, *tier, T) : ev.mixture(link, T));
      }
      out.curves.push_back(std::move(c));
    }
  }
  // Half duplex: each link gets one of the two channels. Full duplex: both
  // links use both channels, which doubles the resource.
  const double resource = mode == LimitMode::HalfOnly ? 1.0 : 2.0;
  for (Tier k : kTiers) {
    for (Link link : {Link::Downlink, Link::Uplink}) {
      const double s = detail::threshold_integral(
          [&](double T) { return ev.ccdf(link, k, T); }, se, p.alpha, q.se_abs_tol,
          to_string(limit_label(mode, link, k)));
      (link == Link::Downlink ? out.s_downlink : out.s_uplink) += resource * ev.share(k) * s;
    }
  }
  out.s_total = out.s_downlink + out.s_uplink;
  return out;
}

}  // namespace hdx

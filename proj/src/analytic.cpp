#include "hdx/analytic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "radial.hpp"

namespace hdx {

namespace {
constexpr double kPi = std::numbers::pi;
}

bool is_defined(const CurveLabel& c) {
  if (c.duplex == Duplex::FD) return true;
  return (c.channel == Channel::One && c.link == Link::Downlink) ||
         (c.channel == Channel::Two && c.link == Link::Uplink);
}

std::string channel_name(Channel c) { return c == Channel::One ? "1" : "2"; }
std::string duplex_name(Duplex d) { return d == Duplex::FD ? "FD" : "HD"; }
std::string link_name(Link l) { return l == Link::Downlink ? "D" : "U"; }
std::string tier_name(std::optional<Tier> t) {
  return t ? std::to_string(number(*t)) : std::string("mixture");
}
std::string to_string(const CurveLabel& c) {
  return "ch" + channel_name(c.channel) + "_" + duplex_name(c.duplex) + "_" + link_name(c.link) +
         "_" + (c.tier ? "tier" + tier_name(c.tier) : tier_name(c.tier));
}

std::vector<double> make_threshold_grid(double lo_db, double hi_db, double step_db) {
  if (!(step_db > 0.0) || !(hi_db >= lo_db) || !std::isfinite(lo_db) || !std::isfinite(hi_db)) {
    throw std::invalid_argument("threshold grid needs finite lo <= hi and step > 0");
  }
  const auto n = static_cast<long>(std::floor((hi_db - lo_db) / step_db + 1e-9));
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) g.push_back(lo_db + static_cast<double>(i) * step_db);
  return g;
}

std::vector<double> default_threshold_grid() { return make_threshold_grid(-20.0, 40.0, 0.5); }

double SpectralEfficiencyReport::term(const CurveLabel& label) const {
  for (const auto& t : breakdown) {
    if (t.label == label) return t.value;
  }
  return 0.0;
}

std::vector<std::pair<std::string, double>> SpectralEfficiencyReport::key_values() const {
  std::vector<std::pair<std::string, double>> kv{{"s_total", s_total},
                                                 {"s_downlink", s_downlink},
                                                 {"s_uplink", s_uplink},
                                                 {"s_tier1", s_tier[0]},
                                                 {"s_tier2", s_tier[1]}};
  for (const auto& t : breakdown) kv.emplace_back("S_" + to_string(t.label), t.value);
  return kv;
}

SpectralEfficiencyReport assemble_report(std::vector<SpectralEfficiencyTerm> terms,
                                         const AssociationProbabilities& weights) {
  SpectralEfficiencyReport rep;
  std::array<double, 2> per_tier{};
  for (const auto& t : terms) {
    if (!t.label.tier) throw CurveError("spectral efficiency terms must carry a tier");
    const Tier k = *t.label.tier;
    const double w = weights.of(k, t.label.duplex) * t.value;
    rep.s_total += w;
    (t.label.link == Link::Downlink ? rep.s_downlink : rep.s_uplink) += w;
    per_tier[idx(k)] += w;
  }
  for (Tier k : kTiers) {
    const double a = weights.tier[idx(k)];
    rep.s_tier[idx(k)] = a > 0.0 ? per_tier[idx(k)] / a : 0.0;
  }
  rep.breakdown = std::move(terms);
  return rep;
}

std::size_t AnalyticModel::CacheHash::operator()(const CacheKey& k) const noexcept {
  std::uint64_t h = k.r_bits * 0x9E3779B97F4A7C15ULL;
  h ^= k.t_bits + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
  const std::uint64_t tag = (std::uint64_t{k.cls} << 24) | (std::uint64_t{k.k} << 16) |
                            (std::uint64_t{k.t} << 8) | k.dir;
  h ^= tag + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

AnalyticModel::AnalyticModel(const NetworkParams& p, QuadratureSpec q, ModelOptions o)
    : params_(p), intensity_(p), assoc_(association_probabilities(p)), quad_(q), opts_(o) {
  params_.validate();
  const auto& sc = intensity_.scales();
  for (Tier k : kTiers) {
    const double rr = sc.power_ratio_root(k, other(k));
    pdf_density_[idx(k)] = p.density(k) + p.density(other(k)) * rr * rr;
    for (Tier t : kTiers) {
      const double at = std::pow(p.power(t), 1.0 / p.alpha);
      const double ak = std::pow(p.power(k), 1.0 / p.alpha);
      const double share = at / (at + ak);
      uplink_area_ratio_[idx(k)][idx(t)] = 1.0 - share * share;
    }
  }
}

std::array<NodeClass, 3> AnalyticModel::interferers(const CurveLabel& label) {
  if (label.channel == Channel::One) return {NodeClass::BsFd, NodeClass::UserFd, NodeClass::BsHd};
  return {NodeClass::BsFd, NodeClass::UserFd, NodeClass::UserHd};
}

double AnalyticModel::laplace(NodeClass c, Tier k, Tier t, Link dir, double r, double T) const {
  return std::exp(-laplace_exponent(c, k, t, dir, r, T));
}

double AnalyticModel::laplace_exponent(NodeClass c, Tier k, Tier t, Link dir, double r,
                                       double T) const {
  if (!(T > 0.0)) return 0.0;
  if (opts_.suppress_fd_user_interference && c == NodeClass::UserFd) return 0.0;
  const auto& th = intensity_.thinned();
  const bool fd_class = c == NodeClass::BsFd || c == NodeClass::UserFd;
  if ((fd_class ? th.fd[idx(t)] : th.hd[idx(t)]) == 0.0) return 0.0;

  const CacheKey key{std::bit_cast<std::uint64_t>(r), std::bit_cast<std::uint64_t>(T),
                     static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(k),
                     static_cast<std::uint8_t>(t), static_cast<std::uint8_t>(dir)};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const auto& sc = intensity_.scales();
  const double alpha = params_.alpha;
  const double ra = std::pow(r, alpha);
  const double pk = params_.power(k);
  const double pt = params_.power(t);
  const double pu = params_.user_power;
  const double rr = sc.power_ratio_root(k, t);  // (P_t / P_k)^(1/alpha)
  const double dt = sc.delta(t);
  const bool bs = c == NodeClass::BsFd || c == NodeClass::BsHd;

  double cc = 0.0;
  if (dir == Link::Downlink) {
    cc = T * ra * (bs ? pt : pu) / pk;
  } else {
    cc = bs ? T * ra * pt / pu : T * ra;
  }

  IntensityQuery q{dir, c, k, t, r, 0.0};
  auto integrand = [&](double y) {
    q.y = y;
    const double lam = intensity_(q);
    return lam == 0.0 ? 0.0 : lam * y * detail::kernel(cc, y, alpha);
  };

  std::vector<double> scales;
  detail::add_scale(scales, std::pow(cc, 1.0 / alpha));
  detail::add_scale(scales, r);
  detail::add_scale(scales, 1.0 / std::sqrt(kPi * params_.user_density));
  detail::add_scale(scales, 1.0 / std::sqrt(kPi * params_.density(t)));
  if (dt > 0.0 && std::isfinite(dt)) {
    detail::add_scale(scales, dt);
    detail::add_scale(scales, dt / rr);
  }

  const double tol = quad_.inner_abs_tol / (2.0 * kPi);
  double integral = 0.0;
  if (dir == Link::Downlink) {
    double lo = 0.0;
    switch (c) {
      case NodeClass::BsFd:
      case NodeClass::BsHd: lo = sc.cap_delta(k, t, r); break;
      case NodeClass::UserFd: lo = std::max(r * rr - dt, 0.0); break;
      case NodeClass::UserHd: lo = std::max(dt / rr - r, 0.0); break;
    }
    if (std::isfinite(lo)) {
      detail::add_scale(scales, lo);
      integral = detail::radial_integral(integrand, lo, kInf, scales, alpha, tol);
    }
  } else if (bs) {
    // Inside Delta + r only the fraction p^I of the ring can hold interferers.
    const double edge = sc.cap_delta(k, t, r) + r;
    detail::add_scale(scales, edge);
    const double near = detail::radial_integral(integrand, 0.0, edge, scales, alpha, tol);
    const double far = detail::radial_integral(integrand, edge, kInf, scales, alpha, tol);
    integral = uplink_area_ratio_[idx(k)][idx(t)] * near + far;
  } else {
    const double lo = c == NodeClass::UserFd ? std::max((rr - 1.0) * r - dt, 0.0) : dt / rr;
    if (std::isfinite(lo)) {
      detail::add_scale(scales, lo);
      integral = detail::radial_integral(integrand, lo, kInf, scales, alpha, tol);
    }
  }

  const double e = 2.0 * kPi * integral;
  if (cache_.size() > (1u << 20)) cache_.clear();
  cache_.emplace(key, e);
  return e;
}

double AnalyticModel::signal_power(const CurveLabel& label) const {
  return label.link == Link::Downlink ? params_.power(*label.tier) : params_.user_power;
}

double AnalyticModel::self_noise(const CurveLabel& label) const {
  double n = params_.noise();
  if (label.duplex == Duplex::FD) {
    n += label.link == Link::Downlink ? params_.rsi_user() : params_.rsi_bs(*label.tier);
  }
  return n;
}

double AnalyticModel::pdf_weight(Tier k, Duplex d) const {
  return 2.0 * kPi * params_.density(k) / assoc_.of(k, d);
}

std::pair<double, double> AnalyticModel::distance_range(Tier k, Duplex d) const {
  const double dk = intensity_.scales().delta(k);
  const double c = pdf_density_[idx(k)];
  if (d == Duplex::FD) {
    if (dk == 0.0) throw CurveError("tier " + tier_name(k) + " has no full-duplex users");
    return {0.0, std::min(dk, detail::pdf_tail_radius(c, 0.0, quad_.f_tail_cutoff))};
  }
  if (std::isinf(dk)) throw CurveError("tier " + tier_name(k) + " has no half-duplex users");
  return {dk, detail::pdf_tail_radius(c, dk, quad_.f_tail_cutoff)};
}

double AnalyticModel::conditional_ccdf(const CurveLabel& label, double r, double T) const {
  if (!is_defined(label)) throw CurveError("undefined curve " + to_string(label));
  if (!label.tier) throw CurveError("conditional CCDF needs a serving tier");
  const Tier k = *label.tier;
  double e = T * std::pow(r, params_.alpha) * self_noise(label) / signal_power(label);
  for (NodeClass c : interferers(label)) {
    for (Tier t : kTiers) e += laplace_exponent(c, k, t, label.link, r, T);
  }
  return std::exp(-e);
}

double AnalyticModel::ccdf_point(const CurveLabel& label, double T) const {
  if (!is_defined(label)) throw CurveError("undefined curve " + to_string(label));
  if (!label.tier) {
    double num = 0.0, den = 0.0;
    for (Tier k : kTiers) {
      const double w = assoc_.of(k, label.duplex);
      if (w <= 0.0) continue;
      num += w * ccdf_point(label.with_tier(k), T);
      den += w;
    }
    if (den <= 0.0) throw CurveError("no users of class " + to_string(label));
    return std::clamp(num / den, 0.0, 1.0);
  }
  const Tier k = *label.tier;
  if (assoc_.of(k, label.duplex) <= 0.0) {
    throw CurveError("no users of class " + to_string(label));
  }
  const auto [a, b] = distance_range(k, label.duplex);
  const double c = pdf_density_[idx(k)];
  const double w = pdf_weight(k, label.duplex);
  const double alpha = params_.alpha;

  // Where the conditional CCDF turns over: noise-limited or density-limited.
  const double r_noise = std::pow(signal_power(label) / (T * self_noise(label)), 1.0 / alpha);
  const double r_dense = std::pow(T, -1.0 / alpha) / std::sqrt(kPi * c);
  const auto pts = detail::outer_points(a, b, c, std::min(r_noise, r_dense));

  auto integrand = [&](double r) {
    if (!(r > 0.0)) return 0.0;
    const double f = r * std::exp(-kPi * c * r * r);
    return w * f * conditional_ccdf(label, r, T);
  };
  quad::Options opt;
  opt.abs_tol = quad_.outer_abs_tol;
  return std::clamp(quad::integrate_panels(integrand, pts, opt).value, 0.0, 1.0);
}

CcdfCurve AnalyticModel::ccdf(const CurveLabel& label, std::span<const double> grid_db) const {
  if (!is_defined(label)) throw CurveError("undefined curve " + to_string(label));
  for (std::size_t i = 1; i < grid_db.size(); ++i) {
    if (!(grid_db[i] > grid_db[i - 1])) throw CurveError("threshold grid must be strictly increasing");
  }
  CcdfCurve out;
  out.label = label;
  out.thresholds_db.assign(grid_db.begin(), grid_db.end());
  out.probabilities.reserve(grid_db.size());
  for (double tdb : grid_db) out.probabilities.push_back(ccdf_point(label, db_to_linear(tdb)));
  return out;
}

CcdfCurve AnalyticModel::ccdf_mixture(Channel ch, Duplex d, Link l,
                                      std::span<const double> grid_db) const {
  return ccdf(CurveLabel{ch, d, l, std::nullopt}, grid_db);
}

double AnalyticModel::spectral_efficiency_term(const CurveLabel& label,
                                               const SpectralEfficiencyOptions& o) const {
  if (!label.tier) throw CurveError("spectral efficiency terms need a serving tier");
  return detail::threshold_integral([&](double T) { return ccdf_point(label, T); }, o,
                                    params_.alpha, quad_.se_abs_tol, to_string(label));
}

SpectralEfficiencyReport AnalyticModel::spectral_efficiency(
    const SpectralEfficiencyOptions& o) const {
  std::vector<SpectralEfficiencyTerm> terms;
  for (const CurveLabel& base : kCurveLabels) {
    for (Tier k : kTiers) {
      if (assoc_.of(k, base.duplex) <= 0.0) continue;
      const CurveLabel label = base.with_tier(k);
      terms.push_back({label, spectral_efficiency_term(label, o)});
    }
  }
  return assemble_report(std::move(terms), assoc_);
}

}  // namespace hdx

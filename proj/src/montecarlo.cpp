#include "hdx/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "hdx/kernels.hpp"
#include "hdx/rng.hpp"

namespace hdx {

bool Snapshot::in_window(const Point& p, double fraction) const {
  const double margin = 0.5 * (1.0 - fraction) * side;
  return p.x >= margin && p.x <= side - margin && p.y >= margin && p.y <= side - margin;
}

Snapshot sample_snapshot(const NetworkParams& p, double side_m, std::uint64_t seed,
                         const SnapshotOptions& opt) {
  p.validate();
  if (!(side_m > 0.0) || !std::isfinite(side_m)) {
    throw MonteCarloError("region side must be positive and finite");
  }
  if (opt.enforce_region_guard) {
    double lmin = kInf;
    for (Tier t : kTiers) {
      if (p.density(t) > 0.0) lmin = std::min(lmin, p.density(t));
    }
    const double need = 5.0 / std::sqrt(lmin);
    if (side_m < need) {
      throw MonteCarloError("region side " + std::to_string(side_m) + " m is below the guard " +
                            std::to_string(need) + " m");
    }
  }

  Snapshot s;
  s.side = side_m;
  s.seed = seed;
  const double area = side_m * side_m;
  std::optional<Rng> rng;
  for (;;) {
    rng.emplace(derive_seed(seed, 0, static_cast<std::uint64_t>(s.resamples)));
    for (Tier t : kTiers) s.bs_count[idx(t)] = rng->poisson(p.density(t) * area);
    if (s.bs_count[0] + s.bs_count[1] > 0) break;
    ++s.resamples;
  }

  for (Tier t : kTiers) {
    for (std::size_t i = 0; i < s.bs_count[idx(t)]; ++i) {
      s.bs_x.push_back(rng->uniform(0.0, side_m));
      s.bs_y.push_back(rng->uniform(0.0, side_m));
      s.bs_power.push_back(p.power(t));
      s.bs_tier.push_back(t);
    }
  }
  const std::size_t nu = rng->poisson(p.user_density * area);
  s.users.resize(nu);
  for (auto& u : s.users) {
    u.x = rng->uniform(0.0, side_m);
    u.y = rng->uniform(0.0, side_m);
  }

  // argmin of d^2 P^(-2/alpha) is argmax of P d^(-alpha).
  const std::size_t nb = s.num_bs();
  std::vector<double> scale(nb);
  for (std::size_t j = 0; j < nb; ++j) scale[j] = std::pow(s.bs_power[j], -2.0 / p.alpha);
  s.serving.resize(nu);
  s.serving_distance.resize(nu);
  s.user_class.resize(nu);
  s.cell_users.assign(nb, {});
  for (std::size_t u = 0; u < nu; ++u) {
    const auto j = kernels::argmin_scaled_dist(s.bs_x.data(), s.bs_y.data(), scale.data(), nb,
                                               s.users[u].x, s.users[u].y);
    const double d = std::hypot(s.bs_x[j] - s.users[u].x, s.bs_y[j] - s.users[u].y);
    const Tier t = s.bs_tier[j];
    const double rx = s.bs_power[j] * std::pow(std::max(d, kMinDistance), -p.alpha);
    s.serving[u] = static_cast<std::uint32_t>(j);
    s.serving_distance[u] = d;
    s.user_class[u] = {t, p.threshold(t).admits(rx) ? Duplex::FD : Duplex::HD};
    s.cell_users[j].push_back(static_cast<std::uint32_t>(u));
  }
  s.round_robin_offset.resize(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    s.round_robin_offset[j] = static_cast<std::uint32_t>(rng->below(s.cell_users[j].size()));
  }
  return s;
}

UserClass sample_typical_class(const NetworkParams& p, double side_m, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 3, 0));
  const double area = side_m * side_m;
  const double c = 0.5 * side_m;
  double best = kInf;
  double best_rx = 0.0;
  UserClass cls;
  bool any = false;
  while (!any) {
    for (Tier t : kTiers) {
      const double scale = std::pow(p.power(t), -2.0 / p.alpha);
      const auto n = rng.poisson(p.density(t) * area);
      for (std::uint64_t i = 0; i < n; ++i) {
        const double dx = rng.uniform(0.0, side_m) - c;
        const double dy = rng.uniform(0.0, side_m) - c;
        const double v = (dx * dx + dy * dy) * scale;
        if (v < best) {
          best = v;
          cls.tier = t;
          best_rx = p.power(t) * std::pow(std::max(std::sqrt(dx * dx + dy * dy), kMinDistance), -p.alpha);
        }
        any = true;
      }
    }
  }
  cls.duplex = p.threshold(cls.tier).admits(best_rx) ? Duplex::FD : Duplex::HD;
  return cls;
}

std::vector<std::uint32_t> window_users(const Snapshot& s, double fraction) {
  std::vector<std::uint32_t> out;
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    if (s.in_window(s.users[u], fraction)) out.push_back(static_cast<std::uint32_t>(u));
  }
  return out;
}

namespace {

struct UplinkSums {
  double ch1_bs = 0.0, ch2_bs = 0.0, ch1_user = 0.0, ch2_user = 0.0;
};

void draw_fading(Rng& rng, std::vector<double>& uni, std::vector<double>& out) {
  for (double& u : uni) u = rng.uniform_open0();
  kernels::neg_log(uni.data(), uni.size(), out.data());
}

}  // namespace

void measure_users(const Snapshot& s, const NetworkParams& p, int n_slots,
                   std::span<const std::uint32_t> users, const SampleSink& sink) {
  const std::size_t nb = s.num_bs();
  if (nb == 0 || users.empty() || n_slots <= 0) return;
  const double alpha = p.alpha;
  const double pu = p.user_power;
  const double noise = p.noise();

  // Static gains: every BS to each measured user, every BS to each serving BS.
  std::vector<double> gain_bs_user(users.size() * nb);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const Point& u = s.users[users[i]];
    kernels::path_gain(s.bs_x.data(), s.bs_y.data(), nb, u.x, u.y, alpha, kMinDistance,
                       gain_bs_user.data() + i * nb);
  }
  std::vector<std::uint32_t> cells;
  for (auto u : users) cells.push_back(s.serving[u]);
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  auto cell_row = [&](std::uint32_t c) {
    return static_cast<std::size_t>(std::lower_bound(cells.begin(), cells.end(), c) - cells.begin());
  };
  std::vector<double> gain_bs_bs(cells.size() * nb);
  for (std::size_t r = 0; r < cells.size(); ++r) {
    kernels::path_gain(s.bs_x.data(), s.bs_y.data(), nb, s.bs_x[cells[r]], s.bs_y[cells[r]], alpha,
                       kMinDistance, gain_bs_bs.data() + r * nb);
  }

  // Per-slot transmit weights: BS power on channel 1 (any active cell) and
  // channel 2 (FD cells); user power on channel 1 (FD users) and 2 (any).
  std::vector<double> w_bs1(nb), w_bs2(nb), w_u1(nb), w_u2(nb);
  std::vector<double> sx(nb), sy(nb), ug(nb), uni(2 * nb + 2), fade(2 * nb + 2);
  std::vector<UplinkSums> ul(cells.size());

  auto with_cell_muted = [&](std::uint32_t c, auto&& fn) {
    const double a = w_bs1[c], b = w_bs2[c], d = w_u1[c], e = w_u2[c];
    w_bs1[c] = w_bs2[c] = w_u1[c] = w_u2[c] = 0.0;
    fn();
    w_bs1[c] = a;
    w_bs2[c] = b;
    w_u1[c] = d;
    w_u2[c] = e;
  };

  for (int slot = 0; slot < n_slots; ++slot) {
    Rng rng(derive_seed(s.seed, 1, static_cast<std::uint64_t>(slot)));
    for (std::size_t m = 0; m < nb; ++m) {
      const auto& cu = s.cell_users[m];
      if (cu.empty()) {
        w_bs1[m] = w_bs2[m] = w_u1[m] = w_u2[m] = 0.0;
        sx[m] = s.bs_x[m];
        sy[m] = s.bs_y[m];
        continue;
      }
      const auto su = cu[(s.round_robin_offset[m] + static_cast<std::size_t>(slot)) % cu.size()];
      const bool fd = s.user_class[su].duplex == Duplex::FD;
      w_bs1[m] = s.bs_power[m];
      w_bs2[m] = fd ? s.bs_power[m] : 0.0;
      w_u1[m] = fd ? pu : 0.0;
      w_u2[m] = pu;
      sx[m] = s.users[su].x;
      sy[m] = s.users[su].y;
    }

    std::vector<double> uni_ul(2 * nb), fade_ul(2 * nb);
    for (std::size_t r = 0; r < cells.size(); ++r) {
      const std::uint32_t c = cells[r];
      draw_fading(rng, uni_ul, fade_ul);
      kernels::path_gain(sx.data(), sy.data(), nb, s.bs_x[c], s.bs_y[c], alpha, kMinDistance,
                         ug.data());
      const double* g = gain_bs_bs.data() + r * nb;
      const double* hb = fade_ul.data();
      const double* hu = fade_ul.data() + nb;
      with_cell_muted(c, [&] {
        ul[r].ch1_bs = kernels::dot3(g, hb, w_bs1.data(), nb);
        ul[r].ch2_bs = kernels::dot3(g, hb, w_bs2.data(), nb);
        ul[r].ch1_user = kernels::dot3(ug.data(), hu, w_u1.data(), nb);
        ul[r].ch2_user = kernels::dot3(ug.data(), hu, w_u2.data(), nb);
      });
    }

    for (std::size_t i = 0; i < users.size(); ++i) {
      const std::uint32_t u = users[i];
      const std::uint32_t c = s.serving[u];
      const UserClass cls = s.user_class[u];
      const Point& pos = s.users[u];
      draw_fading(rng, uni, fade);
      kernels::path_gain(sx.data(), sy.data(), nb, pos.x, pos.y, alpha, kMinDistance, ug.data());
      const double* g = gain_bs_user.data() + i * nb;
      const double* hb = fade.data();
      const double* hu = fade.data() + nb;
      double d1_bs = 0.0, d2_bs = 0.0, d1_user = 0.0, d2_user = 0.0;
      with_cell_muted(c, [&] {
        d1_bs = kernels::dot3(g, hb, w_bs1.data(), nb);
        d2_bs = kernels::dot3(g, hb, w_bs2.data(), nb);
        d1_user = kernels::dot3(ug.data(), hu, w_u1.data(), nb);
        d2_user = kernels::dot3(ug.data(), hu, w_u2.data(), nb);
      });
      const double h_down = fade[2 * nb];
      const double h_up = fade[2 * nb + 1];
      const double g0 = std::pow(std::max(s.serving_distance[u], kMinDistance), -alpha);
      const UplinkSums& us = ul[cell_row(c)];
      const bool fd = cls.duplex == Duplex::FD;

      auto emit = [&](Channel ch, Link link, double signal, double from_bs, double from_user,
                      double rsi) {
        SinrSample x;
        x.channel = ch;
        x.link = link;
        x.duplex = cls.duplex;
        x.tier = cls.tier;
        x.signal = signal;
        x.from_bs = from_bs;
        x.from_user = from_user;
        x.rsi = rsi;
        x.noise = noise;
        x.sinr = signal / (from_bs + from_user + rsi + noise);
        x.user = u;
        x.slot = static_cast<std::uint32_t>(slot);
        sink(x);
      };
      const double s_down = s.bs_power[c] * g0 * h_down;
      const double s_up = pu * g0 * h_up;
      if (fd) {
        const double rsi_user = p.rsi_user();
        const double rsi_bs = p.rsi_bs(cls.tier);
        emit(Channel::One, Link::Downlink, s_down, d1_bs, d1_user, rsi_user);
        emit(Channel::Two, Link::Downlink, s_down, d2_bs, d2_user, rsi_user);
        emit(Channel::One, Link::Uplink, s_up, us.ch1_bs, us.ch1_user, rsi_bs);
        emit(Channel::Two, Link::Uplink, s_up, us.ch2_bs, us.ch2_user, rsi_bs);
      } else {
        emit(Channel::One, Link::Downlink, s_down, d1_bs, d1_user, 0.0);
        emit(Channel::Two, Link::Uplink, s_up, us.ch2_bs, us.ch2_user, 0.0);
      }
    }
  }
}

std::vector<SinrSample> measure_typical(const Snapshot& s, const NetworkParams& p, int n_slots) {
  const double cx = 0.5 * s.side;
  double best = kInf;
  std::optional<std::uint32_t> pick;
  for (auto u : window_users(s)) {
    const double d = std::hypot(s.users[u].x - cx, s.users[u].y - cx);
    if (d < best) {
      best = d;
      pick = u;
    }
  }
  if (!pick) throw MonteCarloError("no user inside the central window");
  std::vector<SinrSample> out;
  const std::uint32_t one[1] = {*pick};
  measure_users(s, p, n_slots, one, [&](const SinrSample& x) { out.push_back(x); });
  return out;
}

void AssociationCounts::add(UserClass c) {
  (c.duplex == Duplex::FD ? fd : hd)[idx(c.tier)] += 1;
}

AssociationProbabilities AssociationCounts::frequencies() const {
  AssociationProbabilities a;
  const double n = static_cast<double>(total());
  if (n == 0.0) return a;
  for (Tier k : kTiers) {
    a.fd[idx(k)] = static_cast<double>(fd[idx(k)]) / n;
    a.hd[idx(k)] = static_cast<double>(hd[idx(k)]) / n;
    a.tier[idx(k)] = a.fd[idx(k)] + a.hd[idx(k)];
  }
  return a;
}

double wilson_half_width(double p, std::uint64_t n) {
  if (n == 0) return 1.0;
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  return z / (1.0 + z * z / nn) * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
}

SampleAccumulator::SampleAccumulator(std::vector<double> grid_db) : grid_db_(std::move(grid_db)) {
  for (std::size_t i = 1; i < grid_db_.size(); ++i) {
    if (!(grid_db_[i] > grid_db_[i - 1])) {
      throw std::invalid_argument("threshold grid must be strictly increasing");
    }
  }
  for (double g : grid_db_) grid_lin_.push_back(db_to_linear(g));
  for (auto& st : stats_) st.bins.assign(grid_db_.size() + 1, 0);
}

std::size_t SampleAccumulator::slot_of(const CurveLabel& label, Tier t) {
  const CurveLabel base = label.with_tier(std::nullopt);
  for (std::size_t i = 0; i < kCurveLabels.size(); ++i) {
    if (kCurveLabels[i] == base) return 2 * i + idx(t);
  }
  throw CurveError("undefined curve " + to_string(label));
}

void SampleAccumulator::add(const SinrSample& s) {
  Stats& st = stats_[slot_of(s.label(), s.tier)];
  const auto j = std::lower_bound(grid_lin_.begin(), grid_lin_.end(), s.sinr) - grid_lin_.begin();
  st.bins[static_cast<std::size_t>(j)] += 1;
  st.n += 1;
  st.log2_sum += std::log2(1.0 + s.sinr);
}

void SampleAccumulator::merge(const SampleAccumulator& o) {
  if (o.grid_db_ != grid_db_) throw std::invalid_argument("merging accumulators with different grids");
  for (std::size_t i = 0; i < stats_.size(); ++i) {
    for (std::size_t j = 0; j < stats_[i].bins.size(); ++j) stats_[i].bins[j] += o.stats_[i].bins[j];
    stats_[i].n += o.stats_[i].n;
    stats_[i].log2_sum += o.stats_[i].log2_sum;
  }
  for (Tier k : kTiers) {
    assoc_.fd[idx(k)] += o.assoc_.fd[idx(k)];
    assoc_.hd[idx(k)] += o.assoc_.hd[idx(k)];
  }
}

std::vector<const SampleAccumulator::Stats*> SampleAccumulator::group(const CurveLabel& label) const {
  std::vector<const Stats*> out;
  if (label.tier) {
    out.push_back(&stats_[slot_of(label, *label.tier)]);
  } else {
    for (Tier t : kTiers) out.push_back(&stats_[slot_of(label, t)]);
  }
  return out;
}

std::uint64_t SampleAccumulator::samples(const CurveLabel& label) const {
  std::uint64_t n = 0;
  for (const Stats* st : group(label)) n += st->n;
  return n;
}

CcdfCurve SampleAccumulator::ccdf(const CurveLabel& label) const {
  const auto g = group(label);
  const std::uint64_t n = samples(label);
  if (n == 0) throw MonteCarloError("no samples for " + to_string(label));
  CcdfCurve c;
  c.label = label;
  c.thresholds_db = grid_db_;
  c.samples = n;
  // A sample exceeds grid point j when it lies above at least j + 1 points.
  std::uint64_t above = n;
  for (std::size_t j = 0; j < grid_db_.size(); ++j) {
    for (const Stats* st : g) above -= st->bins[j];
    const double prob = static_cast<double>(above) / static_cast<double>(n);
    c.probabilities.push_back(prob);
    c.ci_half_width.push_back(wilson_half_width(prob, n));
  }
  return c;
}

double SampleAccumulator::mean_log2(const CurveLabel& label) const {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (const Stats* st : group(label)) {
    sum += st->log2_sum;
    n += st->n;
  }
  if (n == 0) throw MonteCarloError("no samples for " + to_string(label));
  return sum / static_cast<double>(n);
}

SpectralEfficiencyReport SampleAccumulator::spectral_efficiency() const {
  std::vector<SpectralEfficiencyTerm> terms;
  for (const CurveLabel& base : kCurveLabels) {
    for (Tier k : kTiers) {
      const CurveLabel label = base.with_tier(k);
      if (samples(label) == 0) continue;
      terms.push_back({label, 0.5 * mean_log2(label)});
    }
  }
  return assemble_report(std::move(terms), assoc_.frequencies());
}

CcdfCurve empirical_ccdf(std::span<const SinrSample> samples, const CurveLabel& label,
                         std::span<const double> grid_db) {
  SampleAccumulator acc(std::vector<double>(grid_db.begin(), grid_db.end()));
  for (const auto& s : samples) acc.add(s);
  return acc.ccdf(label);
}

SpectralEfficiencyReport empirical_spectral_efficiency(std::span<const SinrSample> samples,
                                                       const AssociationProbabilities& weights) {
  SampleAccumulator acc(std::vector<double>{0.0});
  for (const auto& s : samples) acc.add(s);
  std::vector<SpectralEfficiencyTerm> terms;
  for (const CurveLabel& base : kCurveLabels) {
    for (Tier k : kTiers) {
      const CurveLabel label = base.with_tier(k);
      if (acc.samples(label) == 0) continue;
      terms.push_back({label, 0.5 * acc.mean_log2(label)});
    }
  }
  return assemble_report(std::move(terms), weights);
}

SimulationResult run_simulation(const SimulationConfig& cfg,
                                const std::function<void(std::size_t, const SinrSample&)>& sink) {
  if (cfg.snapshots < 0 || cfg.slots <= 0) throw MonteCarloError("snapshots >= 0 and slots > 0 required");
  const int workers = std::max(1, cfg.workers);
  SimulationResult result{SampleAccumulator(cfg.grid_db), 0};

  struct Unit {
    std::optional<SampleAccumulator> acc;
    std::vector<SinrSample> samples;
    int resamples = 0;
  };
  auto run_one = [&](std::size_t i, Unit& out) {
    const Snapshot s =
        sample_snapshot(cfg.params, cfg.side_m, derive_seed(cfg.seed, 2, i), cfg.snapshot);
    out.acc.emplace(cfg.grid_db);
    out.resamples = s.resamples;
    std::vector<std::uint32_t> users = window_users(s);
    if (!cfg.whole_window && !users.empty()) {
      const double cx = 0.5 * s.side;
      auto d = [&](std::uint32_t u) { return std::hypot(s.users[u].x - cx, s.users[u].y - cx); };
      const auto best = *std::min_element(users.begin(), users.end(),
                                          [&](auto a, auto b) { return d(a) < d(b); });
      users = {best};
    }
    for (auto u : users) out.acc->add_user(s.user_class[u]);
    measure_users(s, cfg.params, cfg.slots, users, [&](const SinrSample& x) {
      out.acc->add(x);
      if (sink) out.samples.push_back(x);
    });
  };

  const std::size_t total = static_cast<std::size_t>(cfg.snapshots);
  const std::size_t batch = static_cast<std::size_t>(workers) * 4;
  for (std::size_t start = 0; start < total; start += batch) {
    const std::size_t end = std::min(total, start + batch);
    std::vector<Unit> units(end - start);
    std::atomic<std::size_t> next{start};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < end;) run_one(i, units[i - start]);
      } catch (...) {
        const std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(end);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = start; i < end; ++i) {
      Unit& u = units[i - start];
      result.stats.merge(*u.acc);
      result.resamples += static_cast<std::uint64_t>(u.resamples);
      if (sink) {
        for (const auto& x : u.samples) sink(i, x);
      }
    }
  }
  return result;
}

}  // namespace hdx

#include "hdx/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <thread>

#include "hdx/kernels.hpp"
#include "hdx/rng.hpp"

namespace hdx {
namespace {

double log_rate(double p, double den, RateForm form) {
  return form == RateForm::Printed ? std::log2(p / den) : std::log1p(p / den) / std::numbers::ln2;
}

// Mantissa/exponent product so a whole cell costs one log2.
struct LogProduct {
  double mant = 1.0;
  long exp = 0;
  void mul(double v) {
    mant *= v;
    if (mant > 0x1.0p400 || mant < 0x1.0p-400) {
      int e = 0;
      mant = std::frexp(mant, &e);
      exp += e;
    }
  }
  double log2() const { return std::log2(mant) + static_cast<double>(exp); }
};

void check_delta(const OptimizerInstance& inst, const Delta& d) {
  if (d.size() != inst.cells()) throw std::invalid_argument("delta has wrong length");
  for (std::size_t m = 0; m < d.size(); ++m) {
    if (d[m] > inst.n[m]) throw std::invalid_argument("delta exceeds the cell's user count");
  }
}

// Geometry shared by snapshot extraction and synthetic instances.
struct CellGeometry {
  std::vector<double> bs_x, bs_y, bs_p;
  std::vector<Tier> tier;
  std::vector<std::vector<Point>> users;  // per cell, any order
};

double gain(double x0, double y0, double x1, double y1, double alpha) {
  const double d = std::max(std::hypot(x1 - x0, y1 - y0), kMinDistance);
  return std::pow(d, -alpha);
}

OptimizerInstance build(CellGeometry g, const NetworkParams& p,
                        std::vector<std::vector<std::uint32_t>>* order) {
  const std::size_t M = g.bs_x.size();
  OptimizerInstance inst;
  inst.n.resize(M);
  inst.tier = g.tier;
  inst.p_down.resize(M);
  inst.p_up.resize(M);
  inst.rsi_bs.resize(M);
  inst.omega.resize(M);
  inst.rsi_user = p.rsi_user();
  inst.sigma2 = p.noise();
  if (order) order->assign(M, {});
  for (std::size_t m = 0; m < M; ++m) {
    auto& us = g.users[m];
    std::vector<double> gm(us.size());
    for (std::size_t u = 0; u < us.size(); ++u)
      gm[u] = gain(g.bs_x[m], g.bs_y[m], us[u].x, us[u].y, p.alpha);
    std::vector<std::uint32_t> idx(us.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return gm[a] > gm[b]; });
    std::vector<Point> sorted;
    for (auto i : idx) {
      sorted.push_back(us[i]);
      inst.p_down[m].push_back(g.bs_p[m] * gm[i]);
      inst.p_up[m].push_back(p.user_power * gm[i]);
    }
    us = std::move(sorted);
    if (order) (*order)[m] = idx;
    inst.n[m] = us.size();
    inst.rsi_bs[m] = p.rsi_ratio * g.bs_p[m];
    inst.omega[m] = p.bandwidth_hz / static_cast<double>(us.size());
  }
  inst.i_bs2user.assign(M, std::vector<std::vector<double>>(M));
  inst.i_user2user.assign(M, std::vector<std::vector<double>>(M));
  inst.i_bs2bs.assign(M, std::vector<double>(M, 0.0));
  inst.i_user2bs.assign(M, std::vector<double>(M, 0.0));
  for (std::size_t n = 0; n < M; ++n) {
    // A user of cell n is stood in for by its BS, scaled to user power.
    const double eps = p.user_power / g.bs_p[n];
    for (std::size_t m = 0; m < M; ++m) {
      auto& a = inst.i_bs2user[n][m];
      auto& b = inst.i_user2user[n][m];
      a.assign(inst.n[m], 0.0);
      b.assign(inst.n[m], 0.0);
      if (n == m) continue;
      for (std::size_t u = 0; u < inst.n[m]; ++u) {
        a[u] = g.bs_p[n] * gain(g.bs_x[n], g.bs_y[n], g.users[m][u].x, g.users[m][u].y, p.alpha);
        b[u] = eps * a[u];
      }
      inst.i_bs2bs[n][m] = g.bs_p[n] * gain(g.bs_x[n], g.bs_y[n], g.bs_x[m], g.bs_y[m], p.alpha);
      inst.i_user2bs[n][m] = eps * inst.i_bs2bs[n][m];
    }
  }
  return inst;
}

}  // namespace

std::size_t OptimizerInstance::total_users() const {
  return std::accumulate(n.begin(), n.end(), std::size_t{0});
}

void OptimizerInstance::validate() const {
  const std::size_t M = cells();
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (M == 0) fail("instance has no cells");
  if (tier.size() != M || p_down.size() != M || p_up.size() != M || rsi_bs.size() != M ||
      omega.size() != M || i_bs2user.size() != M || i_user2user.size() != M ||
      i_bs2bs.size() != M || i_user2bs.size() != M)
    fail("instance arrays disagree on the cell count");
  if (!(sigma2 > 0.0) || rsi_user < 0.0) fail("noise must be positive and RSI nonnegative");
  for (std::size_t m = 0; m < M; ++m) {
    if (n[m] == 0) fail("cell without users");
    if (p_down[m].size() != n[m] || p_up[m].size() != n[m]) fail("power row has wrong length");
    for (std::size_t u = 0; u < n[m]; ++u) {
      if (!(p_down[m][u] > 0.0) || !(p_up[m][u] > 0.0)) fail("powers must be positive");
      if (u > 0 && p_down[m][u] > p_down[m][u - 1]) fail("p_down row is not nonincreasing");
    }
    if (rsi_bs[m] < 0.0 || !(omega[m] > 0.0)) fail("bad RSI or omega");
    for (std::size_t k = 0; k < M; ++k) {
      if (i_bs2user[k].size() != M || i_user2user[k].size() != M || i_bs2bs[k].size() != M ||
          i_user2bs[k].size() != M)
        fail("interference table has wrong shape");
      if (i_bs2user[k][m].size() != n[m] || i_user2user[k][m].size() != n[m])
        fail("interference row has wrong length");
      for (std::size_t u = 0; u < n[m]; ++u) {
        if (i_bs2user[k][m][u] < 0.0 || i_user2user[k][m][u] < 0.0) fail("negative interference");
      }
      if (i_bs2bs[k][m] < 0.0 || i_user2bs[k][m] < 0.0) fail("negative interference");
    }
  }
}

UserRates user_rates(const OptimizerInstance& inst, const Delta& delta, std::size_t m,
                     std::size_t u, RateForm form) {
  check_delta(inst, delta);
  double du_a = 0.0, du_b = 0.0;  // user side: sum(I + x I'), sum(x I + I')
  double bs_a = 0.0, bs_b = 0.0;  // BS side, same split
  for (std::size_t n = 0; n < inst.cells(); ++n) {
    if (n == m) continue;
    const double x = static_cast<double>(delta[n]) / static_cast<double>(inst.n[n]);
    du_a += inst.i_bs2user[n][m][u] + x * inst.i_user2user[n][m][u];
    du_b += x * inst.i_bs2user[n][m][u] + inst.i_user2user[n][m][u];
    bs_a += inst.i_bs2bs[n][m] + x * inst.i_user2bs[n][m];
    bs_b += x * inst.i_bs2bs[n][m] + inst.i_user2bs[n][m];
  }
  const double pd = inst.p_down[m][u];
  const double pu = inst.p_up[m][u];
  const double s2 = inst.sigma2;
  const double ru = inst.rsi_user;
  const double rb = inst.rsi_bs[m];
  UserRates r;
  r.fd_d = log_rate(pd, ru + s2 + du_a, form) + log_rate(pd, ru + s2 + du_b, form);
  r.fd_u = log_rate(pu, rb + s2 + bs_a, form) + log_rate(pu, rb + s2 + bs_b, form);
  r.hd = log_rate(pd, s2 + du_a, form) + log_rate(pu, s2 + bs_b, form);
  return r;
}

double objective(const OptimizerInstance& inst, const Delta& delta, RateForm form) {
  check_delta(inst, delta);
  double total = 0.0;
  for (std::size_t m = 0; m < inst.cells(); ++m) {
    double fd = 0.0, hd = 0.0;
    for (std::size_t u = 0; u < inst.n[m]; ++u) {
      const UserRates r = user_rates(inst, delta, m, u, form);
      if (u < delta[m]) {
        fd += r.fd_d + r.fd_u;
      } else {
        hd += r.hd;
      }
    }
    total += inst.omega[m] * (fd + hd);
  }
  return total;
}

// ---------------------------------------------------------------------------

IncrementalObjective::IncrementalObjective(const OptimizerInstance& inst, Delta start,
                                           RateForm form)
    : inst_(inst), form_(form), delta_(std::move(start)) {
  check_delta(inst_, delta_);
  offset_.resize(inst_.cells() + 1, 0);
  for (std::size_t m = 0; m < inst_.cells(); ++m) offset_[m + 1] = offset_[m] + inst_.n[m];
  const std::size_t U = offset_.back();
  u_i.assign(U, 0.0);
  u_ip.assign(U, 0.0);
  u_xi.assign(U, 0.0);
  u_xip.assign(U, 0.0);
  const std::size_t M = inst_.cells();
  b_i.assign(M, 0.0);
  b_ip.assign(M, 0.0);
  b_xi.assign(M, 0.0);
  b_xip.assign(M, 0.0);
  refresh();
}

void IncrementalObjective::refresh() {
  const std::size_t M = inst_.cells();
  frac_.resize(M);
  for (std::size_t m = 0; m < M; ++m)
    frac_[m] = static_cast<double>(delta_[m]) / static_cast<double>(inst_.n[m]);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t u = 0; u < inst_.n[m]; ++u) {
      double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
      for (std::size_t n = 0; n < M; ++n) {
        if (n == m) continue;
        const double i = inst_.i_bs2user[n][m][u];
        const double ip = inst_.i_user2user[n][m][u];
        a += i;
        b += frac_[n] * i;
        c += ip;
        d += frac_[n] * ip;
      }
      const std::size_t g = offset_[m] + u;
      u_i[g] = a;
      u_xi[g] = b;
      u_ip[g] = c;
      u_xip[g] = d;
    }
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    for (std::size_t n = 0; n < M; ++n) {
      if (n == m) continue;
      a += inst_.i_bs2bs[n][m];
      b += frac_[n] * inst_.i_bs2bs[n][m];
      c += inst_.i_user2bs[n][m];
      d += frac_[n] * inst_.i_user2bs[n][m];
    }
    b_i[m] = a;
    b_xi[m] = b;
    b_ip[m] = c;
    b_xip[m] = d;
  }
}

void IncrementalObjective::set(std::size_t m, std::size_t new_delta) {
  if (new_delta > inst_.n[m]) throw std::invalid_argument("delta exceeds the cell's user count");
  const double nx = static_cast<double>(new_delta) / static_cast<double>(inst_.n[m]);
  const double dx = nx - frac_[m];
  delta_[m] = new_delta;
  frac_[m] = nx;
  if (dx == 0.0) return;
  for (std::size_t k = 0; k < inst_.cells(); ++k) {
    if (k == m) continue;
    const auto& i = inst_.i_bs2user[m][k];
    const auto& ip = inst_.i_user2user[m][k];
    for (std::size_t u = 0; u < inst_.n[k]; ++u) {
      u_xi[offset_[k] + u] += dx * i[u];
      u_xip[offset_[k] + u] += dx * ip[u];
    }
    b_xi[k] += dx * inst_.i_bs2bs[m][k];
    b_xip[k] += dx * inst_.i_user2bs[m][k];
  }
}

double IncrementalObjective::value() const {
  const double s2 = inst_.sigma2;
  const double ru = inst_.rsi_user;
  double total = 0.0;
  for (std::size_t m = 0; m < inst_.cells(); ++m) {
    const double rb = inst_.rsi_bs[m];
    const double bs_a = b_i[m] + b_xip[m];
    const double bs_b = b_xi[m] + b_ip[m];
    LogProduct prod;
    for (std::size_t u = 0; u < inst_.n[m]; ++u) {
      const std::size_t g = offset_[m] + u;
      const double pd = inst_.p_down[m][u];
      const double pu = inst_.p_up[m][u];
      const double du_a = u_i[g] + u_xip[g];
      const double du_b = u_xi[g] + u_ip[g];
      if (form_ == RateForm::Printed) {
        if (u < delta_[m]) {
          prod.mul((pd / (ru + s2 + du_a)) * (pd / (ru + s2 + du_b)));
          prod.mul((pu / (rb + s2 + bs_a)) * (pu / (rb + s2 + bs_b)));
        } else {
          prod.mul((pd / (s2 + du_a)) * (pu / (s2 + bs_b)));
        }
      } else {
        if (u < delta_[m]) {
          prod.mul((1.0 + pd / (ru + s2 + du_a)) * (1.0 + pd / (ru + s2 + du_b)));
          prod.mul((1.0 + pu / (rb + s2 + bs_a)) * (1.0 + pu / (rb + s2 + bs_b)));
        } else {
          prod.mul((1.0 + pd / (s2 + du_a)) * (1.0 + pu / (s2 + bs_b)));
        }
      }
    }
    total += inst_.omega[m] * prod.log2();
  }
  return total;
}

// ---------------------------------------------------------------------------

DuplexAssignment greedy_select(const OptimizerInstance& inst, RateForm form) {
  inst.validate();
  const std::size_t M = inst.cells();
  IncrementalObjective ev(inst, Delta(M, 0), form);
  DuplexAssignment out;
  double best = ev.value();
  ++out.evaluations;
  out.trace.push_back(best);
  // U+ and U- persist across iterations, as in the listing. A stale value
  // never exceeds the current best, so it can't trigger a move on its own.
  double up = best, down = best;
  std::size_t up_m = 0, down_m = 0;
  for (;;) {
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t d = ev.delta()[m];
      if (d < inst.n[m]) {
        ev.set(m, d + 1);
        const double v = ev.value();
        ++out.evaluations;
        if (v > up) {
          up = v;
          up_m = m;
        }
        ev.set(m, d);
      }
      if (d > 0) {
        ev.set(m, d - 1);
        const double v = ev.value();
        ++out.evaluations;
        if (v > down) {
          down = v;
          down_m = m;
        }
        ev.set(m, d);
      }
    }
    // Undo/redo above leaves rounding in the cached sums.
    ev.refresh();
    if (up >= down && up > best) {
      ev.set(up_m, ev.delta()[up_m] + 1);
    } else if (down >= up && down > best) {
      ev.set(down_m, ev.delta()[down_m] - 1);
    } else {
      break;
    }
    ev.refresh();
    best = ev.value();
    // Keep the bookkeeping exact: the accepted move's value is the new best.
    up = std::min(up, best);
    down = std::min(down, best);
    out.trace.push_back(best);
  }
  out.delta = ev.delta();
  out.objective = objective(inst, out.delta, form);
  return out;
}

double lattice_size(const OptimizerInstance& inst) {
  double prod = 1.0;
  for (std::size_t n : inst.n) prod *= static_cast<double>(n + 1);
  return prod;
}

namespace {

struct SearchBest {
  Delta delta;
  double value = -kInf;
  std::size_t evaluations = 0;

  void offer(const Delta& d, double v) {
    // Values within rounding of each other count as a tie.
    const double tol = 1e-12 * std::max(std::abs(v), std::abs(value));
    if (delta.empty() || v > value + tol) {
      value = v;
      delta = d;
    } else if (v >= value - tol && d < delta) {
      value = std::max(value, v);
      delta = d;
    }
  }
};

// Reflected mixed-radix Gray walk over every coordinate except `fixed`, with
// that coordinate held at `fixed_value`.
SearchBest gray_walk(const OptimizerInstance& inst, RateForm form, std::size_t fixed,
                     std::size_t fixed_value) {
  const std::size_t M = inst.cells();
  Delta d(M, 0);
  d[fixed] = fixed_value;
  IncrementalObjective ev(inst, d, form);
  std::vector<int> dir(M, 1);
  SearchBest best;
  best.offer(ev.delta(), ev.value());
  best.evaluations = 1;
  std::size_t since_refresh = 0;
  for (;;) {
    std::size_t j = 0;
    while (j < M) {
      if (j == fixed) {
        ++j;
        continue;
      }
      const long next = static_cast<long>(ev.delta()[j]) + dir[j];
      if (next >= 0 && next <= static_cast<long>(inst.n[j])) break;
      dir[j] = -dir[j];
      ++j;
    }
    if (j == M) break;
    ev.set(j, static_cast<std::size_t>(static_cast<long>(ev.delta()[j]) + dir[j]));
    if (++since_refresh == 4096) {
      ev.refresh();
      since_refresh = 0;
    }
    best.offer(ev.delta(), ev.value());
    ++best.evaluations;
  }
  return best;
}

}  // namespace

DuplexAssignment exhaustive_search(const OptimizerInstance& inst, double budget, RateForm form) {
  inst.validate();
  const double size = lattice_size(inst);
  if (size > budget) throw BudgetExceeded(size, budget);
  // Split the lattice on the largest cell and walk each slice on its own thread.
  const std::size_t split = static_cast<std::size_t>(
      std::max_element(inst.n.begin(), inst.n.end()) - inst.n.begin());
  const std::size_t slices = inst.n[split] + 1;
  std::vector<SearchBest> parts(slices);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = size < 1e5 ? 1 : std::min<std::size_t>(hw, slices);
  if (threads <= 1) {
    for (std::size_t v = 0; v < slices; ++v) parts[v] = gray_walk(inst, form, split, v);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t v = t; v < slices; v += threads) parts[v] = gray_walk(inst, form, split, v);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  SearchBest best;
  std::size_t evals = 0;
  for (const auto& p : parts) {
    best.offer(p.delta, p.value);
    evals += p.evaluations;
  }
  DuplexAssignment out;
  out.delta = best.delta;
  out.objective = objective(inst, out.delta, form);
  out.trace = {out.objective};
  out.evaluations = evals;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<PowerThreshold> thresholds_from_delta(const OptimizerInstance& inst,
                                                  const Delta& delta, ThresholdConvention conv) {
  check_delta(inst, delta);
  std::vector<PowerThreshold> g;
  for (std::size_t m = 0; m < inst.cells(); ++m) {
    const std::size_t d = delta[m];
    const std::size_t n = inst.n[m];
    if (d == 0) {
      g.push_back(conv == ThresholdConvention::AsPrinted ? PowerThreshold::zero()
                                                         : PowerThreshold::infinite());
    } else if (d == n) {
      g.push_back(conv == ThresholdConvention::AsPrinted ? PowerThreshold::infinite()
                                                         : PowerThreshold::zero());
    } else {
      g.push_back(PowerThreshold::watts(0.5 * (inst.p_down[m][d - 1] + inst.p_down[m][d])));
    }
  }
  return g;
}

Delta classify_with_thresholds(const OptimizerInstance& inst,
                               const std::vector<PowerThreshold>& g) {
  if (g.size() != inst.cells()) throw std::invalid_argument("threshold vector has wrong length");
  Delta d(inst.cells(), 0);
  for (std::size_t m = 0; m < inst.cells(); ++m) {
    for (double pw : inst.p_down[m]) d[m] += g[m].admits(pw) ? 1 : 0;
  }
  return d;
}

OptimizerInstance extract_instance(const Snapshot& s, const NetworkParams& p,
                                   std::vector<std::uint32_t>* cell_bs,
                                   std::vector<std::vector<std::uint32_t>>* cell_members) {
  CellGeometry g;
  std::vector<std::uint32_t> bs_of_cell;
  for (std::size_t j = 0; j < s.num_bs(); ++j) {
    if (s.cell_users[j].empty()) continue;
    bs_of_cell.push_back(static_cast<std::uint32_t>(j));
    g.bs_x.push_back(s.bs_x[j]);
    g.bs_y.push_back(s.bs_y[j]);
    g.bs_p.push_back(s.bs_power[j]);
    g.tier.push_back(s.bs_tier[j]);
    std::vector<Point> us;
    for (auto u : s.cell_users[j]) us.push_back(s.users[u]);
    g.users.push_back(std::move(us));
  }
  if (bs_of_cell.empty()) throw std::invalid_argument("snapshot has no users");
  std::vector<std::vector<std::uint32_t>> order;
  OptimizerInstance inst = build(std::move(g), p, &order);
  if (cell_members) {
    cell_members->assign(order.size(), {});
    for (std::size_t m = 0; m < order.size(); ++m) {
      for (auto i : order[m]) (*cell_members)[m].push_back(s.cell_users[bs_of_cell[m]][i]);
    }
  }
  if (cell_bs) *cell_bs = std::move(bs_of_cell);
  return inst;
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Hybrid: return "hybrid";
    case Scheme::AllHd: return "all_hd";
    case Scheme::AllFd: return "all_fd";
    case Scheme::MacroFdSmallHd: return "macro_fd_small_hd";
    case Scheme::MacroHdSmallFd: return "macro_hd_small_fd";
  }
  return "?";
}

Delta baseline_delta(const OptimizerInstance& inst, Scheme s) {
  Delta d(inst.cells(), 0);
  for (std::size_t m = 0; m < inst.cells(); ++m) {
    const bool macro = inst.tier[m] == Tier::One;
    bool fd = false;
    switch (s) {
      case Scheme::AllHd: fd = false; break;
      case Scheme::AllFd: fd = true; break;
      case Scheme::MacroFdSmallHd: fd = macro; break;
      case Scheme::MacroHdSmallFd: fd = !macro; break;
      case Scheme::Hybrid: throw std::invalid_argument("hybrid has no fixed delta");
    }
    d[m] = fd ? inst.n[m] : 0;
  }
  return d;
}

OptimizerInstance synthetic_instance(std::uint64_t seed, const std::vector<std::size_t>& users,
                                     const NetworkParams& p) {
  p.validate();
  const std::size_t M = users.size();
  if (M == 0) throw std::invalid_argument("synthetic instance needs at least one cell");
  for (std::size_t n : users)
    if (n == 0) throw std::invalid_argument("synthetic cells need at least one user");
  const double lam = p.density(Tier::One) + p.density(Tier::Two);
  const double side = std::sqrt(static_cast<double>(M) / lam);
  const std::size_t wanted = std::accumulate(users.begin(), users.end(), std::size_t{0});
  // Drop BSs, then users uniformly, each joining its strongest BS until that
  // cell is full. A layout where some cell never fills is redrawn.
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, 5, attempt));
    CellGeometry g;
    for (std::size_t m = 0; m < M; ++m) {
      const Tier t = rng.uniform_open0() <= p.density(Tier::One) / lam ? Tier::One : Tier::Two;
      g.tier.push_back(t);
      g.bs_x.push_back(rng.uniform(0.0, side));
      g.bs_y.push_back(rng.uniform(0.0, side));
      g.bs_p.push_back(p.power(t));
    }
    g.users.assign(M, {});
    std::size_t placed = 0;
    for (std::size_t draw = 0; draw < 2000 * wanted && placed < wanted; ++draw) {
      const Point u{rng.uniform(0.0, side), rng.uniform(0.0, side)};
      std::size_t best = 0;
      double best_rx = -1.0;
      for (std::size_t m = 0; m < M; ++m) {
        const double rx = g.bs_p[m] * gain(g.bs_x[m], g.bs_y[m], u.x, u.y, p.alpha);
        if (rx > best_rx) {
          best_rx = rx;
          best = m;
        }
      }
      if (g.users[best].size() < users[best]) {
        g.users[best].push_back(u);
        ++placed;
      }
    }
    if (placed == wanted) return build(std::move(g), p, nullptr);
  }
}

OptimizerInstance synthetic_instance(std::uint64_t seed, std::size_t cells, std::size_t max_users,
                                     const NetworkParams& p) {
  Rng rng(derive_seed(seed, 6, cells));
  std::vector<std::size_t> users(cells);
  for (auto& u : users) u = 1 + static_cast<std::size_t>(rng.below(max_users));
  return synthetic_instance(seed, users, p);
}

// ---------------------------------------------------------------------------

SchemeRates simulate_schemes(const Snapshot& s, const NetworkParams& p,
                             const std::vector<std::uint32_t>& cell_bs,
                             const std::vector<std::vector<std::uint32_t>>& cell_members,
                             const std::vector<std::pair<Scheme, Delta>>& plans, int slots,
                             std::uint64_t seed) {
  const std::size_t M = cell_bs.size();
  if (cell_members.size() != M) throw std::invalid_argument("cell_members has wrong length");
  for (const auto& [sch, d] : plans) {
    if (d.size() != M) throw std::invalid_argument("plan has wrong length");
    for (std::size_t m = 0; m < M; ++m)
      if (d[m] > cell_members[m].size()) throw std::invalid_argument("plan exceeds user count");
  }
  const double a = p.alpha;
  const double pu = p.user_power;
  const double s2 = p.noise();
  const double ru = p.rsi_user();
  const double half_w = p.channel_bandwidth();

  // Static gains between cell BSs and from each BS to every member user.
  std::vector<double> cx(M), cy(M), cp(M), rb(M);
  for (std::size_t m = 0; m < M; ++m) {
    cx[m] = s.bs_x[cell_bs[m]];
    cy[m] = s.bs_y[cell_bs[m]];
    cp[m] = s.bs_power[cell_bs[m]];
    rb[m] = p.rsi_ratio * cp[m];
  }
  std::vector<double> g_bb(M * M);
  for (std::size_t m = 0; m < M; ++m)
    kernels::path_gain(cx.data(), cy.data(), M, cx[m], cy[m], a, kMinDistance, g_bb.data() + m * M);

  std::vector<std::size_t> sched(M), rank(M);
  std::vector<double> ux(M), uy(M);
  std::vector<double> g_bu(M * M), g_uu(M * M), g_ub(M * M);  // [victim * M + source]
  std::vector<double> uni(4 * M * M + 2 * M), fade(4 * M * M + 2 * M);
  std::vector<double> e_bu(M * M), e_uu(M * M), e_bb(M * M), e_ub(M * M);
  std::vector<double> sig_d(M), sig_u(M);
  std::vector<double> sum(plans.size(), 0.0);
  Rng rng(seed);
  std::vector<char> fd(M);

  for (int slot = 0; slot < slots; ++slot) {
    for (std::size_t m = 0; m < M; ++m) {
      const auto& mem = cell_members[m];
      const std::uint32_t off = s.round_robin_offset[cell_bs[m]];
      rank[m] = (off + static_cast<std::size_t>(slot)) % mem.size();
      sched[m] = mem[rank[m]];
      ux[m] = s.users[sched[m]].x;
      uy[m] = s.users[sched[m]].y;
    }
    for (std::size_t m = 0; m < M; ++m) {
      kernels::path_gain(cx.data(), cy.data(), M, ux[m], uy[m], a, kMinDistance, g_bu.data() + m * M);
      kernels::path_gain(ux.data(), uy.data(), M, ux[m], uy[m], a, kMinDistance, g_uu.data() + m * M);
      kernels::path_gain(ux.data(), uy.data(), M, cx[m], cy[m], a, kMinDistance, g_ub.data() + m * M);
    }
    for (double& u : uni) u = rng.uniform_open0();
    kernels::neg_log(uni.data(), uni.size(), fade.data());
    const double* h = fade.data();
    for (std::size_t i = 0; i < M * M; ++i) {
      const std::size_t src = i % M;
      e_bu[i] = cp[src] * g_bu[i] * h[i];
      e_uu[i] = pu * g_uu[i] * h[M * M + i];
      e_bb[i] = cp[src] * g_bb[i] * h[2 * M * M + i];
      e_ub[i] = pu * g_ub[i] * h[3 * M * M + i];
    }
    for (std::size_t m = 0; m < M; ++m) {
      sig_d[m] = cp[m] * g_bu[m * M + m] * h[4 * M * M + m];
      sig_u[m] = pu * g_ub[m * M + m] * h[4 * M * M + M + m];
      // Own-cell entries are the link itself, not interference.
      e_bu[m * M + m] = e_uu[m * M + m] = e_bb[m * M + m] = e_ub[m * M + m] = 0.0;
    }
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const Delta& d = plans[k].second;
      for (std::size_t m = 0; m < M; ++m) fd[m] = rank[m] < d[m];
      double total = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        double bs_all = 0.0, bs_fd = 0.0, us_all = 0.0, us_fd = 0.0;  // at the user
        double bb_all = 0.0, bb_fd = 0.0, ub_all = 0.0, ub_fd = 0.0;  // at the BS
        const double* r_bu = &e_bu[m * M];
        const double* r_uu = &e_uu[m * M];
        const double* r_bb = &e_bb[m * M];
        const double* r_ub = &e_ub[m * M];
        for (std::size_t n = 0; n < M; ++n) {
          bs_all += r_bu[n];
          us_all += r_uu[n];
          bb_all += r_bb[n];
          ub_all += r_ub[n];
          if (fd[n]) {
            bs_fd += r_bu[n];
            us_fd += r_uu[n];
            bb_fd += r_bb[n];
            ub_fd += r_ub[n];
          }
        }
        // Channel 1 carries every downlink and the FD uplinks; channel 2 every
        // uplink and the FD downlinks.
        const double self_u = fd[m] ? ru : 0.0;
        const double self_b = fd[m] ? rb[m] : 0.0;
        double bits = std::log2(1.0 + sig_d[m] / (bs_all + us_fd + self_u + s2));
        bits += std::log2(1.0 + sig_u[m] / (bb_fd + ub_all + self_b + s2));
        if (fd[m]) {
          bits += std::log2(1.0 + sig_u[m] / (bb_all + ub_fd + self_b + s2));
          bits += std::log2(1.0 + sig_d[m] / (bs_fd + us_all + self_u + s2));
        }
        total += half_w * bits;
      }
      sum[k] += total;
    }
  }
  SchemeRates out;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    out.schemes.push_back(plans[k].first);
    out.sum_rate.push_back(slots > 0 ? sum[k] / slots : 0.0);
  }
  return out;
}

}  // namespace hdx

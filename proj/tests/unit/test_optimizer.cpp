#include <doctest.h>

#include <cmath>
#include <random>

#include "hdx/optimizer.hpp"

using namespace hdx;

namespace {

OptimizerInstance make_instance(const std::vector<std::size_t>& users) {
  OptimizerInstance in;
  const std::size_t M = users.size();
  in.n = users;
  in.tier.assign(M, Tier::Two);
  in.p_down.resize(M);
  in.p_up.resize(M);
  in.rsi_bs.assign(M, 0.0);
  in.omega.resize(M);
  in.sigma2 = 1e-13;
  in.i_bs2user.assign(M, std::vector<std::vector<double>>(M));
  in.i_user2user.assign(M, std::vector<std::vector<double>>(M));
  in.i_bs2bs.assign(M, std::vector<double>(M, 0.0));
  in.i_user2bs.assign(M, std::vector<double>(M, 0.0));
  for (std::size_t m = 0; m < M; ++m) {
    in.omega[m] = 1e7 / static_cast<double>(users[m]);
    for (std::size_t u = 0; u < users[m]; ++u) {
      in.p_down[m].push_back(1e-6 / static_cast<double>(u + 1));
      in.p_up[m].push_back(1e-8 / static_cast<double>(u + 1));
    }
    for (std::size_t n = 0; n < M; ++n) {
      in.i_bs2user[n][m].assign(users[m], 0.0);
      in.i_user2user[n][m].assign(users[m], 0.0);
    }
  }
  return in;
}

double hd_baseline(const OptimizerInstance& in) {
  double total = 0.0;
  for (std::size_t m = 0; m < in.cells(); ++m) {
    double cell = 0.0;
    for (std::size_t u = 0; u < in.n[m]; ++u) {
      double down = in.sigma2, up = in.sigma2;
      for (std::size_t n = 0; n < in.cells(); ++n) {
        if (n == m) continue;
        down += in.i_bs2user[n][m][u];
        up += in.i_user2bs[n][m];
      }
      cell += std::log2(in.p_down[m][u] / down) + std::log2(in.p_up[m][u] / up);
    }
    total += in.omega[m] * cell;
  }
  return total;
}

}  // namespace

TEST_CASE("single cell without interference") {
  auto in = make_instance({1});
  const UserRates r = user_rates(in, {0}, 0, 0);
  CHECK(r.fd_d + r.fd_u == doctest::Approx(2.0 * r.hd).epsilon(1e-14));
  CHECK(objective(in, {1}) == doctest::Approx(2.0 * objective(in, {0})).epsilon(1e-14));
  const auto g = greedy_select(in);
  CHECK(g.delta == Delta{1});

  in.rsi_bs = {1e10};
  in.rsi_user = 1e10;
  const UserRates s = user_rates(in, {0}, 0, 0, RateForm::Shannon);
  CHECK(s.fd_d > 0.0);
  CHECK(s.fd_d < 1e-15);
  CHECK(s.fd_u < 1e-15);
  CHECK(s.hd == doctest::Approx(user_rates(make_instance({1}), {0}, 0, 0, RateForm::Shannon).hd));
  CHECK(greedy_select(in).delta == Delta{0});
  CHECK(greedy_select(in, RateForm::Shannon).delta == Delta{0});
}

TEST_CASE("rates match a hand transcription on two cells") {
  auto in = make_instance({2, 1});
  in.p_down = {{4e-7, 1e-7}, {5e-7}};
  in.p_up = {{2e-9, 8e-10}, {3e-9}};
  in.rsi_bs = {2e-12, 3e-12};
  in.rsi_user = 1e-12;
  in.i_bs2user[1][0] = {3e-10, 7e-10};
  in.i_user2user[1][0] = {2e-11, 5e-11};
  in.i_bs2user[0][1] = {4e-10};
  in.i_user2user[0][1] = {6e-11};
  in.i_bs2bs[1][0] = 9e-11;
  in.i_user2bs[1][0] = 1e-11;
  in.i_bs2bs[0][1] = 8e-11;
  in.i_user2bs[0][1] = 2e-11;
  const double s2 = in.sigma2, ru = 1e-12;

  // Cell 0 user 1 under delta = {1, 1}: cell 1 is fully FD (x = 1).
  {
    const auto r = user_rates(in, {1, 1}, 0, 1);
    const double fd_d = std::log2(1e-7 / (ru + s2 + 7e-10 + 1.0 * 5e-11)) +
                        std::log2(1e-7 / (ru + s2 + 1.0 * 7e-10 + 5e-11));
    const double fd_u = std::log2(8e-10 / (2e-12 + s2 + 9e-11 + 1e-11)) +
                        std::log2(8e-10 / (2e-12 + s2 + 9e-11 + 1e-11));
    const double hd = std::log2(1e-7 / (s2 + 7e-10 + 5e-11)) + std::log2(8e-10 / (s2 + 9e-11 + 1e-11));
    CHECK(r.fd_d == doctest::Approx(fd_d).epsilon(1e-13));
    CHECK(r.fd_u == doctest::Approx(fd_u).epsilon(1e-13));
    CHECK(r.hd == doctest::Approx(hd).epsilon(1e-13));
  }
  // Cell 1 user 0 under delta = {1, 0}: x_0 = 1/2.
  {
    const auto r = user_rates(in, {1, 0}, 1, 0);
    const double fd_d = std::log2(5e-7 / (ru + s2 + 4e-10 + 0.5 * 6e-11)) +
                        std::log2(5e-7 / (ru + s2 + 0.5 * 4e-10 + 6e-11));
    const double fd_u = std::log2(3e-9 / (3e-12 + s2 + 8e-11 + 0.5 * 2e-11)) +
                        std::log2(3e-9 / (3e-12 + s2 + 0.5 * 8e-11 + 2e-11));
    const double hd = std::log2(5e-7 / (s2 + 4e-10 + 0.5 * 6e-11)) +
                      std::log2(3e-9 / (s2 + 0.5 * 8e-11 + 2e-11));
    CHECK(r.fd_d == doctest::Approx(fd_d).epsilon(1e-13));
    CHECK(r.fd_u == doctest::Approx(fd_u).epsilon(1e-13));
    CHECK(r.hd == doctest::Approx(hd).epsilon(1e-13));

    const auto a = user_rates(in, {1, 0}, 0, 0);
    const auto b = user_rates(in, {1, 0}, 0, 1);
    const double u = in.omega[0] * (a.fd_d + a.fd_u + b.hd) + in.omega[1] * r.hd;
    CHECK(objective(in, {1, 0}) == doctest::Approx(u).epsilon(1e-13));
  }
  CHECK(objective(in, {0, 0}) == doctest::Approx(hd_baseline(in)).epsilon(1e-13));
  CHECK_THROWS(objective(in, {3, 0}));
  CHECK_THROWS(objective(in, {0}));
}

TEST_CASE("incremental objective tracks the direct one") {
  const auto p = NetworkParams::defaults();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = synthetic_instance(static_cast<std::uint64_t>(trial), 6, 5, p);
    for (RateForm f : {RateForm::Printed, RateForm::Shannon}) {
      IncrementalObjective ev(in, Delta(in.cells(), 0), f);
      for (int step = 0; step < 200; ++step) {
        const std::size_t m = rng() % in.cells();
        ev.set(m, rng() % (in.n[m] + 1));
        const double want = objective(in, ev.delta(), f);
        CHECK(ev.value() == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("exhaustive search") {
  auto in = make_instance({2});
  const auto a = exhaustive_search(in);
  CHECK(a.evaluations == 3);
  CHECK(a.delta == Delta{2});

  const auto fig = make_instance({6, 6, 8, 3, 8, 4, 4, 1, 1, 2, 1, 1, 1});
  CHECK(lattice_size(fig) == 38102400.0);
  CHECK(lattice_size(fig) == 7.0 * 7 * 9 * 4 * 9 * 5 * 5 * 2 * 2 * 3 * 2 * 2 * 2);
  try {
    exhaustive_search(fig, 1e7);
    FAIL("budget was not enforced");
  } catch (const BudgetExceeded& e) {
    CHECK(e.product() == 38102400.0);
  }

  // Zero coupling and zero RSI: everybody goes FD and the sum rate doubles.
  const auto flat = make_instance({3, 1, 2});
  const auto best = exhaustive_search(flat);
  CHECK(best.delta == Delta{3, 1, 2});
  CHECK(best.objective == doctest::Approx(2.0 * hd_baseline(flat)).epsilon(1e-12));
  const auto g = greedy_select(flat);
  CHECK(g.delta == best.delta);

  // Ties go to the lexicographically smallest delta. Two interchangeable
  // cells make every optimum come in mirrored pairs.
  auto tie = make_instance({2, 2});
  tie.p_down = {{1e-6, 1e-9}, {1e-6, 1e-9}};
  tie.rsi_bs = {1e-12, 1e-12};
  tie.rsi_user = 1e-12;
  for (auto [n, m] : {std::pair{0, 1}, std::pair{1, 0}}) {
    tie.i_bs2user[n][m] = {1e-10, 1e-10};
    tie.i_user2user[n][m] = {1e-11, 1e-11};
    tie.i_bs2bs[n][m] = 1e-10;
    tie.i_user2bs[n][m] = 1e-11;
  }
  const auto t = exhaustive_search(tie);
  double top = -1e300;
  for (std::size_t a0 = 0; a0 <= 2; ++a0)
    for (std::size_t a1 = 0; a1 <= 2; ++a1) top = std::max(top, objective(tie, {a0, a1}));
  Delta first;
  for (std::size_t a0 = 0; a0 <= 2 && first.empty(); ++a0)
    for (std::size_t a1 = 0; a1 <= 2 && first.empty(); ++a1)
      if (objective(tie, {a0, a1}) >= top - 1e-12 * std::abs(top)) first = {a0, a1};
  CHECK(t.delta == first);
  CHECK(objective(tie, {first[1], first[0]}) == doctest::Approx(objective(tie, first)).epsilon(1e-14));
}

TEST_CASE("greedy on random instances") {
  const auto p = NetworkParams::defaults();
  int close = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const auto in = synthetic_instance(static_cast<std::uint64_t>(1000 + i), 5, 4, p);
    const auto g = greedy_select(in);
    for (std::size_t s = 1; s < g.trace.size(); ++s) CHECK(g.trace[s] > g.trace[s - 1]);
    CHECK(g.trace.front() == doctest::Approx(objective(in, Delta(in.cells(), 0))).epsilon(1e-12));
    CHECK(g.objective == doctest::Approx(objective(in, g.delta)).epsilon(1e-12));
    const auto e = exhaustive_search(in);
    CHECK(e.evaluations == static_cast<std::size_t>(lattice_size(in)));
    CHECK(e.objective >= g.objective - 1e-9 * std::abs(g.objective));
    CHECK(g.objective >= g.trace.front() - 1e-12 * std::abs(g.trace.front()));
    if (g.objective >= e.objective - 0.05 * std::abs(e.objective)) ++close;
  }
  CHECK(close >= n * 95 / 100);
}

TEST_CASE("thresholds") {
  auto in = make_instance({2, 3, 1});
  in.p_down = {{4.0, 2.0}, {9.0, 5.0, 1.0}, {7.0}};
  auto g = thresholds_from_delta(in, {1, 0, 1});
  CHECK(g[0].watts() == 3.0);
  CHECK(g[1].is_zero());
  CHECK(g[2].is_infinite());

  g = thresholds_from_delta(in, {1, 0, 1}, ThresholdConvention::Consistent);
  CHECK(g[0].watts() == 3.0);
  CHECK(g[1].is_infinite());
  CHECK(g[2].is_zero());

  for (std::size_t a = 0; a <= 2; ++a)
    for (std::size_t b = 0; b <= 3; ++b)
      for (std::size_t c = 0; c <= 1; ++c) {
        const Delta d{a, b, c};
        CHECK(classify_with_thresholds(in, thresholds_from_delta(in, d, ThresholdConvention::Consistent)) == d);
      }
  // As printed the end branches flip, so only interior cuts round-trip.
  const Delta interior{1, 2, 0};
  const auto back = classify_with_thresholds(in, thresholds_from_delta(in, interior));
  CHECK(back[0] == 1);
  CHECK(back[1] == 2);
}

TEST_CASE("instance extraction from a layout") {
  auto p = NetworkParams::defaults();
  p.rsi_ratio = 0.0;
  Snapshot s;
  s.side = 1000.0;
  s.bs_count = {0, 2};
  s.bs_x = {400.0, 600.0};
  s.bs_y = {500.0, 500.0};
  s.bs_power = {p.power(Tier::Two), p.power(Tier::Two)};
  s.bs_tier = {Tier::Two, Tier::Two};
  s.users = {{300.0, 500.0}, {700.0, 500.0}, {420.0, 500.0}};
  s.serving = {0, 1, 0};
  s.serving_distance = {100.0, 100.0, 20.0};
  s.user_class = {{Tier::Two, Duplex::HD}, {Tier::Two, Duplex::HD}, {Tier::Two, Duplex::FD}};
  s.cell_users = {{0, 2}, {1}};
  s.round_robin_offset = {0, 0};

  std::vector<std::uint32_t> cell_bs;
  std::vector<std::vector<std::uint32_t>> members;
  const auto in = extract_instance(s, p, &cell_bs, &members);
  CHECK_NOTHROW(in.validate());
  REQUIRE(in.cells() == 2);
  CHECK(in.n == std::vector<std::size_t>{2, 1});
  CHECK(members[0] == std::vector<std::uint32_t>{2, 0});  // strongest first
  CHECK(in.p_down[0][0] >= in.p_down[0][1]);
  CHECK(in.i_bs2bs[0][1] == in.i_bs2bs[1][0]);
  CHECK(in.i_bs2bs[0][1] == doctest::Approx(p.power(Tier::Two) * std::pow(200.0, -p.alpha)));
  const double eps = p.user_power / p.power(Tier::Two);
  CHECK(in.i_user2bs[0][1] == doctest::Approx(eps * in.i_bs2bs[0][1]));
  CHECK(in.i_user2user[1][0][1] == doctest::Approx(eps * in.i_bs2user[1][0][1]));
  CHECK(in.omega[0] == doctest::Approx(p.bandwidth_hz / 2.0));

  // Drop the second cell: one cell, nothing to interfere.
  Snapshot one = s;
  one.cell_users = {{0, 2}, {}};
  one.serving = {0, 0, 0};
  one.users.pop_back();
  one.users[1] = {380.0, 500.0};
  one.serving_distance = {100.0, 20.0};
  one.user_class.pop_back();
  one.cell_users = {{0, 1}, {}};
  const auto single = extract_instance(one, p);
  REQUIRE(single.cells() == 1);
  for (const auto& row : single.i_bs2user[0][0]) CHECK(row == 0.0);
  CHECK(single.i_bs2bs[0][0] == 0.0);

  Snapshot none = s;
  none.users.clear();
  none.serving.clear();
  none.serving_distance.clear();
  none.user_class.clear();
  none.cell_users = {{}, {}};
  CHECK_THROWS(extract_instance(none, p));
}

TEST_CASE("baselines") {
  auto in = make_instance({2, 3, 1});
  in.tier = {Tier::One, Tier::Two, Tier::Two};
  CHECK(baseline_delta(in, Scheme::AllHd) == Delta{0, 0, 0});
  CHECK(baseline_delta(in, Scheme::AllFd) == Delta{2, 3, 1});
  CHECK(baseline_delta(in, Scheme::MacroFdSmallHd) == Delta{2, 0, 0});
  CHECK(baseline_delta(in, Scheme::MacroHdSmallFd) == Delta{0, 3, 1});
  CHECK_THROWS(baseline_delta(in, Scheme::Hybrid));
}

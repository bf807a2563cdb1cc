#include <doctest.h>

#include <cmath>
#include <random>

#include "hdx/analytic.hpp"
#include "hdx/experiments.hpp"
#include "hdx/montecarlo.hpp"
#include "hdx/optimizer.hpp"

using namespace hdx;

TEST_CASE("pure half duplex dominates pure full duplex") {
  const std::vector<double> grid = make_threshold_grid(-10.0, 30.0, 5.0);
  auto p = NetworkParams::defaults();
  p.gamma = {PowerThreshold::infinite(), PowerThreshold::infinite()};
  const AnalyticModel hd(p);
  p.gamma = {PowerThreshold::zero(), PowerThreshold::zero()};
  const AnalyticModel fd(p);

  const auto hd_d = hd.ccdf({Channel::One, Duplex::HD, Link::Downlink, std::nullopt}, grid);
  const auto hd_u = hd.ccdf({Channel::Two, Duplex::HD, Link::Uplink, std::nullopt}, grid);
  for (Channel ch : {Channel::One, Channel::Two}) {
    const auto fd_d = fd.ccdf({ch, Duplex::FD, Link::Downlink, std::nullopt}, grid);
    const auto fd_u = fd.ccdf({ch, Duplex::FD, Link::Uplink, std::nullopt}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(hd_d.probabilities[i] >= fd_d.probabilities[i] - 1e-9);
      CHECK(hd_u.probabilities[i] >= fd_u.probabilities[i] - 1e-9);
    }
  }
}

TEST_CASE("curves stay monotone and bounded for random parameters") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> g(-95.0, -55.0), b(-120.0, -60.0), lam(2.0, 40.0);
  const std::vector<double> grid{-10.0, 0.0, 10.0, 20.0};
  for (int trial = 0; trial < 4; ++trial) {
    auto p = NetworkParams::defaults();
    p.gamma = {PowerThreshold::from_db(g(rng)), PowerThreshold::from_db(g(rng))};
    p.rsi_ratio = db_to_linear(b(rng));
    p.bs_density[1] = lam(rng) * kPerKm2;
    const AnalyticModel m(p);
    for (const auto& l : kCurveLabels) {
      const auto c = m.ccdf(l, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(c.probabilities[i] >= 0.0);
        CHECK(c.probabilities[i] <= 1.0);
        if (i) CHECK(c.probabilities[i] <= c.probabilities[i - 1] + 1e-9);
      }
    }
  }
}

TEST_CASE("analytic curves sit below the simulated ones") {
  SimulationConfig c;
  c.params = NetworkParams::defaults();
  c.snapshots = 40;
  c.slots = 10;
  c.seed = 3;
  c.grid_db = {-5.0, 0.0, 5.0, 10.0};
  const auto sim = run_simulation(c);
  const AnalyticModel m(c.params);
  for (const auto& l : kCurveLabels) {
    if (l.duplex == Duplex::HD) continue;
    const auto e = sim.stats.ccdf(l);
    const auto a = m.ccdf(l, c.grid_db);
    INFO(to_string(l));
    for (std::size_t i = 0; i < c.grid_db.size(); ++i)
      CHECK(a.probabilities[i] <= e.probabilities[i] + e.ci_half_width[i]);
  }
}

TEST_CASE("all-HD objective equals an independent summation") {
  const auto p = NetworkParams::defaults();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto in = synthetic_instance(seed, 4, 5, p);
    double want = 0.0;
    for (std::size_t m = 0; m < in.cells(); ++m)
      for (std::size_t u = 0; u < in.n[m]; ++u) {
        double down = in.sigma2, up = in.sigma2;
        for (std::size_t n = 0; n < in.cells(); ++n) {
          if (n == m) continue;
          down += in.i_bs2user[n][m][u];
          up += in.i_user2bs[n][m];
        }
        want += in.omega[m] * std::log2(in.p_down[m][u] * in.p_up[m][u] / (down * up));
      }
    CHECK(objective(in, Delta(in.cells(), 0)) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("thresholds reclassify every feasible delta") {
  const auto p = NetworkParams::defaults();
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto in = synthetic_instance(seed, 5, 6, p);
    for (std::size_t m = 0; m < in.cells(); ++m)
      for (std::size_t u = 1; u < in.n[m]; ++u) REQUIRE(in.p_down[m][u] < in.p_down[m][u - 1]);
    Delta d(in.cells());
    for (std::size_t m = 0; m < in.cells(); ++m) d[m] = rng() % (in.n[m] + 1);
    const auto g = thresholds_from_delta(in, d, ThresholdConvention::Consistent);
    CHECK(classify_with_thresholds(in, g) == d);
  }
}

TEST_CASE("greedy terminates with a nondecreasing trace") {
  const auto p = NetworkParams::defaults();
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto in = synthetic_instance(seed + 50000, 5, 4, p);
    for (RateForm f : {RateForm::Printed, RateForm::Shannon}) {
      const auto g = greedy_select(in, f);
      for (std::size_t s = 1; s < g.trace.size(); ++s) CHECK(g.trace[s] >= g.trace[s - 1]);
      CHECK(g.trace.size() <= static_cast<std::size_t>(lattice_size(in)));
    }
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "hdx/config.hpp"
#include "hdx/params.hpp"

using namespace hdx;

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(dbm_to_watts(46.0) == doctest::Approx(std::pow(10.0, 1.6)).epsilon(1e-14));
  CHECK(dbm_to_watts(46.0) == doctest::Approx(39.8107).epsilon(1e-6));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-200.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(watts_to_dbm(dbm_to_watts(x)) == doctest::Approx(x).epsilon(1e-12));
    CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("path loss") {
  CHECK(path_loss(1.0, 3.5) == 1.0);
  CHECK(path_loss(2.0, 2.0) == doctest::Approx(0.25));
  CHECK(path_loss(0.5, 3.5) == doctest::Approx(std::pow(2.0, 3.5)).epsilon(1e-14));
  CHECK(path_loss(0.5, 3.5) == doctest::Approx(11.3137).epsilon(1e-5));
  CHECK_THROWS_AS(path_loss(0.0, 3.5), std::domain_error);
  CHECK_THROWS_AS(path_loss(-1.0, 3.5), std::domain_error);
}

TEST_CASE("thermal noise") {
  CHECK(noise_power(1.0, -174.0) == doctest::Approx(3.981e-21).epsilon(1e-3));
  CHECK(watts_to_dbm(noise_power(1e7, -174.0)) == doctest::Approx(-104.0).epsilon(1e-12));
  CHECK(watts_to_dbm(noise_power(20e6, -174.0)) ==
        doctest::Approx(-174.0 + 10.0 * std::log10(20e6)).epsilon(1e-12));
  CHECK(watts_to_dbm(noise_power(20e6, -174.0)) == doctest::Approx(-101.0).epsilon(1e-3));
}

TEST_CASE("threshold sentinels") {
  CHECK(PowerThreshold::zero().admits(0.0));
  CHECK(PowerThreshold::zero().admits(1e-300));
  CHECK_FALSE(PowerThreshold::infinite().admits(1e300));
  CHECK(PowerThreshold::from_db(-kInf).is_zero());
  CHECK(PowerThreshold::from_db(kInf).is_infinite());
  const auto g = PowerThreshold::from_db(-71.0);
  CHECK(g.watts() == doctest::Approx(std::pow(10.0, -7.1)));
  CHECK(g.admits(g.watts()));
  CHECK_FALSE(g.admits(std::nextafter(g.watts(), 0.0)));
  CHECK_THROWS_AS(PowerThreshold::watts(-1.0), ParamError);
}

TEST_CASE("parameter validation") {
  auto p = NetworkParams::defaults();
  CHECK_NOTHROW(p.validate());
  p.alpha = 2.0;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = NetworkParams::defaults();
  p.bs_density[1] = 0.0;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = NetworkParams::defaults();
  p.bs_power[0] = -1.0;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = NetworkParams::defaults();
  p.gamma = {PowerThreshold::zero(), PowerThreshold::infinite()};
  CHECK_NOTHROW(p.validate());
  p = NetworkParams::defaults();
  CHECK(p.rsi_bs(Tier::One) == doctest::Approx(1e-7 * p.power(Tier::One)));
  CHECK(p.rsi_user() == doctest::Approx(1e-7 * p.user_power));
}

TEST_CASE("derived scales") {
  auto p = NetworkParams::defaults();
  const DerivedScales s(p);
  for (Tier k : kTiers) {
    const double expect = std::pow(p.power(k) / p.threshold(k).watts(), 1.0 / p.alpha);
    CHECK(s.delta(k) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(s.cap_delta(k, k, 123.4) == 123.4);
  }
  p.gamma = {PowerThreshold::zero(), PowerThreshold::infinite()};
  const DerivedScales e(p);
  CHECK(std::isinf(e.delta(Tier::One)));
  CHECK(e.delta(Tier::Two) == 0.0);
}

TEST_CASE("delta is nonincreasing in gamma and mu(delta) matches its closed form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> db(-120.0, -30.0), pw(0.0, 50.0), al(2.1, 6.0);
  for (int i = 0; i < 500; ++i) {
    auto p = NetworkParams::defaults();
    p.alpha = al(rng);
    p.bs_power = {dbm_to_watts(pw(rng)), dbm_to_watts(pw(rng))};
    const double g1 = db(rng), g2 = db(rng);
    p.gamma = {PowerThreshold::from_db(std::min(g1, g2)), PowerThreshold::from_db(std::min(g1, g2))};
    const DerivedScales lo(p);
    p.gamma = {PowerThreshold::from_db(std::max(g1, g2)), PowerThreshold::from_db(std::max(g1, g2))};
    const DerivedScales hi(p);
    for (Tier k : kTiers) {
      CHECK(hi.delta(k) <= lo.delta(k));
      const double closed = std::pow(p.power(other(k)) / p.threshold(k).watts(), 1.0 / p.alpha);
      CHECK(hi.mu(k, hi.delta(k)) == doctest::Approx(closed).epsilon(1e-12));
    }
  }
}

TEST_CASE("config parsing") {
  const auto p = parse_config(
      "# comment\n[densities]\nlambda1_per_km2 = 2\nlambda2_per_km2 = 20 ; inline\n"
      "[thresholds]\ngamma1_db = inf\ngamma2_db = -inf\nbeta_db = -inf\n");
  CHECK(p.density(Tier::One) == doctest::Approx(2e-6));
  CHECK(p.density(Tier::Two) == doctest::Approx(20e-6));
  CHECK(p.threshold(Tier::One).is_infinite());
  CHECK(p.threshold(Tier::Two).is_zero());
  CHECK(p.rsi_ratio == 0.0);
  CHECK(p.alpha == 3.5);

  CHECK_THROWS_AS(parse_config("lambda3_per_km2 = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = 3\nalpha = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = three\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha\n"), ConfigError);

  const auto d = NetworkParams::defaults();
  const auto back = parse_config(to_config_text(d));
  CHECK(back.alpha == d.alpha);
  CHECK(back.bs_power[0] == doctest::Approx(d.bs_power[0]).epsilon(1e-14));
  CHECK(back.threshold(Tier::Two).watts() == doctest::Approx(d.threshold(Tier::Two).watts()).epsilon(1e-14));

  auto base = d;
  base.user_density = 150e-6;
  CHECK(parse_config("alpha = 4\n", base).user_density == doctest::Approx(150e-6));
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hdx/kernels.hpp"

using namespace hdx;

namespace {

struct Field {
  std::vector<double> x, y, scale, u;
};

Field random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-3000.0, 3000.0), sc(0.01, 100.0), uu(1e-300, 1.0);
  Field f;
  for (std::size_t i = 0; i < n; ++i) {
    f.x.push_back(pos(rng));
    f.y.push_back(pos(rng));
    f.scale.push_back(sc(rng));
    f.u.push_back(i % 17 == 0 ? 1.0 : uu(rng));
  }
  return f;
}

}  // namespace

TEST_CASE("scalar kernels") {
  const std::vector<double> x{3.0, 0.0, 1.0}, y{4.0, 0.0, 0.0}, s{1.0, 1.0, 1.0};
  CHECK(kernels::scalar::argmin_scaled_dist(x.data(), y.data(), s.data(), 3, 0.0, 0.0) == 1);
  // Ties keep the first index.
  const std::vector<double> tx{1.0, -1.0}, ty{0.0, 0.0}, ts{2.0, 2.0};
  CHECK(kernels::scalar::argmin_scaled_dist(tx.data(), ty.data(), ts.data(), 2, 0.0, 0.0) == 0);

  std::vector<double> g(3);
  kernels::scalar::path_gain(x.data(), y.data(), 3, 0.0, 0.0, 2.0, 1e-3, g.data());
  CHECK(g[0] == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> u{1.0, std::exp(-2.0)};
  std::vector<double> e(2);
  kernels::scalar::neg_log(u.data(), 2, e.data());
  CHECK(e[0] == 0.0);
  CHECK(e[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(kernels::scalar::dot3(x.data(), x.data(), s.data(), 3) == 10.0);
}

TEST_CASE("dispatch can be pinned to scalar") {
  kernels::force_scalar(true);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  kernels::force_scalar(false);
  CHECK(kernels::active_isa() ==
        (kernels::avx2_available() ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
}

#if HDX_HAVE_AVX2
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available on this CPU; skipping");
    return;
  }
  // Lengths around the vector width exercise the tail loops.
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 1000u, 4097u}) {
    const Field f = random_field(n, n);
    for (int q = 0; q < 20; ++q) {
      const double px = f.x[q % n] * 0.5, py = f.y[(q * 7) % n] * 0.5;
      CHECK(kernels::avx2::argmin_scaled_dist(f.x.data(), f.y.data(), f.scale.data(), n, px, py) ==
            kernels::scalar::argmin_scaled_dist(f.x.data(), f.y.data(), f.scale.data(), n, px, py));
    }

    std::vector<double> a(n), b(n);
    for (double alpha : {2.5, 3.5, 4.0}) {
      kernels::avx2::path_gain(f.x.data(), f.y.data(), n, 10.0, -20.0, alpha, 1e-3, a.data());
      kernels::scalar::path_gain(f.x.data(), f.y.data(), n, 10.0, -20.0, alpha, 1e-3, b.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
    }
    // A point sitting on a node hits the distance floor in both variants.
    kernels::avx2::path_gain(f.x.data(), f.y.data(), n, f.x[0], f.y[0], 3.5, 1e-3, a.data());
    CHECK(a[0] == doctest::Approx(std::pow(1e-3, -3.5)).epsilon(1e-13));

    kernels::avx2::neg_log(f.u.data(), n, a.data());
    kernels::scalar::neg_log(f.u.data(), n, b.data());
    for (std::size_t i = 0; i < n; ++i) {
      if (b[i] == 0.0) {
        CHECK(std::abs(a[i]) <= 1e-300);
      } else {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
      }
    }

    const double da = kernels::avx2::dot3(f.x.data(), f.y.data(), f.scale.data(), n);
    const double db = kernels::scalar::dot3(f.x.data(), f.y.data(), f.scale.data(), n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(f.x[i] * f.y[i] * f.scale[i]);
    CHECK(std::abs(da - db) <= 1e-13 * mag);
  }
}
#endif

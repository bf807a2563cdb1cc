#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdx::quad {

/// Raised when the requested tolerance is not reached within the interval
/// budget. Carries the best estimate and its error bound.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

struct Options {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Kronrod 15-point abscissae (descending, last is the midpoint) and weights;
// the Gauss 7-point rule uses the odd-indexed abscissae.
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double s = f1[j] + f2[j];
    resk += kWgk[j] * s;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * s;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double value = resk * half;
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return Panel{a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod over the panels delimited by `points`
/// (strictly increasing, finite). Stops when the summed error estimate is
/// below max(abs_tol, rel_tol * |value|).
template <class F>
Result integrate_panels(F&& f, std::span<const double> points, const Options& opt = {}) {
  Result out;
  if (points.size() < 2) return out;
  std::priority_queue<detail::Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    detail::Panel p = detail::kronrod15(f, points[i], points[i + 1]);
    out.evaluations += 15;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  // Panels too narrow to split further are retired; their error still counts.
  double frozen_err = 0.0;
  int intervals = static_cast<int>(heap.size());
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_err > target()) {
    if (intervals >= opt.max_intervals) {
      throw QuadratureError("adaptive quadrature did not converge: estimate " +
                                std::to_string(total) + ", error " + std::to_string(total_err),
                            total, total_err);
    }
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen_err += worst.error;
      if (frozen_err > target()) {
        throw QuadratureError("adaptive quadrature hit roundoff limit: estimate " +
                                  std::to_string(total) + ", error " + std::to_string(total_err),
                              total, total_err);
      }
      continue;
    }
    detail::Panel left = detail::kronrod15(f, worst.a, mid);
    detail::Panel right = detail::kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum from the panels to shed the drift of incremental updates.
  double sum = 0.0;
  double err = frozen_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  if (!(b > a)) return {};
  const std::array<double, 2> pts{a, b};
  return integrate_panels(f, pts, opt);
}

/// Integral of f over [a, inf) through y = a + scale * t / (1 - t), t in [0, 1).
/// `scale` should sit near where the integrand turns over.
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {}) {
  if (std::isinf(a)) return {};
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double y = a + scale * t / one_minus;
    const double jac = scale / (one_minus * one_minus);
    const double v = f(y);
    return v == 0.0 ? 0.0 : v * jac;
  };
  // Split the unit interval so both the body and the algebraic tail are sampled.
  static constexpr std::array<double, 5> pts{0.0, 0.25, 0.5, 0.75, 1.0};
  return integrate_panels(mapped, pts, opt);
}

}  // namespace hdx::quad

#pragma once

// Integration plumbing shared by the generic model and the specialized limit
// forms. Only the numerics live here; each caller supplies its own integrand.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hdx/analytic.hpp"
#include "hdx/quadrature.hpp"

namespace hdx::detail {

inline void add_scale(std::vector<double>& scales, double s) {
  if (s > 0.0 && std::isfinite(s)) scales.push_back(s);
}

/// c / (c + y^alpha) evaluated as 1 / (1 + y^alpha / c).
inline double kernel(double c, double y, double alpha) {
  if (c <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double ya = std::exp(alpha * std::log(y));
  return 1.0 / (1.0 + ya / c);
}

/// Integral of g over [lo, hi]; hi may be +inf. `scales` are the lengths at
/// which g changes shape. The infinite case integrates in u = ln(y - lo),
/// where the integrand decays exponentially at both ends.
template <class G>
double radial_integral(G&& g, double lo, double hi, std::vector<double> scales, double alpha,
                       double tol) {
  if (!(hi > lo)) return 0.0;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  // The caller exponentiates the result, so a relative bound is as good as
  // the absolute one once the integral is large.
  quad::Options opt;
  opt.abs_tol = tol;
  opt.rel_tol = 1e-10;

  if (std::isfinite(hi)) {
    std::vector<double> pts{lo};
    for (double s : scales) {
      for (double m : {0.25, 1.0, 4.0}) {
        const double y = lo + m * s;
        if (y > lo && y < hi) pts.push_back(y);
      }
    }
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return quad::integrate_panels(g, pts, opt).value;
  }

  if (scales.empty()) scales.push_back(1.0);
  const double u_lo = std::log(scales.front()) - 28.0;
  const double u_hi = std::log(scales.back()) + 30.0 / std::max(alpha - 2.0, 0.05);
  std::vector<double> pts{u_lo};
  for (double s : scales) pts.push_back(std::log(s));
  pts.push_back(u_hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> filled;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    filled.push_back(pts[i]);
    const double gap = pts[i + 1] - pts[i];
    const int extra = static_cast<int>(gap / 10.0);
    for (int j = 1; j <= extra; ++j) filled.push_back(pts[i] + gap * j / (extra + 1));
  }
  filled.push_back(pts.back());
  auto in_u = [&](double u) {
    const double e = std::exp(u);
    const double v = g(lo + e);
    return v == 0.0 ? 0.0 : v * e;
  };
  return quad::integrate_panels(in_u, filled, opt).value;
}

/// Radius beyond which r exp(-pi c r^2) stays below `cutoff` times its value
/// at max(from, peak).
inline double pdf_tail_radius(double c, double from, double cutoff) {
  const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi * c);
  const double r0 = std::max(from, peak);
  auto log_f = [&](double r) { return std::log(r) - std::numbers::pi * c * r * r; };
  const double target = log_f(r0) + std::log(cutoff);
  double hi = r0 + peak;
  while (log_f(hi) > target) hi = r0 + 2.0 * (hi - r0);
  double lo = r0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_f(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

/// Panel boundaries for the serving-distance integral on [a, b]: the pdf
/// peak plus a ladder around `focus`, where the conditional CCDF turns over.
inline std::vector<double> outer_points(double a, double b, double pdf_density, double focus) {
  std::vector<double> pts{a, b};
  auto add = [&](double r) {
    if (r > a && r < b && std::isfinite(r)) pts.push_back(r);
  };
  add(1.0 / std::sqrt(2.0 * std::numbers::pi * pdf_density));
  if (focus > 0.0) {
    for (double m : {0.25, 0.5, 1.0, 2.0, 4.0}) add(m * focus);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// (1/(2 ln 2)) * integral over T of ccdf(T) / (1 + T), integrated in ln T.
/// Below t_min the CCDF is taken as its value at t_min; beyond t_max the
/// remainder is estimated from the T^(-2/alpha) decay and must be negligible.
template <class C>
double threshold_integral(C&& ccdf, const SpectralEfficiencyOptions& o, double alpha, double tol,
                          const std::string& what) {
  const double x_lo = std::log(o.t_min);
  const double x_hi = std::log(o.t_max);
  auto g = [&](double x) {
    const double t = std::exp(x);
    return ccdf(t) * (t / (1.0 + t));
  };
  std::vector<double> pts;
  const int panels = 6;
  for (int i = 0; i <= panels; ++i) pts.push_back(x_lo + (x_hi - x_lo) * i / panels);
  quad::Options opt;
  opt.abs_tol = tol;
  double body = quad::integrate_panels(g, pts, opt).value;
  body += std::log1p(o.t_min) * ccdf(o.t_min);
  const double tail = ccdf(o.t_max) * alpha / 2.0;
  if (tail > o.max_tail_fraction * body && tail > 1e-300) {
    throw TailTruncationError("spectral efficiency tail beyond T_max is not negligible for " + what +
                                  ": tail " + std::to_string(tail) + ", accumulated " +
                                  std::to_string(body),
                              tail, body);
  }
  return body / (2.0 * std::numbers::ln2);
}

}  // namespace hdx::detail

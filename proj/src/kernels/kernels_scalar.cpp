#include <algorithm>
#include <cmath>

#include "hdx/kernels.hpp"

namespace hdx::kernels::scalar {

std::size_t argmin_scaled_dist(const double* bx, const double* by, const double* scale,
                               std::size_t n, double x, double y) {
  std::size_t best = 0;
  double best_v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = bx[i] - x;
    const double dy = by[i] - y;
    const double v = (dx * dx + dy * dy) * scale[i];
    if (i == 0 || v < best_v) {
      best = i;
      best_v = v;
    }
  }
  return best;
}

void path_gain(const double* x, const double* y, std::size_t n, double px, double py,
               double alpha, double min_dist, double* out) {
  const double floor2 = min_dist * min_dist;
  const double h = -0.5 * alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - px;
    const double dy = y[i] - py;
    const double d2 = std::max(dx * dx + dy * dy, floor2);
    out[i] = std::exp(h * std::log(d2));
  }
}

void neg_log(const double* u, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -std::log(u[i]);
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

}  // namespace hdx::kernels::scalar

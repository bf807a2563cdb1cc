#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "hdx/kernels.hpp"

// Double-precision log/exp follow the classic Cephes rational approximations
// (argument reduction by frexp / ln 2 split into two constants).

namespace hdx::kernels::avx2 {
namespace {

inline __m256d polevl3(__m256d x, double c0, double c1, double c2) {
  return _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_set1_pd(c0), x, _mm256_set1_pd(c1)), x,
                         _mm256_set1_pd(c2));
}

inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), x);
  const __m256d xx = _mm256_mul_pd(x, x);
  const __m256d px = _mm256_mul_pd(
      x, polevl3(xx, 1.26177193074810590878E-4, 3.02994407707441961300E-2,
                 9.99999999999999999910E-1));
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), xx,
                              _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(q, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));
  // 2^n from the integer sitting in the low mantissa bits of n + 2^52 + 1023.
  const __m256d biased = _mm256_add_pd(n, _mm256_set1_pd(4503599627370496.0 + 1023.0));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  return _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
}

inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  // frexp: x = m * 2^e with m in [0.5, 1).
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256d e_raw = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(_mm256_set1_pd(4503599627370496.0)))),
      _mm256_set1_pd(4503599627370496.0 + 1022.0));
  const __m256i mant_bits =
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FE0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);

  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  const __m256d e = _mm256_sub_pd(e_raw, _mm256_and_pd(small, _mm256_set1_pd(1.0)));
  // m < sqrt(1/2): use 2m - 1, else m - 1.
  m = _mm256_add_pd(m, _mm256_and_pd(small, m));
  const __m256d z0 = _mm256_sub_pd(m, _mm256_set1_pd(1.0));

  const __m256d z = _mm256_mul_pd(z0, z0);
  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, z0, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, z0, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, z0, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, z0, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, z0, _mm256_set1_pd(7.70838733755885391666E0));
  __m256d q = _mm256_add_pd(z0, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, z0, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, z0, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, z0, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, z0, _mm256_set1_pd(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(z0, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d out = _mm256_add_pd(z0, y);
  out = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), out);
  return out;
}

}  // namespace

std::size_t argmin_scaled_dist(const double* bx, const double* by, const double* scale,
                               std::size_t n, double x, double y) {
  if (n < 8) return scalar::argmin_scaled_dist(bx, by, scale, n, x, y);
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vy = _mm256_set1_pd(y);
  __m256d best = _mm256_set1_pd(INFINITY);
  __m256d best_i = _mm256_set1_pd(-1.0);
  __m256d lane_i = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(bx + i), vx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(by + i), vy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d v = _mm256_mul_pd(d2, _mm256_loadu_pd(scale + i));
    const __m256d lt = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, v, lt);
    best_i = _mm256_blendv_pd(best_i, lane_i, lt);
    lane_i = _mm256_add_pd(lane_i, four);
  }
  alignas(32) double bv[4], bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_pd(bi, best_i);
  double best_v = bv[0];
  double best_idx = bi[0];
  for (int l = 1; l < 4; ++l) {
    if (bv[l] < best_v || (bv[l] == best_v && bi[l] < best_idx)) {
      best_v = bv[l];
      best_idx = bi[l];
    }
  }
  for (; i < n; ++i) {
    const double dx = bx[i] - x;
    const double dy = by[i] - y;
    const double v = (dx * dx + dy * dy) * scale[i];
    if (v < best_v) {
      best_v = v;
      best_idx = static_cast<double>(i);
    }
  }
  return static_cast<std::size_t>(best_idx);
}

void path_gain(const double* x, const double* y, std::size_t n, double px, double py,
               double alpha, double min_dist, double* out) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d floor2 = _mm256_set1_pd(min_dist * min_dist);
  const __m256d h = _mm256_set1_pd(-0.5 * alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vy);
    const __m256d d2 =
        _mm256_max_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), floor2);
    _mm256_storeu_pd(out + i, exp_pd(_mm256_mul_pd(h, log_pd(d2))));
  }
  if (i < n) scalar::path_gain(x + i, y + i, n - i, px, py, alpha, min_dist, out + i);
}

void neg_log(const double* u, std::size_t n, double* out) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(zero, log_pd(_mm256_loadu_pd(u + i))));
  }
  if (i < n) scalar::neg_log(u + i, n - i, out + i);
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)),
                           _mm256_loadu_pd(c + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)),
                           _mm256_loadu_pd(c + i + 4), acc1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

}  // namespace hdx::kernels::avx2

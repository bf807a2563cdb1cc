#include <atomic>

#include "hdx/kernels.hpp"

namespace hdx::kernels {
namespace {

std::atomic<bool> g_force_scalar{false};

bool detect_avx2() {
#if HDX_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

bool avx2_available() {
  static const bool ok = detect_avx2();
  return ok;
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

Isa active_isa() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

#if HDX_HAVE_AVX2
#define HDX_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define HDX_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

std::size_t argmin_scaled_dist(const double* bx, const double* by, const double* scale,
                               std::size_t n, double x, double y) {
  return HDX_DISPATCH(argmin_scaled_dist, bx, by, scale, n, x, y);
}

void path_gain(const double* x, const double* y, std::size_t n, double px, double py,
               double alpha, double min_dist, double* out) {
  HDX_DISPATCH(path_gain, x, y, n, px, py, alpha, min_dist, out);
}

void neg_log(const double* u, std::size_t n, double* out) { HDX_DISPATCH(neg_log, u, n, out); }

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  return HDX_DISPATCH(dot3, a, b, c, n);
}

}  // namespace hdx::kernels

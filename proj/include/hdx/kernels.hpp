#pragma once

#include <cstddef>

// Inner loops of the simulator. Each kernel has a scalar reference and, on
// x86-64, an AVX2 variant picked at first use from CPUID.

namespace hdx::kernels {

enum class Isa { Scalar, Avx2 };

/// ISA used by the dispatching entry points below.
Isa active_isa();
/// Pin dispatch to the scalar reference (for tests and A/B runs).
void force_scalar(bool on);
bool avx2_available();
const char* isa_name(Isa isa);

/// Index of the smallest ((bx-x)^2 + (by-y)^2) * scale; first index wins ties.
/// Bit-exact across variants. n must be > 0.
std::size_t argmin_scaled_dist(const double* bx, const double* by, const double* scale,
                               std::size_t n, double x, double y);

/// out[i] = max(|p_i - (px,py)|, min_dist)^-alpha.
void path_gain(const double* x, const double* y, std::size_t n, double px, double py,
               double alpha, double min_dist, double* out);

/// out[i] = -ln(u[i]) for u in (0, 1]: unit-mean exponential draws.
void neg_log(const double* u, std::size_t n, double* out);

/// Sum of a[i] * b[i] * c[i].
double dot3(const double* a, const double* b, const double* c, std::size_t n);

namespace scalar {
std::size_t argmin_scaled_dist(const double* bx, const double* by, const double* scale,
                               std::size_t n, double x, double y);
void path_gain(const double* x, const double* y, std::size_t n, double px, double py,
               double alpha, double min_dist, double* out);
void neg_log(const double* u, std::size_t n, double* out);
double dot3(const double* a, const double* b, const double* c, std::size_t n);
}  // namespace scalar

#if HDX_HAVE_AVX2
namespace avx2 {
std::size_t argmin_scaled_dist(const double* bx, const double* by, const double* scale,
                               std::size_t n, double x, double y);
void path_gain(const double* x, const double* y, std::size_t n, double px, double py,
               double alpha, double min_dist, double* out);
void neg_log(const double* u, std::size_t n, double* out);
double dot3(const double* a, const double* b, const double* c, std::size_t n);
}  // namespace avx2
#endif

}  // namespace hdx::kernels

#include "wdirac/simd.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define WDIRAC_X86 1
#endif

namespace wdirac::simd {

namespace ref {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rot2(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = y[i];
    y[i] = s * x[i] + c * t;
    x[i] = c * x[i] - s * t;
  }
}

double sum_sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

}  // namespace ref

#ifdef WDIRAC_X86

__attribute__((target("avx2,fma"))) static double dot_avx2(const double* x, const double* y,
                                                           std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc0);
  double acc = lane[0] + lane[1] + lane[2] + lane[3];
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

__attribute__((target("avx2,fma"))) static void axpy_avx2(double a, const double* x, double* y,
                                                          std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) static void rot2_avx2(double* x, double* y, double c, double s,
                                                          std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(sv, xv, _mm256_mul_pd(cv, yv)));
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(cv, xv, _mm256_mul_pd(sv, yv)));
  }
  for (; i < n; ++i) {
    const double t = y[i];
    y[i] = s * x[i] + c * t;
    x[i] = c * x[i] - s * t;
  }
}

__attribute__((target("avx2,fma"))) static double sum_sq_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double r = lane[0] + lane[1] + lane[2] + lane[3];
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

#endif  // WDIRAC_X86

namespace {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*rot2)(double*, double*, double, double, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
};

constexpr KernelTable kScalarTable{ref::dot, ref::axpy, ref::rot2, ref::sum_sq};

#ifdef WDIRAC_X86
constexpr KernelTable kAvx2Table{dot_avx2, axpy_avx2, rot2_avx2, sum_sq_avx2};
#endif

Isa g_isa = Isa::scalar;
const KernelTable* g_table = &kScalarTable;
bool g_initialized = false;

void select(Isa isa) {
#ifdef WDIRAC_X86
  if (isa == Isa::avx2 && cpu_has_avx2()) {
    g_isa = Isa::avx2;
    g_table = &kAvx2Table;
    return;
  }
#endif
  g_isa = Isa::scalar;
  g_table = &kScalarTable;
}

void init_once() {
  if (g_initialized) return;
  g_initialized = true;
  Isa pick = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("WDIRAC_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) pick = Isa::scalar;
    if (std::strcmp(env, "avx2") == 0) pick = Isa::avx2;
  }
  select(pick);
}

}  // namespace

bool cpu_has_avx2() {
#ifdef WDIRAC_X86
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active() {
  init_once();
  return g_isa;
}

void force(Isa isa) {
  g_initialized = true;
  select(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double dot(const double* x, const double* y, std::size_t n) {
  init_once();
  return g_table->dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  init_once();
  g_table->axpy(a, x, y, n);
}

void rot2(double* x, double* y, double c, double s, std::size_t n) {
  init_once();
  g_table->rot2(x, y, c, s, n);
}

double sum_sq(const double* x, std::size_t n) {
  init_once();
  return g_table->sum_sq(x, n);
}

}  // namespace wdirac::simd

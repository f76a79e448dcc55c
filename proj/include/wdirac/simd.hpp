#pragma once

#include <cstddef>

// Small vector-kernel core backing the dense solver inner loops.  Every kernel
// has a scalar reference implementation and (on x86) an AVX2+FMA variant; the
// active table is picked once at runtime from cpuid and can be overridden with
// the WDIRAC_SIMD environment variable or force() below.  Results of the two
// paths may differ in the last bits (fma, reassociation), never more.

namespace wdirac::simd {

enum class Isa { scalar, avx2 };

Isa active();
void force(Isa isa);
const char* isa_name(Isa isa);
bool cpu_has_avx2();

// y . x
double dot(const double* x, const double* y, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// plane rotation on two columns: (x, y) <- (c*x - s*y, s*x + c*y)
void rot2(double* x, double* y, double c, double s, std::size_t n);
// sum_i x_i^2
double sum_sq(const double* x, std::size_t n);

namespace ref {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rot2(double* x, double* y, double c, double s, std::size_t n);
double sum_sq(const double* x, std::size_t n);
}  // namespace ref

}  // namespace wdirac::simd

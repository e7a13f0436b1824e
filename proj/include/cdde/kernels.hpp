// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

// Dense vector kernels with a scalar reference and SIMD variants picked at
// runtime. Set CDDE_SIMD=scalar in the environment to force the reference path.
namespace cdde::kern {

enum class Isa { Scalar, Avx2, Neon };

bool isa_available(Isa isa) noexcept;
Isa active_isa() noexcept;
// Throws Unsupported if the CPU lacks the requested ISA.
void set_isa(Isa isa);
const char* isa_name(Isa isa) noexcept;

double dot(const double* x, const double* y, std::size_t n) noexcept;
// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
// out = x .* y (out may alias x or y)
void mul(const double* x, const double* y, double* out, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
// C(m x n) = A(m x k) * B(k x n), row-major, built from axpy rows.
void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k,
          std::size_t n) noexcept;

struct Table {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  void (*mul)(const double*, const double*, double*, std::size_t) noexcept;
  void (*scale)(double, double*, std::size_t) noexcept;
};

namespace scalar {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void mul(const double* x, const double* y, double* out, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void mul(const double* x, const double* y, double* out, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
}  // namespace avx2

namespace neon {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void mul(const double* x, const double* y, double* out, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
}  // namespace neon

}  // namespace cdde::kern

// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cdde/errors.hpp"
#include "cdde/kernels.hpp"

namespace cdde::kern {

namespace {

Table table_for(Isa isa) {
  switch (isa) {
#if defined(CDDE_HAVE_AVX2)
    case Isa::Avx2: return {avx2::dot, avx2::axpy, avx2::mul, avx2::scale};
#endif
#if defined(CDDE_HAVE_NEON)
    case Isa::Neon: return {neon::dot, neon::axpy, neon::mul, neon::scale};
#endif
    default: return {scalar::dot, scalar::axpy, scalar::mul, scalar::scale};
  }
}

Isa detect() {
  const char* env = std::getenv("CDDE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

struct State {
  std::atomic<Isa> isa;
  Table table;
  State() : isa(detect()), table(table_for(isa.load())) {}
};

State& state() {
  static State s;
  return s;
}

}  // namespace

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(CDDE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(CDDE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return state().isa.load(); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) fail(ErrorKind::Unsupported, std::string("ISA not available: ") + isa_name(isa));
  State& s = state();
  s.table = table_for(isa);
  s.isa.store(isa);
}

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

double dot(const double* x, const double* y, std::size_t n) noexcept { return state().table.dot(x, y, n); }

void axpy(double a, const double* x, double* y, std::size_t n) noexcept { state().table.axpy(a, x, y, n); }

void mul(const double* x, const double* y, double* out, std::size_t n) noexcept {
  state().table.mul(x, y, out, n);
}

void scale(double a, double* x, std::size_t n) noexcept { state().table.scale(a, x, n); }

void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k,
          std::size_t n) noexcept {
  const Table& t = state().table;
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * n;
    for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      double a = A[i * k + p];
      if (a != 0.0) t.axpy(a, B + p * n, c, n);
    }
  }
}

}  // namespace cdde::kern

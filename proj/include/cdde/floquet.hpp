// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cdde/dde_core.hpp"
#include "cdde/report.hpp"
#include "cdde/tensor_spectra.hpp"

namespace cdde {

// Nodal matrix of U(tau0 + gamma, tau0).
struct MonodromyMatrix {
  Grid grid;
  double gamma = 0.0;
  double tau0 = 0.0;
  DenseMatrix entries;
};

MonodromyMatrix monodromy(const PeriodicCoefficient& b, double tau0);
MonodromyMatrix monodromy(const DdeSystem& sys, double tau0);

struct Multiplier {
  cplx value;
  double modulus = 0.0;
  bool reliable = true;
};

struct FloquetSpectrum {
  ComplexSpectrum spectrum;          // full clustered spectrum
  std::vector<Multiplier> leading;   // first k_max entries of the expanded list
  double floor = 0.0;                // 10 h^2
};

FloquetSpectrum floquet_multipliers(const MonodromyMatrix& M, int k_max);

// Strict sign alternations of node values. Values with |v| <= rel_zero *
// max|v| count as zero and are skipped.
int sign_changes(const Segment& phi, double rel_zero = 0.0);

enum class LapParity { Minus, Plus };

int lap_from_sign_changes(int sc, LapParity parity);
int lap(const Segment& phi, LapParity parity, double rel_zero = 0.0);
inline LapParity parity_for_order(int m) { return m % 2 == 0 ? LapParity::Minus : LapParity::Plus; }

// Roots of zeta + alpha0 + beta0 exp(-zeta) = 0, closed under conjugation,
// by descending real part (ties: positive imaginary part first).
std::vector<cplx> char_roots(double alpha0, double beta0, int count);

// Principal and other branches of the Lambert W function.
cplx lambert_w(int branch, cplx z);

struct LowerBound {
  int k = 0;
  double bound = 0.0;
};

// Lower bounds on |lambda_k| for k <= k_max with k - m even.
std::vector<LowerBound> multiplier_lower_bounds(const DdeSystem& sys, int m, int k_max);

// Complex eigenvector for lambda by inverse iteration, phase fixed so the
// largest component is real and positive, unit sup norm.
std::vector<cplx> eigenvector(const MonodromyMatrix& M, cplx lambda, std::uint64_t seed = 1);
// Real part of eigenvector(M, lambda) as a segment.
Segment eigenfunction(const MonodromyMatrix& M, cplx lambda, std::uint64_t seed = 1);

struct LapRecord {
  int k = 0;
  cplx lambda;
  double modulus = 0.0;
  int sign_changes = -1;
  int lap = -1;
  bool reliable = true;
};

struct LapReport {
  LapParity parity = LapParity::Minus;
  std::vector<LapRecord> records;
  json to_json() const;
};

struct Theorem51Result {
  LapReport laps;
  CertReport cert;
  FloquetSpectrum multipliers;
  std::vector<LowerBound> bounds;
};

Theorem51Result theorem51_report(const DdeSystem& sys, int m, int k_max);

struct HomotopyPoint {
  double kappa = 0.0;
  Theorem51Result result;
};

struct HomotopyResult {
  std::vector<HomotopyPoint> points;
  std::vector<double> max_jump;  // per k, largest |lambda_k| change between neighbours
  bool all_passed = true;
};

// beta_kappa = kappa beta + (1 - kappa) beta0, alpha_kappa = kappa alpha.
HomotopyResult homotopy_scan(const DdeSystem& sys, int m, int steps, int k_max);

// Signed extremal constant b0 for the transformed coefficient.
double signed_extremum(const PeriodicCoefficient& b, int m);

}  // namespace cdde

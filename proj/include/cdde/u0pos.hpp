// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cdde/report.hpp"
#include "cdde/segfun.hpp"

namespace cdde {

double u_m_eval(const std::vector<double>& theta);
// Window product with 1 <= j-i <= q and j-i >= m-q; q in [0, m-1].
double u_m_q_eval(const std::vector<double>& theta, int q);

WedgeGrid u_m_grid(int m, const Grid& grid);
WedgeGrid u_m_q_grid(int m, int q, const Grid& grid);

enum class OpPart { Both, Zero, One };

// Simplex operator A = A0 + A1 (or one part) on grid values; exact for
// piecewise-linear data along each axis. m in [1, 5].
WedgeGrid apply_A(const WedgeGrid& phi, OpPart part = OpPart::Both);

// Exact A applied to a polynomial-like callable at one point, by tensor
// Gauss-Legendre with `points` nodes per variable.
double apply_A_exact(const std::function<double(const double*)>& f, int m, const std::vector<double>& theta,
                     OpPart part, int points = 6);

// B = B0 + B1 for m in {2, 3}. For m = 3 the point (-1,0,0) is left at 0.
WedgeGrid apply_B(const WedgeGrid& phi, OpPart part = OpPart::Both);

// B at an arbitrary point of T_m, interpolating phi and integrating with
// Gauss-Legendre on every cell piece.
double apply_B_at(const WedgeGrid& phi, const std::vector<double>& theta, OpPart part = OpPart::Both);

bool is_singular_point(int m, const int* idx, int n_sub);

std::pair<double, double> nu_eval(const std::vector<double>& theta);

struct CvDecomposition {
  double Q0 = 0.0;
  double Q1 = 0.0;
  WedgeGrid psi;                      // B phi - Q0 nu0 - Q1 nu1 at grid points
  double reconstruction_error = 0.0;  // at interior nodes, relative to sup |B phi|
  std::vector<double> probe_eps;
  std::vector<double> probe_psi;      // |psi| at (-1+eps, -eps^2, 0)
  bool probes_decay = false;
  int n_sub = 0;
  json to_json() const;
};

CvDecomposition decompose_CV(const WedgeGrid& phi);

struct RatioReport {
  int m = 0;
  int k = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  SimplexIndex argmin, argmax;
  std::string interior_rule;
  bool passed = false;
  bool exploratory = false;
  std::vector<std::string> warnings;
  std::vector<SimplexIndex> points;
  std::vector<double> ratios;
  json to_json() const;
};

// Interior points: j1 >= 2, jm <= n-2, consecutive gaps >= 2.
bool is_ratio_interior(int m, const int* idx, int n_sub);

RatioReport u0_ratio(const WedgeGrid& phi, int k);

CertReport pointwise_bound_check(int m, int q, const Grid& grid);

CertReport b_floor_check(const WedgeGrid& phi, int k);

// Nonnegative test inputs: "const", "bump" (interior tent) or "random".
WedgeGrid make_probe(int m, const Grid& grid, const std::string& kind, std::uint64_t seed = 0);

}  // namespace cdde

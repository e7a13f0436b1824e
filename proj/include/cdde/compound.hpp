// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cdde/dde_core.hpp"
#include "cdde/report.hpp"
#include "cdde/segfun.hpp"

namespace cdde {

struct ConeReport {
  double min_value = 0.0;
  SimplexIndex argmin;
  bool passed = false;
  double tolerance = 0.0;
};

enum class SplitChoice { Smallest, Largest };

// Exterior-power step W(tau + eta, tau) evaluated on the grid of T_m.
WedgeGrid wedge_step(const PeriodicCoefficient& b, double tau, double eta, const WedgeGrid& phi,
                     SplitChoice choice = SplitChoice::Smallest);
WedgeGrid wedge_step_ticks(const PeriodicCoefficient& b, long tau_ticks, int eta_ticks, const WedgeGrid& phi,
                           SplitChoice choice = SplitChoice::Smallest);
WedgeGrid wedge_evolve(const PeriodicCoefficient& b, double tau, double t, const WedgeGrid& phi);

// Full cube storage (n+1)^m, first coordinate most significant.
struct CubeGrid {
  int m = 0;
  Grid grid;
  std::vector<double> values;
};

CubeGrid antisymmetric_cube(const WedgeGrid& phi);
WedgeGrid restrict_to_simplex(const CubeGrid& cube);
// Applies the one-variable step in each coordinate; order lists coordinates
// (default 0..m-1).
CubeGrid tensor_oracle_step(const PeriodicCoefficient& b, double tau, double eta, const CubeGrid& phi,
                            const std::vector<int>& order = {});

// Two-term formula for m = 2, eta = 1 at one grid point.
double m2_closed_form(const PeriodicCoefficient& b, double tau, const WedgeGrid& phi, const SimplexIndex& theta);

ConeReport cone_check(const WedgeGrid& phi, double tolerance);

// Uniform [0,1) values on T_m, zero where a coordinate repeats.
WedgeGrid random_cone_element(int m, const Grid& grid, std::mt19937_64& rng);
// Uniform [-1,1) values on T_m, zero where a coordinate repeats.
WedgeGrid random_antisymmetric(int m, const Grid& grid, std::mt19937_64& rng);

CertReport positivity_certificate(const PeriodicCoefficient& b, double tau, double eta, int m, int trials,
                                  std::uint64_t seed);

struct DetWindow {
  double t0 = 0.0;
  double t1 = 3.0;
};

// Determinant sign check for an explicit list of solutions.
CertReport leading_det_check(const std::vector<Trajectory>& trajs, DetWindow window, double rel_tol = 1e-8);
// Constant coefficients: leading solutions from characteristic roots.
CertReport leading_det_check(double alpha0, double beta0, int m, DetWindow window, const Grid& grid,
                             double rel_tol = 1e-8);
// Periodic coefficients: leading solutions from monodromy eigenvectors.
CertReport leading_det_check(const DdeSystem& sys, int m, DetWindow window, double rel_tol = 1e-8);

}  // namespace cdde

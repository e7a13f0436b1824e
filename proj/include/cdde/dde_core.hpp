// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "cdde/segfun.hpp"

namespace cdde {

enum class SignClass { NonNeg, NonPos, None };

const char* sign_class_name(SignClass s) noexcept;

// gamma-periodic coefficient sampled at spacing h on one period.
struct PeriodicCoefficient {
  Grid grid;
  int period_ticks = 0;
  std::vector<double> samples;
  SignClass sign = SignClass::None;

  double gamma() const { return static_cast<double>(period_ticks) / grid.n_sub; }
  double at_ticks(long k) const {
    long r = k % period_ticks;
    if (r < 0) r += period_ticks;
    return samples[static_cast<std::size_t>(r)];
  }
  double eval(double t) const;
  // Integral over one period (trapezoid on the periodic samples).
  double period_integral() const;
  double period_abs_integral() const;
  double min_sample() const;
  double max_sample() const;
};

PeriodicCoefficient make_coefficient(const Grid& grid, double gamma, const std::function<double(double)>& f,
                                     SignClass sign = SignClass::None);
PeriodicCoefficient constant_coefficient(const Grid& grid, double gamma, double c,
                                         SignClass sign = SignClass::None);
// Throws InvalidArgument if a sample violates the declared sign class.
void check_sign_class(const PeriodicCoefficient& c);

struct DdeSystem {
  PeriodicCoefficient alpha;
  PeriodicCoefficient beta;
  int m = 0;
};

void validate_system(const DdeSystem& sys);

// mu(t) = exp(int_0^t alpha) on grid ticks.
struct MuSeries {
  Grid grid;
  int period_ticks = 0;
  std::vector<double> log_mu;  // one period, log_mu[0] = 0
  double log_growth = 0.0;     // int over one period

  double log_at_ticks(long k) const;
  double at_ticks(long k) const;
  double eval(double t) const;
};

struct Transformed {
  MuSeries mu;
  PeriodicCoefficient b;
};

Transformed transform(const DdeSystem& sys);

// One application of U(tau + eta, tau) for x'(t) = -b(t) x(t-1); eta in (0,1].
Segment step(const PeriodicCoefficient& b, double tau, double eta, const Segment& psi);
// Tick form; out must not alias psi; eta_ticks in [1, n_sub].
void step_ticks(const PeriodicCoefficient& b, long tau_ticks, int eta_ticks, const double* psi, double* out);

Trajectory solve(const PeriodicCoefficient& b, double tau, double T, const Segment& phi);
Trajectory solve_ticks(const PeriodicCoefficient& b, long tau_ticks, long T_ticks, const Segment& phi);
Trajectory solve_untransformed(const DdeSystem& sys, double tau, double T, const Segment& phi);

}  // namespace cdde

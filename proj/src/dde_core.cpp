// SPDX-License-Identifier: Apache-2.0
#include "cdde/dde_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdde/errors.hpp"
#include "cdde/kernels.hpp"

namespace cdde {

const char* sign_class_name(SignClass s) noexcept {
  switch (s) {
    case SignClass::NonNeg: return "nonneg";
    case SignClass::NonPos: return "nonpos";
    case SignClass::None: return "none";
  }
  return "none";
}

double PeriodicCoefficient::eval(double t) const {
  const double g = gamma();
  double r = std::fmod(t, g);
  if (r < 0) r += g;
  double x = r * grid.n_sub;
  long i = static_cast<long>(std::floor(x));
  double f = x - static_cast<double>(i);
  return (1.0 - f) * at_ticks(i) + f * at_ticks(i + 1);
}

double PeriodicCoefficient::period_integral() const {
  double s = 0.0;
  for (double v : samples) s += v;
  return s * grid.h;
}

double PeriodicCoefficient::period_abs_integral() const {
  // Exact integral of |interpolant| per cell, splitting at sign changes.
  double s = 0.0;
  for (int k = 0; k < period_ticks; ++k) {
    double a = at_ticks(k), b = at_ticks(k + 1);
    if ((a >= 0 && b >= 0) || (a <= 0 && b <= 0)) {
      s += 0.5 * grid.h * std::fabs(a + b);
    } else {
      s += 0.5 * grid.h * (a * a + b * b) / (std::fabs(a) + std::fabs(b));
    }
  }
  return s;
}

double PeriodicCoefficient::min_sample() const { return *std::min_element(samples.begin(), samples.end()); }
double PeriodicCoefficient::max_sample() const { return *std::max_element(samples.begin(), samples.end()); }

PeriodicCoefficient make_coefficient(const Grid& grid, double gamma, const std::function<double(double)>& f,
                                     SignClass sign) {
  require(gamma > 0, "period gamma must be positive");
  long p = to_ticks(gamma, grid.n_sub, "gamma");
  require(p >= 1 && p <= (1L << 24), "period out of range");
  PeriodicCoefficient c;
  c.grid = grid;
  c.period_ticks = static_cast<int>(p);
  c.sign = sign;
  c.samples.resize(static_cast<std::size_t>(p));
  for (long k = 0; k < p; ++k) {
    double v = f(static_cast<double>(k) / grid.n_sub);
    require(std::isfinite(v), "coefficient sample is not finite");
    c.samples[static_cast<std::size_t>(k)] = v;
  }
  check_sign_class(c);
  return c;
}

PeriodicCoefficient constant_coefficient(const Grid& grid, double gamma, double c, SignClass sign) {
  return make_coefficient(grid, gamma, [c](double) { return c; }, sign);
}

void check_sign_class(const PeriodicCoefficient& c) {
  if (c.sign == SignClass::NonNeg && c.min_sample() < 0)
    fail(ErrorKind::InvalidArgument, "coefficient declared nonneg has a negative sample");
  if (c.sign == SignClass::NonPos && c.max_sample() > 0)
    fail(ErrorKind::InvalidArgument, "coefficient declared nonpos has a positive sample");
}

void validate_system(const DdeSystem& sys) {
  require(sys.alpha.grid == sys.beta.grid, "alpha and beta must share a grid");
  require(sys.alpha.period_ticks == sys.beta.period_ticks, "alpha and beta must share a period");
  check_sign_class(sys.alpha);
  check_sign_class(sys.beta);
}

double MuSeries::log_at_ticks(long k) const {
  long q = k / period_ticks, r = k % period_ticks;
  if (r < 0) r += period_ticks, q -= 1;
  return static_cast<double>(q) * log_growth + log_mu[static_cast<std::size_t>(r)];
}

double MuSeries::at_ticks(long k) const { return std::exp(log_at_ticks(k)); }

double MuSeries::eval(double t) const {
  double x = t * grid.n_sub;
  long i = static_cast<long>(std::floor(x));
  double f = x - static_cast<double>(i);
  return std::exp((1.0 - f) * log_at_ticks(i) + f * log_at_ticks(i + 1));
}

Transformed transform(const DdeSystem& sys) {
  validate_system(sys);
  const PeriodicCoefficient& a = sys.alpha;
  const int P = a.period_ticks;
  const int n = a.grid.n_sub;
  Transformed out;
  out.mu.grid = a.grid;
  out.mu.period_ticks = P;
  out.mu.log_mu.assign(static_cast<std::size_t>(P) + 1, 0.0);
  for (int k = 0; k < P; ++k)
    out.mu.log_mu[k + 1] = out.mu.log_mu[k] + 0.5 * a.grid.h * (a.at_ticks(k) + a.at_ticks(k + 1));
  out.mu.log_growth = out.mu.log_mu[P];
  out.mu.log_mu.pop_back();
  out.b = sys.beta;
  for (int k = 0; k < P; ++k)
    out.b.samples[k] = sys.beta.samples[k] * std::exp(out.mu.log_at_ticks(k) - out.mu.log_at_ticks(k - n));
  return out;
}

void step_ticks(const PeriodicCoefficient& b, long tau_ticks, int eta_ticks, const double* psi, double* out) {
  const int n = b.grid.n_sub;
  const int e = eta_ticks;
  const double h = b.grid.h;
  for (int i = 0; i <= n - e; ++i) out[i] = psi[i + e];
  if (e == 0) return;
  double bw[1024];
  std::vector<double> big;
  double* f = bw;
  if (e + 1 > 1024) {
    big.resize(static_cast<std::size_t>(e) + 1);
    f = big.data();
  }
  for (int j = 0; j <= e; ++j) f[j] = b.at_ticks(tau_ticks + j);
  kern::mul(f, psi, f, static_cast<std::size_t>(e) + 1);
  double acc = 0.0;
  for (int i = n - e + 1; i <= n; ++i) {
    const int J = i + e - n;
    acc += 0.5 * h * (f[J - 1] + f[J]);
    out[i] = psi[n] - acc;
  }
}

Segment step(const PeriodicCoefficient& b, double tau, double eta, const Segment& psi) {
  const int n = b.grid.n_sub;
  require(psi.grid == b.grid, "segment and coefficient grids differ");
  require(psi.values.size() == static_cast<std::size_t>(n) + 1, "segment length mismatch");
  require(eta > 0 && eta <= 1.0 + 1e-12, "eta must lie in (0, 1]");
  long tk = to_ticks(tau, n, "tau");
  long ek = to_ticks(eta, n, "eta");
  Segment out{psi.grid, std::vector<double>(psi.values.size())};
  step_ticks(b, tk, static_cast<int>(ek), psi.values.data(), out.values.data());
  return out;
}

Trajectory solve_ticks(const PeriodicCoefficient& b, long tau_ticks, long T_ticks, const Segment& phi) {
  const int n = b.grid.n_sub;
  require(phi.grid == b.grid, "segment and coefficient grids differ");
  require(T_ticks >= tau_ticks, "final time precedes initial time");
  Trajectory tr;
  tr.grid = b.grid;
  tr.t0_ticks = tau_ticks;
  tr.samples.reserve(static_cast<std::size_t>(n + 1 + (T_ticks - tau_ticks)));
  tr.samples = phi.values;
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  long cur = tau_ticks;
  while (cur < T_ticks) {
    const int e = static_cast<int>(std::min<long>(n, T_ticks - cur));
    const double* seg = tr.samples.data() + (tr.samples.size() - static_cast<std::size_t>(n) - 1);
    step_ticks(b, cur, e, seg, out.data());
    tr.samples.insert(tr.samples.end(), out.begin() + (n - e + 1), out.end());
    cur += e;
  }
  return tr;
}

Trajectory solve(const PeriodicCoefficient& b, double tau, double T, const Segment& phi) {
  const int n = b.grid.n_sub;
  long tk = to_ticks(tau, n, "tau");
  long Tk = to_ticks(T, n, "T");
  return solve_ticks(b, tk, Tk, phi);
}

Trajectory solve_untransformed(const DdeSystem& sys, double tau, double T, const Segment& phi) {
  Transformed tf = transform(sys);
  const int n = tf.b.grid.n_sub;
  long tk = to_ticks(tau, n, "tau");
  long Tk = to_ticks(T, n, "T");
  Segment y0 = phi;
  for (int j = 0; j <= n; ++j) y0.values[j] *= tf.mu.at_ticks(tk - n + j);
  Trajectory tr = solve_ticks(tf.b, tk, Tk, y0);
  const long start = tk - n;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) tr.samples[k] /= tf.mu.at_ticks(start + static_cast<long>(k));
  return tr;
}

}  // namespace cdde

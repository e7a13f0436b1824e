// SPDX-License-Identifier: Apache-2.0
#include "cdde/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "cdde/errors.hpp"
#include "cdde/parallel.hpp"

namespace cdde {

namespace {

double order_sign(int m) { return m % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

MonodromyMatrix monodromy(const PeriodicCoefficient& b, double tau0) {
  const int n = b.grid.n_sub;
  const long tk = to_ticks(tau0, n, "tau0");
  const int P = b.period_ticks;
  require(P >= 1, "period must be positive");
  MonodromyMatrix M;
  M.grid = b.grid;
  M.gamma = b.gamma();
  M.tau0 = tau0;
  M.entries = DenseMatrix(n + 1, n + 1);
  parallel_for(static_cast<std::size_t>(n) + 1, [&](std::size_t j) {
    std::vector<double> cur(static_cast<std::size_t>(n) + 1, 0.0), nxt(cur.size());
    cur[j] = 1.0;
    long c = tk;
    while (c < tk + P) {
      const int e = static_cast<int>(std::min<long>(n, tk + P - c));
      step_ticks(b, c, e, cur.data(), nxt.data());
      std::swap(cur, nxt);
      c += e;
    }
    for (int i = 0; i <= n; ++i) M.entries(i, static_cast<int>(j)) = cur[i];
  });
  return M;
}

MonodromyMatrix monodromy(const DdeSystem& sys, double tau0) {
  const Transformed tf = transform(sys);
  MonodromyMatrix M = monodromy(tf.b, tau0);
  const int n = tf.b.grid.n_sub;
  const long tk = to_ticks(tau0, n, "tau0");
  std::vector<double> d(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) d[j] = tf.mu.at_ticks(tk - n + j);
  const double shrink = std::exp(-tf.mu.log_growth);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) M.entries(i, j) *= shrink * d[j] / d[i];
  return M;
}

FloquetSpectrum floquet_multipliers(const MonodromyMatrix& M, int k_max) {
  require(k_max >= 1 && k_max <= M.entries.rows, "k_max must lie in [1, dimension]");
  FloquetSpectrum fs;
  fs.spectrum = eigenvalues(M.entries);
  fs.floor = 10.0 * M.grid.h * M.grid.h;
  for (int k = 0; k < k_max; ++k) {
    const cplx z = fs.spectrum.expanded[static_cast<std::size_t>(k)];
    fs.leading.push_back({z, std::abs(z), std::abs(z) >= fs.floor});
  }
  return fs;
}

int sign_changes(const Segment& phi, double rel_zero) {
  const double mx = phi.sup_norm();
  if (mx == 0.0) fail(ErrorKind::InvalidArgument, "sign_changes: segment vanishes at every node");
  const double thr = rel_zero * mx;
  int sc = 0;
  int last = 0;
  for (double v : phi.values) {
    if (std::fabs(v) <= thr) continue;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++sc;
    last = s;
  }
  return sc;
}

int lap_from_sign_changes(int sc, LapParity parity) {
  require(sc >= 0, "sign change count must be nonnegative");
  const bool odd = sc % 2 == 1;
  if (parity == LapParity::Minus) return odd ? sc : sc + 1;
  return odd ? sc + 1 : sc;
}

int lap(const Segment& phi, LapParity parity, double rel_zero) {
  return lap_from_sign_changes(sign_changes(phi, rel_zero), parity);
}

std::vector<LowerBound> multiplier_lower_bounds(const DdeSystem& sys, int m, int k_max) {
  require(m >= 1 && m <= kMaxOrder, "order m out of range");
  require(k_max >= 1 && k_max <= 63, "k_max out of range");
  const Transformed tf = transform(sys);
  const double b0 = signed_extremum(tf.b, m);
  if (order_sign(m) * b0 <= 0.0)
    fail(ErrorKind::InvalidArgument, "(-1)^m b must be bounded below by a positive constant");
  const double gamma = tf.b.gamma();
  const double alpha0 = sys.alpha.period_integral() / gamma;
  const double logQ = tf.b.period_abs_integral();
  const std::vector<cplx> z = char_roots(0.0, b0, k_max + 1);
  std::vector<LowerBound> out;
  double sum = 0.0;
  for (int k = 1; k <= k_max && k <= static_cast<int>(z.size()); ++k) {
    sum += z[static_cast<std::size_t>(k - 1)].real();
    if ((k - m) % 2 != 0) continue;
    const double lb = std::exp(-(k - 1) * logQ - gamma * alpha0 + gamma * sum);
    out.push_back({k, lb});
  }
  return out;
}

double signed_extremum(const PeriodicCoefficient& b, int m) {
  const double s = order_sign(m);
  double lo = std::numeric_limits<double>::infinity();
  for (double v : b.samples) lo = std::min(lo, s * v);
  return s * lo;
}

std::vector<cplx> eigenvector(const MonodromyMatrix& M, cplx lambda, std::uint64_t seed) {
  const DenseMatrix& A = M.entries;
  const int n = A.rows;
  const double scale = std::max(norm_inf(A), std::numeric_limits<double>::min());
  cplx shift = lambda;
  ComplexLU lu(A, shift);
  if (lu.singular()) {
    shift = lambda + cplx(1e-13 * scale, 0.0);
    lu = ComplexLU(A, shift);
    if (lu.singular()) fail(ErrorKind::NumericFailure, "eigenvector: shifted matrix is singular");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = cplx(u(rng), u(rng));
  auto normalize = [&]() {
    double mx = 0.0;
    for (const auto& x : v) mx = std::max(mx, std::abs(x));
    if (!(mx > 0.0) || !std::isfinite(mx)) fail(ErrorKind::NumericFailure, "eigenvector: iteration broke down");
    for (auto& x : v) x /= mx;
  };
  for (int sweep = 0; sweep < 3; ++sweep) {
    lu.solve(v);
    normalize();
  }
  std::size_t big = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[big])) big = i;
  const cplx ph = std::conj(v[big]) / std::abs(v[big]);
  for (auto& x : v) x *= ph;
  normalize();
  v[big] = cplx(1.0, 0.0);
  double res = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx s = -lambda * v[static_cast<std::size_t>(i)];
    const double* r = A.row(i);
    for (int j = 0; j < n; ++j) s += r[j] * v[static_cast<std::size_t>(j)];
    res = std::max(res, std::abs(s));
  }
  if (res > 1e-6 * std::max(scale, std::abs(lambda)))
    fail(ErrorKind::NumericFailure, "eigenvector: residual " + std::to_string(res) +
                                        " too large; value is not an eigenvalue of the matrix");
  return v;
}

Segment eigenfunction(const MonodromyMatrix& M, cplx lambda, std::uint64_t seed) {
  const std::vector<cplx> v = eigenvector(M, lambda, seed);
  Segment s{M.grid, std::vector<double>(v.size())};
  for (std::size_t i = 0; i < v.size(); ++i) s.values[i] = v[i].real();
  return s;
}

json LapReport::to_json() const {
  json recs = json::array();
  for (const auto& r : records) {
    recs.push_back({{"k", r.k},
                    {"re", num(r.lambda.real())},
                    {"im", num(r.lambda.imag())},
                    {"modulus", num(r.modulus)},
                    {"sign_changes", r.sign_changes},
                    {"lap", r.lap},
                    {"reliable", r.reliable}});
  }
  return {{"parity", parity == LapParity::Minus ? "V-" : "V+"}, {"records", recs}};
}

Theorem51Result theorem51_report(const DdeSystem& sys, int m, int k_max) {
  validate_system(sys);
  require(m >= 1 && m <= kMaxOrder, "order m out of range");
  const double s = order_sign(m);
  for (std::size_t k = 0; k < sys.beta.samples.size(); ++k)
    if (s * sys.beta.samples[k] < 0)
      fail(ErrorKind::InvalidArgument, "(-1)^m beta must be nonnegative; violated at t = " +
                                           std::to_string(static_cast<double>(k) / sys.beta.grid.n_sub));
  const int dim = sys.beta.grid.n_sub + 1;
  require(k_max >= 1 && k_max < dim, "k_max must lie in [1, n_sub]");

  Theorem51Result out;
  const MonodromyMatrix M = monodromy(sys, 0.0);
  out.multipliers = floquet_multipliers(M, k_max + 1);
  const auto& L = out.multipliers.leading;
  const double floor = out.multipliers.floor;
  out.laps.parity = parity_for_order(m);
  for (int k = 1; k <= k_max; ++k) {
    const Multiplier& mu = L[static_cast<std::size_t>(k - 1)];
    LapRecord rec;
    rec.k = k;
    rec.lambda = mu.value;
    rec.modulus = mu.modulus;
    rec.reliable = mu.reliable;
    if (mu.reliable) {
      const Segment ef = eigenfunction(M, mu.value, static_cast<std::uint64_t>(k));
      rec.sign_changes = sign_changes(ef, 1e-10);
      rec.lap = lap_from_sign_changes(rec.sign_changes, out.laps.parity);
    }
    out.laps.records.push_back(rec);
  }

  CertReport& cert = out.cert;
  cert.name = "theorem51";
  cert.passed = true;
  cert.min_value = std::numeric_limits<double>::infinity();
  cert.tolerance = 1e-6;
  json checks = json::array();
  auto J = [&](int k) { return out.laps.records[static_cast<std::size_t>(k - 1)].lap; };
  for (int k = 1; k <= k_max; ++k) {
    if ((k - m) % 2 != 0) continue;
    if (k == 1 && m % 2 == 0) continue;
    const Multiplier& lk = L[static_cast<std::size_t>(k - 1)];
    const Multiplier& next = L[static_cast<std::size_t>(k)];
    json c = {{"k", k}};
    if (!lk.reliable) {
      c["skipped"] = "below discretization floor";
      checks.push_back(c);
      continue;
    }
    const double gap = lk.modulus - next.modulus;
    const bool gap_ok = gap > 0.0;
    bool lap_ok, prod_ok;
    if (k == 1) {
      lap_ok = J(1) == 0;
      prod_ok = std::fabs(lk.value.imag()) <= 1e-6 * lk.modulus && lk.value.real() > 0.0;
      c["lambda_re"] = num(lk.value.real());
      c["lambda_im"] = num(lk.value.imag());
    } else {
      lap_ok = J(k - 1) == k - 1 && J(k) == k - 1;
      const cplx p = L[static_cast<std::size_t>(k - 2)].value * lk.value;
      prod_ok = std::fabs(p.imag()) <= 1e-6 * std::abs(p) && p.real() > 0.0;
      c["product_re"] = num(p.real());
      c["product_im"] = num(p.imag());
    }
    c["gap"] = num(gap);
    c["gap_ok"] = gap_ok;
    c["lap_ok"] = lap_ok;
    c["product_ok"] = prod_ok;
    checks.push_back(c);
    if (gap < cert.min_value) {
      cert.min_value = gap;
      cert.argmin = {k};
    }
    cert.passed = cert.passed && gap_ok && lap_ok && prod_ok;
  }
  if (!std::isfinite(cert.min_value)) cert.min_value = 0.0;

  const double b0 = signed_extremum(transform(sys).b, m);
  json bj = json::array();
  if (s * b0 > 0.0) {
    out.bounds = multiplier_lower_bounds(sys, m, k_max);
    for (const auto& lb : out.bounds) {
      const double mod = L[static_cast<std::size_t>(lb.k - 1)].modulus;
      const bool ok = mod >= lb.bound;
      cert.passed = cert.passed && ok;
      bj.push_back({{"k", lb.k}, {"bound", num(lb.bound)}, {"modulus", num(mod)}, {"holds", ok}});
    }
  } else {
    cert.warnings.push_back("coefficient touches zero; multiplier lower bounds not available");
  }
  cert.config_echo = {{"m", m}, {"k_max", k_max}, {"n_sub", sys.beta.grid.n_sub}, {"gamma", sys.beta.gamma()}};
  cert.details = {{"checks", checks}, {"bounds", bj}, {"floor", num(floor)}, {"laps", out.laps.to_json()},
                  {"conjugate_pairs_ok", out.multipliers.spectrum.conjugate_pairs_ok}};
  return out;
}

HomotopyResult homotopy_scan(const DdeSystem& sys, int m, int steps, int k_max) {
  validate_system(sys);
  require(steps >= 1, "homotopy steps must be positive");
  const double b0 = signed_extremum(sys.beta, m);
  HomotopyResult hr;
  hr.points.resize(static_cast<std::size_t>(steps) + 1);
  parallel_for(hr.points.size(), [&](std::size_t i) {
    const double kappa = static_cast<double>(i) / steps;
    DdeSystem s = sys;
    for (auto& v : s.alpha.samples) v *= kappa;
    for (auto& v : s.beta.samples) v = kappa * v + (1.0 - kappa) * b0;
    hr.points[i] = {kappa, theorem51_report(s, m, k_max)};
  });
  hr.max_jump.assign(static_cast<std::size_t>(k_max), 0.0);
  for (std::size_t i = 0; i < hr.points.size(); ++i) {
    hr.all_passed = hr.all_passed && hr.points[i].result.cert.passed;
    if (i == 0) continue;
    for (int k = 0; k < k_max; ++k) {
      const double a = hr.points[i - 1].result.multipliers.leading[static_cast<std::size_t>(k)].modulus;
      const double c = hr.points[i].result.multipliers.leading[static_cast<std::size_t>(k)].modulus;
      hr.max_jump[static_cast<std::size_t>(k)] = std::max(hr.max_jump[static_cast<std::size_t>(k)], std::fabs(c - a));
    }
  }
  return hr;
}

}  // namespace cdde

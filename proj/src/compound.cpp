// SPDX-License-Identifier: Apache-2.0
#include "cdde/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cdde/errors.hpp"
#include "cdde/floquet.hpp"
#include "cdde/kernels.hpp"
#include "cdde/parallel.hpp"
#include "simplex_box.hpp"

namespace cdde {

namespace {

std::vector<double> node_weights(const PeriodicCoefficient& b, long tau_ticks) {
  const int n = b.grid.n_sub;
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) g[j] = b.at_ticks(tau_ticks + j);
  return g;
}

int ipow_sign(long e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace

WedgeGrid wedge_step_ticks(const PeriodicCoefficient& b, long tau_ticks, int eta_ticks, const WedgeGrid& phi,
                           SplitChoice choice) {
  const int n = b.grid.n_sub;
  const int m = phi.m;
  require(phi.grid == b.grid, "wedge and coefficient grids differ");
  require(eta_ticks >= 1 && eta_ticks <= n, "eta must lie in (0, 1]");
  const int e = eta_ticks;
  const std::vector<double> g = node_weights(b, tau_ticks);
  const detail::AxisTables tables(phi, g);
  WedgeGrid out = make_wedge(m, phi.grid);

  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    int a = 0;
    for (int p = 0; p < m; ++p) {
      if (choice == SplitChoice::Smallest ? idx[p] < n - e : idx[p] <= n - e) ++a;
    }
    double val;
    if (a == m) {
      int shifted[kMaxOrder];
      for (int p = 0; p < m; ++p) shifted[p] = idx[p] + e;
      val = phi.at(shifted);
    } else {
      int trail[kMaxOrder + 1];
      for (int p = 0; p < a; ++p) trail[p] = idx[p] + e;
      int bounds[kMaxOrder + 2];
      // Fixed leading arguments followed by the last node.
      trail[a] = n;
      const int k1 = m - a - 1;
      for (int q = 0; q <= k1; ++q) bounds[q] = idx[a + q] + e - n;
      const double term1 = detail::box_sum(phi, tables, g, bounds, k1, trail);
      const int k2 = m - a;
      bounds[0] = 0;
      for (int q = 0; q < k2; ++q) bounds[q + 1] = idx[a + q] + e - n;
      const double term2 = detail::box_sum(phi, tables, g, bounds, k2, trail);
      val = ipow_sign(static_cast<long>(a) * m) * term1 + ipow_sign(static_cast<long>(a + 1) * m) * term2;
    }
    out.values[r++] = val;
  } while (out.layout.next(idx));
  return out;
}

WedgeGrid wedge_step(const PeriodicCoefficient& b, double tau, double eta, const WedgeGrid& phi,
                     SplitChoice choice) {
  const int n = b.grid.n_sub;
  require(eta > 0 && eta <= 1.0 + 1e-12, "eta must lie in (0, 1]");
  const long tk = to_ticks(tau, n, "tau");
  const long ek = to_ticks(eta, n, "eta");
  return wedge_step_ticks(b, tk, static_cast<int>(ek), phi, choice);
}

WedgeGrid wedge_evolve(const PeriodicCoefficient& b, double tau, double t, const WedgeGrid& phi) {
  const int n = b.grid.n_sub;
  const long tk = to_ticks(tau, n, "tau");
  const long Tk = to_ticks(t, n, "t");
  require(Tk >= tk, "final time precedes initial time");
  WedgeGrid cur = phi;
  long c = tk;
  while (c < Tk) {
    const int e = static_cast<int>(std::min<long>(n, Tk - c));
    cur = wedge_step_ticks(b, c, e, cur);
    c += e;
  }
  return cur;
}

CubeGrid antisymmetric_cube(const WedgeGrid& phi) {
  const int m = phi.m;
  if (m > 3) fail(ErrorKind::Capacity, "cube storage supports m <= 3");
  const int n1 = phi.grid.n_sub + 1;
  CubeGrid c;
  c.m = m;
  c.grid = phi.grid;
  std::size_t total = 1;
  for (int p = 0; p < m; ++p) total *= static_cast<std::size_t>(n1);
  c.values.resize(total);
  int idx[3] = {0, 0, 0};
  for (std::size_t r = 0; r < total; ++r) {
    std::size_t x = r;
    for (int p = m - 1; p >= 0; --p) {
      idx[p] = static_cast<int>(x % n1);
      x /= n1;
    }
    c.values[r] = antisym_eval_idx(phi, idx);
  }
  return c;
}

WedgeGrid restrict_to_simplex(const CubeGrid& cube) {
  WedgeGrid w = make_wedge(cube.m, cube.grid);
  const int n1 = cube.grid.n_sub + 1;
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    std::size_t off = 0;
    for (int p = 0; p < cube.m; ++p) off = off * n1 + idx[p];
    w.values[r++] = cube.values[off];
  } while (w.layout.next(idx));
  return w;
}

CubeGrid tensor_oracle_step(const PeriodicCoefficient& b, double tau, double eta, const CubeGrid& phi,
                            const std::vector<int>& order) {
  const int n = b.grid.n_sub;
  const int m = phi.m;
  if (m > 3) fail(ErrorKind::Capacity, "cube storage supports m <= 3");
  require(phi.grid == b.grid, "cube and coefficient grids differ");
  require(eta > 0 && eta <= 1.0 + 1e-12, "eta must lie in (0, 1]");
  const long tk = to_ticks(tau, n, "tau");
  const int e = static_cast<int>(to_ticks(eta, n, "eta"));
  std::vector<int> ord = order;
  if (ord.empty())
    for (int p = 0; p < m; ++p) ord.push_back(p);
  require(static_cast<int>(ord.size()) == m, "coordinate order must list every axis once");
  {
    std::vector<int> s = ord;
    std::sort(s.begin(), s.end());
    for (int p = 0; p < m; ++p) require(s[p] == p, "coordinate order must be a permutation");
  }
  const std::vector<double> g = node_weights(b, tk);
  const double hh = 0.5 * b.grid.h;
  const std::size_t n1 = static_cast<std::size_t>(n) + 1;
  CubeGrid cur = phi;
  CubeGrid nxt = phi;
  std::vector<double> acc;
  for (int axis : ord) {
    std::size_t stride = 1;
    for (int p = axis + 1; p < m; ++p) stride *= n1;
    std::size_t outer = 1;
    for (int p = 0; p < axis; ++p) outer *= n1;
    acc.assign(stride, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = cur.values.data() + o * n1 * stride;
      double* dst = nxt.values.data() + o * n1 * stride;
      auto chunk = [&](const double* base, int i) { return base + static_cast<std::size_t>(i) * stride; };
      for (int i = 0; i <= n - e; ++i) std::copy_n(chunk(src, i + e), stride, dst + static_cast<std::size_t>(i) * stride);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int i = n - e + 1; i <= n; ++i) {
        const int J = i + e - n;
        kern::axpy(hh * g[J - 1], chunk(src, J - 1), acc.data(), stride);
        kern::axpy(hh * g[J], chunk(src, J), acc.data(), stride);
        double* d = dst + static_cast<std::size_t>(i) * stride;
        const double* last = chunk(src, n);
        for (std::size_t q = 0; q < stride; ++q) d[q] = last[q] - acc[q];
      }
    }
    std::swap(cur, nxt);
  }
  return cur;
}

double m2_closed_form(const PeriodicCoefficient& b, double tau, const WedgeGrid& phi, const SimplexIndex& theta) {
  require(phi.m == 2 && theta.size() == 2, "closed form requires m = 2");
  const int n = b.grid.n_sub;
  const double h = b.grid.h;
  const long tk = to_ticks(tau, n, "tau");
  const int i1 = theta[0], i2 = theta[1];
  require(0 <= i1 && i1 <= i2 && i2 <= n, "theta must be a point of T_2");
  auto w = [&](int j, int lo, int hi) { return (j == lo || j == hi) ? 0.5 * h : h; };
  auto g = [&](int j) { return b.at_ticks(tk + j); };
  double single = 0.0;
  if (i2 > i1)
    for (int s = i1; s <= i2; ++s) {
      int ix[2] = {s, n};
      single += w(s, i1, i2) * g(s) * phi.at(ix);
    }
  double dbl = 0.0;
  if (i1 > 0 && i2 > i1)
    for (int s = 0; s <= i1; ++s) {
      double in = 0.0;
      for (int r = i1; r <= i2; ++r) {
        int ix[2] = {s, r};
        in += w(r, i1, i2) * g(r) * phi.at(ix);
      }
      dbl += w(s, 0, i1) * g(s) * in;
    }
  return single + dbl;
}

ConeReport cone_check(const WedgeGrid& phi, double tolerance) {
  require(tolerance >= 0, "tolerance must be nonnegative");
  ConeReport rep;
  rep.tolerance = tolerance;
  rep.min_value = std::numeric_limits<double>::infinity();
  int idx[kMaxOrder] = {0};
  int best[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    if (phi.values[r] < rep.min_value) {
      rep.min_value = phi.values[r];
      std::copy_n(idx, phi.m, best);
    }
    ++r;
  } while (phi.layout.next(idx));
  rep.argmin.assign(best, best + phi.m);
  rep.passed = rep.min_value >= -tolerance;
  return rep;
}

namespace {

WedgeGrid random_wedge(int m, const Grid& grid, std::mt19937_64& rng, double lo, double hi) {
  WedgeGrid w = make_wedge(m, grid);
  std::uniform_real_distribution<double> u(lo, hi);
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    bool rep = false;
    for (int p = 1; p < m; ++p) rep = rep || idx[p] == idx[p - 1];
    const double v = u(rng);
    w.values[r++] = rep ? 0.0 : v;
  } while (w.layout.next(idx));
  return w;
}

}  // namespace

WedgeGrid random_cone_element(int m, const Grid& grid, std::mt19937_64& rng) {
  return random_wedge(m, grid, rng, 0.0, 1.0);
}

WedgeGrid random_antisymmetric(int m, const Grid& grid, std::mt19937_64& rng) {
  return random_wedge(m, grid, rng, -1.0, 1.0);
}

CertReport positivity_certificate(const PeriodicCoefficient& b, double tau, double eta, int m, int trials,
                                  std::uint64_t seed) {
  require(m >= 1 && m <= kMaxOrder, "order m out of range");
  require(trials >= 1, "trial count must be positive");
  require(eta > 0, "eta must be positive");
  const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t k = 0; k < b.samples.size(); ++k)
    if (sgn * b.samples[k] < 0)
      fail(ErrorKind::InvalidArgument, "(-1)^m b must be nonnegative; violated at t = " +
                                           std::to_string(static_cast<double>(k) / b.grid.n_sub));
  const int n = b.grid.n_sub;
  to_ticks(tau, n, "tau");
  to_ticks(eta, n, "eta");

  struct Trial {
    double min_value = 0.0, scale = 0.0;
    SimplexIndex argmin;
    bool passed = false;
  };
  std::vector<Trial> res(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(ss);
    WedgeGrid phi = random_cone_element(m, b.grid, rng);
    WedgeGrid out = wedge_evolve(b, tau, tau + eta, phi);
    const double scale = std::max(out.sup_norm(), std::numeric_limits<double>::min());
    ConeReport cr = cone_check(out, 1e-10 * scale);
    res[t] = {cr.min_value, scale, cr.argmin, cr.passed};
  });

  CertReport rep;
  rep.name = "positivity";
  rep.seed = seed;
  rep.passed = true;
  std::size_t worst = 0;
  for (std::size_t t = 0; t < res.size(); ++t) {
    rep.passed = rep.passed && res[t].passed;
    if (res[t].min_value / res[t].scale < res[worst].min_value / res[worst].scale) worst = t;
  }
  rep.min_value = res[worst].min_value;
  rep.argmin = res[worst].argmin;
  rep.tolerance = 1e-10 * res[worst].scale;
  rep.config_echo = {{"m", m}, {"tau", tau}, {"eta", eta}, {"trials", trials}, {"n_sub", n}};
  rep.details = {{"worst_trial", worst}, {"worst_scale", res[worst].scale},
                 {"worst_relative_min", res[worst].min_value / res[worst].scale}};
  return rep;
}

CertReport leading_det_check(const std::vector<Trajectory>& trajs, DetWindow window, double rel_tol) {
  require(!trajs.empty(), "need at least one solution");
  require(window.t1 >= window.t0, "window end precedes start");
  const Grid& g = trajs[0].grid;
  const int n = g.n_sub;
  const long k0 = to_ticks(window.t0, n, "window start");
  const long k1 = to_ticks(window.t1, n, "window end");
  struct Sample {
    double rel;
    long tick;
    SimplexIndex at;
  };
  double best_abs = 0.0;
  double sign = 1.0;
  double min_pos = std::numeric_limits<double>::infinity(), min_neg = std::numeric_limits<double>::infinity();
  Sample wpos{0, 0, {}}, wneg{0, 0, {}};
  for (long k = k0; k <= k1; ++k) {
    const double t = static_cast<double>(k) / n;
    WedgeGrid w = wedge_from_solutions(trajs, t);
    double scale = 1.0;
    for (const auto& tr : trajs) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) s = std::max(s, std::fabs(tr.at_ticks(k - n + j)));
      scale *= s;
    }
    if (scale == 0.0) scale = std::numeric_limits<double>::min();
    int idx[kMaxOrder] = {0};
    std::size_t r = 0;
    do {
      const double rel = w.values[r++] / scale;
      if (std::fabs(rel) > best_abs) {
        best_abs = std::fabs(rel);
        sign = rel > 0 ? 1.0 : -1.0;
      }
      if (rel < min_pos) min_pos = rel, wpos = {rel, k, SimplexIndex(idx, idx + w.m)};
      if (-rel < min_neg) min_neg = -rel, wneg = {-rel, k, SimplexIndex(idx, idx + w.m)};
    } while (w.layout.next(idx));
  }
  const Sample& worst = sign > 0 ? wpos : wneg;
  CertReport rep;
  rep.name = "detcheck";
  rep.min_value = worst.rel;
  rep.argmin = worst.at;
  rep.tolerance = rel_tol;
  const bool nonzero = best_abs > rel_tol;
  rep.passed = nonzero && worst.rel >= -rel_tol;
  rep.details = {{"sign", sign}, {"argmin_time", static_cast<double>(worst.tick) / n},
                 {"max_relative_abs", best_abs}, {"not_identically_zero", nonzero}};
  if (!nonzero) rep.warnings.push_back("determinant is identically zero on the window");
  return rep;
}

CertReport leading_det_check(double alpha0, double beta0, int m, DetWindow window, const Grid& grid,
                             double rel_tol) {
  require(m >= 1 && m <= kMaxOrder, "order m out of range");
  const int n = grid.n_sub;
  const long k0 = to_ticks(window.t0, n, "window start");
  const long k1 = to_ticks(window.t1, n, "window end");
  require(k1 >= k0, "window end precedes start");
  std::vector<cplx> roots = char_roots(alpha0, beta0, m + 2);
  const cplx& last = roots[static_cast<std::size_t>(m - 1)];
  if (last.imag() > 0)
    fail(ErrorKind::InvalidArgument, "leading m roots split a conjugate pair; choose m to include both");
  std::vector<Trajectory> trajs;
  for (int i = 0; i < m;) {
    const cplx z = roots[static_cast<std::size_t>(i)];
    auto make = [&](bool imag_part) {
      Trajectory tr;
      tr.grid = grid;
      tr.t0_ticks = k0;
      for (long k = k0 - n; k <= k1; ++k) {
        const cplx v = std::exp(z * (static_cast<double>(k) / n));
        tr.samples.push_back(imag_part ? v.imag() : v.real());
      }
      return tr;
    };
    trajs.push_back(make(false));
    if (z.imag() != 0.0) {
      trajs.push_back(make(true));
      i += 2;
    } else {
      i += 1;
    }
  }
  CertReport rep = leading_det_check(trajs, window, rel_tol);
  rep.config_echo = {{"alpha0", alpha0}, {"beta0", beta0}, {"m", m}, {"n_sub", n},
                     {"window", {window.t0, window.t1}}};
  const double gap = roots[static_cast<std::size_t>(m - 1)].real() - roots[static_cast<std::size_t>(m)].real();
  rep.details["root_gap"] = gap;
  if (gap < 1e-6) rep.warnings.push_back("ill-conditioned: spectral gap below 1e-6");
  json rj = json::array();
  for (int i = 0; i < m; ++i) rj.push_back({roots[i].real(), roots[i].imag()});
  rep.details["roots"] = rj;
  return rep;
}

CertReport leading_det_check(const DdeSystem& sys, int m, DetWindow window, double rel_tol) {
  require(m >= 1 && m <= kMaxOrder, "order m out of range");
  require(window.t0 >= 0, "window must start at or after time 0");
  const Grid& grid = sys.beta.grid;
  MonodromyMatrix M = monodromy(sys, 0.0);
  FloquetSpectrum fs = floquet_multipliers(M, m + 1);
  const auto& ev = fs.spectrum.expanded;
  require(static_cast<int>(ev.size()) > m, "not enough multipliers");
  if (ev[static_cast<std::size_t>(m - 1)].imag() > 0)
    fail(ErrorKind::InvalidArgument, "leading m multipliers split a conjugate pair");
  std::vector<Trajectory> trajs;
  for (int i = 0; i < m;) {
    const cplx lam = ev[static_cast<std::size_t>(i)];
    std::vector<cplx> v = eigenvector(M, lam, 1 + static_cast<std::uint64_t>(i));
    auto seg = [&](bool imag_part) {
      Segment s{grid, std::vector<double>(v.size())};
      for (std::size_t j = 0; j < v.size(); ++j) s.values[j] = imag_part ? v[j].imag() : v[j].real();
      return solve_untransformed(sys, 0.0, window.t1, s);
    };
    trajs.push_back(seg(false));
    if (lam.imag() != 0.0) {
      trajs.push_back(seg(true));
      i += 2;
    } else {
      i += 1;
    }
  }
  CertReport rep = leading_det_check(trajs, window, rel_tol);
  rep.config_echo = {{"m", m}, {"n_sub", grid.n_sub}, {"gamma", sys.beta.gamma()},
                     {"window", {window.t0, window.t1}}};
  const double gap = std::abs(ev[static_cast<std::size_t>(m - 1)]) - std::abs(ev[static_cast<std::size_t>(m)]);
  rep.details["multiplier_gap"] = gap;
  if (gap < 1e-6) rep.warnings.push_back("ill-conditioned: spectral gap below 1e-6");
  return rep;
}

}  // namespace cdde

// SPDX-License-Identifier: Apache-2.0
#include "cdde/u0pos.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "cdde/errors.hpp"
#include "simplex_box.hpp"

namespace cdde {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_simplex_point(const std::vector<double>& theta) {
  for (std::size_t p = 0; p < theta.size(); ++p) {
    if (!(theta[p] >= -1.0 - 1e-12 && theta[p] <= 1e-12))
      fail(ErrorKind::InvalidArgument, "theta_" + std::to_string(p + 1) + " outside [-1, 0]");
    if (p > 0 && theta[p] < theta[p - 1]) fail(ErrorKind::InvalidArgument, "theta is not sorted (not in T_m)");
  }
}

double window_product(const double* t, int m, int q) {
  double s = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int d = j - i;
      if (d <= q) s *= t[j] - t[i];
      if (j < m - 1 && d >= m - q) s *= 1.0 + t[i] - t[j];
    }
  return s;
}

struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int p) {
  GaussRule g;
  g.x.resize(static_cast<std::size_t>(p));
  g.w.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (p + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= p; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = p * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    g.x[static_cast<std::size_t>(i)] = z;
    g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

const GaussRule& rule(int p) {
  static const std::array<GaussRule, 13> rules = [] {
    std::array<GaussRule, 13> r;
    for (int k = 1; k < 13; ++k) r[static_cast<std::size_t>(k)] = gauss_legendre(k);
    return r;
  }();
  require(p >= 1 && p < 13, "Gauss-Legendre order out of range");
  return rules[static_cast<std::size_t>(p)];
}

// Trapezoid average over nodes [lo, hi]; a single node is a point value.
template <class F>
double node_avg(int lo, int hi, F&& f) {
  if (lo == hi) return f(lo);
  double s = 0.5 * (f(lo) + f(hi));
  for (int j = lo + 1; j < hi; ++j) s += f(j);
  return s / (hi - lo);
}

// Trapezoid integral over nodes [lo, hi] with spacing h.
template <class F>
double node_int(int lo, int hi, double h, F&& f) {
  if (lo == hi) return 0.0;
  return h * (hi - lo) * node_avg(lo, hi, f);
}

}  // namespace

double u_m_eval(const std::vector<double>& theta) {
  require(theta.size() >= 2, "u_m requires m >= 2");
  check_simplex_point(theta);
  const int m = static_cast<int>(theta.size());
  return window_product(theta.data(), m, m - 1);
}

double u_m_q_eval(const std::vector<double>& theta, int q) {
  require(theta.size() >= 2, "u_m^q requires m >= 2");
  const int m = static_cast<int>(theta.size());
  require(q >= 0 && q <= m - 1, "q must lie in [0, m-1]");
  check_simplex_point(theta);
  return window_product(theta.data(), m, q);
}

WedgeGrid u_m_grid(int m, const Grid& grid) { return u_m_q_grid(m, m - 1, grid); }

WedgeGrid u_m_q_grid(int m, int q, const Grid& grid) {
  require(m >= 2 && m <= kMaxOrder, "order m out of range");
  require(q >= 0 && q <= m - 1, "q must lie in [0, m-1]");
  return make_wedge(m, grid, [m, q](const double* t) { return window_product(t, m, q); });
}

WedgeGrid apply_A(const WedgeGrid& phi, OpPart part) {
  const int m = phi.m;
  if (m > 5) fail(ErrorKind::Capacity, "apply_A supports m <= 5");
  const int n = phi.grid.n_sub;
  const std::vector<double> ones(static_cast<std::size_t>(n) + 1, 1.0);
  const detail::AxisTables tables(phi, ones);
  WedgeGrid out = make_wedge(m, phi.grid);
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  const int last = n;
  do {
    double v = 0.0;
    if (part != OpPart::One) v += detail::box_sum(phi, tables, ones, idx, m - 1, &last);
    if (part != OpPart::Zero) {
      int bounds[kMaxOrder + 1];
      bounds[0] = 0;
      std::copy_n(idx, m, bounds + 1);
      v += detail::box_sum(phi, tables, ones, bounds, m, nullptr);
    }
    out.values[r++] = v;
  } while (out.layout.next(idx));
  return out;
}

double apply_A_exact(const std::function<double(const double*)>& f, int m, const std::vector<double>& theta,
                     OpPart part, int points) {
  require(m >= 1 && m <= kMaxOrder && static_cast<int>(theta.size()) == m, "theta must have m entries");
  check_simplex_point(theta);
  const GaussRule& g = rule(points);
  double total = 0.0;
  for (int which = 0; which < 2; ++which) {
    if ((which == 0 && part == OpPart::One) || (which == 1 && part == OpPart::Zero)) continue;
    // Intervals of the integration variables.
    std::vector<std::pair<double, double>> iv;
    if (which == 1) iv.push_back({-1.0, theta[0]});
    for (int j = 0; j + 1 < m; ++j) iv.push_back({theta[j], theta[j + 1]});
    const int k = static_cast<int>(iv.size());
    bool empty = false;
    for (const auto& p : iv) empty = empty || p.second == p.first;
    if (empty) continue;
    std::vector<int> c(static_cast<std::size_t>(k), 0);
    double args[kMaxOrder];
    double s = 0.0;
    while (true) {
      double w = 1.0;
      for (int v = 0; v < k; ++v) {
        const double a = iv[v].first, b = iv[v].second;
        const double half = 0.5 * (b - a);
        args[v] = a + half * (1.0 + g.x[c[v]]);
        w *= half * g.w[c[v]];
      }
      if (which == 0) args[m - 1] = 0.0;
      s += w * f(args);
      int v = k - 1;
      while (v >= 0 && ++c[v] == points) c[v--] = 0;
      if (v < 0) break;
    }
    total += s;
  }
  return total;
}

bool is_singular_point(int m, const int* idx, int n_sub) {
  return m == 3 && idx[0] == 0 && idx[1] == n_sub && idx[2] == n_sub;
}

WedgeGrid apply_B(const WedgeGrid& phi, OpPart part) {
  const int m = phi.m;
  if (m != 2 && m != 3) fail(ErrorKind::Unsupported, "apply_B supports m in {2, 3}");
  const int n = phi.grid.n_sub;
  const Grid& G = phi.grid;
  WedgeGrid out = make_wedge(m, G);
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    double v = 0.0;
    if (m == 2) {
      const int i1 = idx[0], i2 = idx[1];
      if (part != OpPart::One)
        v += node_avg(i1, i2, [&](int j) {
          const int a[2] = {j, n};
          return -G.node(j) * phi.at(a);
        });
      if (part != OpPart::Zero)
        v += node_int(0, i1, G.h, [&](int j0) {
          return node_avg(i1, i2, [&](int j1) {
            const int a[2] = {j0, j1};
            return (G.node(j1) - G.node(j0)) * phi.at(a);
          });
        });
    } else if (!is_singular_point(3, idx, n)) {
      const int i1 = idx[0], i2 = idx[1], i3 = idx[2];
      const double th1 = G.node(i1), th2 = G.node(i2), th3 = G.node(i3);
      const double E = 1.0 + th1 - th2;
      const double nu1 = (1.0 + th1) / E;
      if (i1 == i3) {
        const double ts = th1;
        if (part != OpPart::One) {
          const int a[3] = {i1, i1, n};
          v += 0.5 * ts * ts * phi.at(a);
        }
        if (part != OpPart::Zero) {
          const double bt = 0.5 * node_avg(0, i1, [&](int j) {
            const double t = G.node(j);
            const int a[3] = {j, i1, i1};
            return (ts - t) * (ts - t) * (1.0 + t - ts) * phi.at(a);
          });
          v += nu1 * bt;
        }
      } else {
        const double D = th3 - th1;
        if (part != OpPart::One)
          v += node_avg(i1, i2, [&](int j1) {
            const double t1 = G.node(j1);
            return node_avg(i2, i3, [&](int j2) {
              const double t2 = G.node(j2);
              const int a[3] = {j1, j2, n};
              return ((t2 - t1) / D) * t1 * (t2 / E) * (1.0 + t1 - t2) * phi.at(a);
            });
          });
        if (part != OpPart::Zero) {
          const double bt = node_avg(0, i1, [&](int j0) {
            const double t0 = G.node(j0);
            return node_avg(i1, i2, [&](int j1) {
              const double t1 = G.node(j1);
              return node_avg(i2, i3, [&](int j2) {
                const double t2 = G.node(j2);
                const int a[3] = {j0, j1, j2};
                return (t1 - t0) * ((t2 - t1) / D) * (t2 - t0) * (1.0 + t0 - t1) * phi.at(a);
              });
            });
          });
          v += nu1 * bt;
        }
      }
    }
    out.values[r++] = v;
  } while (out.layout.next(idx));
  return out;
}

namespace {

// Breakpoints in [a, b]: grid nodes and the grid shifted by each anchor, so
// the Kuhn interpolant is polynomial between consecutive breakpoints.
std::vector<double> breakpoints(double a, double b, int n, const std::vector<double>& anchors) {
  std::vector<double> pts{a, b};
  auto add_lattice = [&](double off) {
    const double lo = std::ceil((a - off) * n - 1e-12), hi = std::floor((b - off) * n + 1e-12);
    for (double k = lo; k <= hi; k += 1.0) {
      const double x = off + k / n;
      if (x > a && x < b) pts.push_back(x);
    }
  };
  add_lattice(0.0);
  for (double an : anchors) add_lattice(an);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts)
    if (out.empty() || x - out.back() > 1e-14) out.push_back(x);
  return out;
}

template <class F>
double gl_avg(double a, double b, int n, const std::vector<double>& anchors, F&& f) {
  if (b - a <= 1e-15) return f(a);
  const GaussRule& g = rule(5);
  const std::vector<double> bp = breakpoints(a, b, n, anchors);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double mid = 0.5 * (bp[i] + bp[i + 1]), half = 0.5 * (bp[i + 1] - bp[i]);
    for (std::size_t k = 0; k < g.x.size(); ++k) s += half * g.w[k] * f(mid + half * g.x[k]);
  }
  return s / (b - a);
}

}  // namespace

double apply_B_at(const WedgeGrid& phi, const std::vector<double>& theta, OpPart part) {
  const int m = phi.m;
  if (m != 2 && m != 3) fail(ErrorKind::Unsupported, "apply_B supports m in {2, 3}");
  require(static_cast<int>(theta.size()) == m, "theta must have m entries");
  check_simplex_point(theta);
  const int n = phi.grid.n_sub;
  auto val = [&](std::initializer_list<double> t) {
    double a[3];
    int i = 0;
    for (double x : t) a[i++] = std::clamp(x, -1.0, 0.0);
    return phi.interpolate(a);
  };
  double v = 0.0;
  if (m == 2) {
    const double th1 = theta[0], th2 = theta[1];
    const std::vector<double> anc{th1, th2};
    if (part != OpPart::One) v += gl_avg(th1, th2, n, anc, [&](double t) { return -t * val({t, 0.0}); });
    if (part != OpPart::Zero)
      v += (th1 + 1.0) * gl_avg(-1.0, th1, n, anc, [&](double t0) {
             std::vector<double> a2 = anc;
             a2.push_back(t0);
             return gl_avg(th1, th2, n, a2, [&](double t1) { return (t1 - t0) * val({t0, t1}); });
           });
    return v;
  }
  const double th1 = theta[0], th2 = theta[1], th3 = theta[2];
  const double E = 1.0 + th1 - th2;
  if (E <= 0.0) fail(ErrorKind::InvalidArgument, "B is not defined at (-1, 0, 0)");
  const double nu1 = (1.0 + th1) / E;
  const std::vector<double> anc{th1, th2, th3};
  if (th3 - th1 <= 1e-15) {
    const double ts = th1;
    if (part != OpPart::One) v += 0.5 * ts * ts * val({ts, ts, 0.0});
    if (part != OpPart::Zero)
      v += nu1 * 0.5 * gl_avg(-1.0, ts, n, anc, [&](double t) {
             return (ts - t) * (ts - t) * (1.0 + t - ts) * val({t, ts, ts});
           });
    return v;
  }
  const double D = th3 - th1;
  if (part != OpPart::One)
    v += gl_avg(th1, th2, n, anc, [&](double t1) {
      std::vector<double> a2 = anc;
      a2.push_back(t1);
      return gl_avg(th2, th3, n, a2, [&](double t2) {
        return ((t2 - t1) / D) * t1 * (t2 / E) * (1.0 + t1 - t2) * val({t1, t2, 0.0});
      });
    });
  if (part != OpPart::Zero)
    v += nu1 * gl_avg(-1.0, th1, n, anc, [&](double t0) {
           std::vector<double> a1 = anc;
           a1.push_back(t0);
           return gl_avg(th1, th2, n, a1, [&](double t1) {
             std::vector<double> a2 = a1;
             a2.push_back(t1);
             return gl_avg(th2, th3, n, a2, [&](double t2) {
               return (t1 - t0) * ((t2 - t1) / D) * (t2 - t0) * (1.0 + t0 - t1) * val({t0, t1, t2});
             });
           });
         });
  return v;
}

std::pair<double, double> nu_eval(const std::vector<double>& theta) {
  require(theta.size() == 3, "nu is defined on T_3");
  check_simplex_point(theta);
  const double E = 1.0 + theta[0] - theta[1];
  if (E <= 1e-15) fail(ErrorKind::InvalidArgument, "nu is undefined at (-1, 0, 0)");
  const double nu0 = -(theta[1] + theta[2]) / E;
  const double nu1 = (1.0 + theta[0]) / E;
  if (!(nu0 >= -1e-12 && nu0 <= 2.0 + 1e-12 && nu1 >= -1e-12 && nu1 <= 1.0 + 1e-12))
    fail(ErrorKind::NumericFailure, "nu bounds violated");
  return {nu0, nu1};
}

json CvDecomposition::to_json() const {
  json p = json::array();
  for (std::size_t i = 0; i < probe_eps.size(); ++i) p.push_back({{"eps", probe_eps[i]}, {"abs_psi", num(probe_psi[i])}});
  return {{"Q0", num(Q0)},           {"Q1", num(Q1)},         {"n_sub", n_sub},
          {"reconstruction_error", num(reconstruction_error)}, {"probes", p}, {"probes_decay", probes_decay}};
}

CvDecomposition decompose_CV(const WedgeGrid& phi) {
  require(phi.m == 3, "decompose_CV requires m = 3");
  const int n = phi.grid.n_sub;
  const double h = phi.grid.h;
  CvDecomposition cv;
  cv.n_sub = n;
  std::vector<double> s0(static_cast<std::size_t>(n) + 1), s1(s0.size());
  for (int j = 0; j <= n; ++j) {
    const int a[3] = {j, n, n};
    const int b[3] = {0, j, n};
    s0[j] = phi.at(a);
    s1[j] = phi.at(b);
  }
  const std::array<double, 4> cubic{0.0, 0.0, 1.0, 1.0};
  cv.Q0 = 0.5 * integrate_cubic_weighted(s0, -1.0, h, cubic, -1.0, 0.0);
  cv.Q1 = integrate_cubic_weighted(s1, -1.0, h, cubic, -1.0, 0.0);

  const WedgeGrid B = apply_B(phi);
  cv.psi = make_wedge(3, phi.grid);
  const double scale = std::max(B.sup_norm(), std::numeric_limits<double>::min());
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    if (!is_singular_point(3, idx, n)) {
      const std::vector<double> th{phi.grid.node(idx[0]), phi.grid.node(idx[1]), phi.grid.node(idx[2])};
      const auto [nu0, nu1] = nu_eval(th);
      const double fit = cv.Q0 * nu0 + cv.Q1 * nu1;
      cv.psi.values[r] = B.values[r] - fit;
      const bool interior = idx[0] < idx[1] && idx[1] < idx[2];
      if (interior)
        cv.reconstruction_error =
            std::max(cv.reconstruction_error, std::fabs(fit + cv.psi.values[r] - B.values[r]) / scale);
    }
    ++r;
  } while (cv.psi.layout.next(idx));

  cv.probes_decay = true;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const std::vector<double> th{-1.0 + eps, -eps * eps, 0.0};
    const auto [nu0, nu1] = nu_eval(th);
    const double ps = std::fabs(apply_B_at(phi, th) - cv.Q0 * nu0 - cv.Q1 * nu1);
    if (!cv.probe_psi.empty() && !(ps < cv.probe_psi.back() || ps <= 1e-12 * scale)) cv.probes_decay = false;
    cv.probe_eps.push_back(eps);
    cv.probe_psi.push_back(ps);
  }
  return cv;
}

bool is_ratio_interior(int m, const int* idx, int n_sub) {
  if (idx[0] < 2 || idx[m - 1] > n_sub - 2) return false;
  for (int p = 1; p < m; ++p)
    if (idx[p] - idx[p - 1] < 2) return false;
  return true;
}

json RatioReport::to_json() const {
  json w = json::array();
  for (const auto& s : warnings) w.push_back(s);
  return {{"m", m},
          {"k", k},
          {"min_ratio", num(min_ratio)},
          {"max_ratio", num(max_ratio)},
          {"argmin", argmin},
          {"argmax", argmax},
          {"interior_rule", interior_rule},
          {"interior_points", points.size()},
          {"passed", passed},
          {"exploratory", exploratory},
          {"warnings", w}};
}

namespace {

void require_cone_input(const WedgeGrid& phi) {
  bool nonzero = false;
  for (double v : phi.values) {
    if (v < 0.0) fail(ErrorKind::InvalidArgument, "input must be nonnegative on T_m");
    nonzero = nonzero || v > 0.0;
  }
  if (!nonzero) fail(ErrorKind::InvalidArgument, "input must not vanish identically");
}

}  // namespace

RatioReport u0_ratio(const WedgeGrid& phi, int k) {
  const int m = phi.m;
  require(m >= 2, "u0_ratio requires m >= 2");
  require(k >= 1, "k must be positive");
  require_cone_input(phi);
  RatioReport rep;
  rep.m = m;
  rep.k = k;
  rep.exploratory = m >= 4;
  rep.interior_rule = "j1 >= 2, jm <= n-2, consecutive gaps >= 2";
  if (k < m - 1) rep.warnings.push_back("k < m-1: the 2^k upper bound is not guaranteed");
  WedgeGrid cur = phi;
  for (int i = 0; i < k; ++i) cur = apply_A(cur);
  const WedgeGrid u = u_m_grid(m, phi.grid);
  const int n = phi.grid.n_sub;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    if (is_ratio_interior(m, idx, n)) {
      const double q = cur.values[r] / u.values[r];
      SimplexIndex at(idx, idx + m);
      if (q < rep.min_ratio) rep.min_ratio = q, rep.argmin = at;
      if (q > rep.max_ratio) rep.max_ratio = q, rep.argmax = at;
      rep.points.push_back(std::move(at));
      rep.ratios.push_back(q);
    }
    ++r;
  } while (cur.layout.next(idx));
  if (rep.points.empty()) fail(ErrorKind::InvalidArgument, "grid too coarse: no interior points for the ratio");
  rep.passed = rep.min_ratio > 0.0 && rep.min_ratio <= rep.max_ratio && std::isfinite(rep.max_ratio);
  return rep;
}

CertReport pointwise_bound_check(int m, int q, const Grid& grid) {
  require(m >= 2 && m <= 5, "order m out of range");
  require(q >= 0 && q <= m - 2, "q must lie in [0, m-2]");
  const int pts = std::max(2, m);
  auto uq = [m, q](const double* t) { return window_product(t, m, q); };
  auto um = [m](const double* t) { return window_product(t, m, m - 1); };
  CertReport rep;
  rep.name = "pointwise_bound";
  rep.tolerance = 1e-9;
  rep.min_value = std::numeric_limits<double>::infinity();
  int idx[kMaxOrder] = {0};
  const SimplexLayout lay(m, grid.n_sub);
  long checked = 0;
  do {
    std::vector<double> th(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) th[p] = grid.node(idx[p]);
    const double up = window_product(th.data(), m, q + 1);
    const double uu = window_product(th.data(), m, m - 1);
    for (OpPart part : {OpPart::Zero, OpPart::One}) {
      const double a = apply_A_exact(uq, m, th, part, pts);
      const double b = apply_A_exact(um, m, th, part, pts);
      const double slack = std::min({a, up - a, b, uu - b});
      if (slack < rep.min_value) {
        rep.min_value = slack;
        rep.argmin.assign(idx, idx + m);
      }
      ++checked;
    }
  } while (lay.next(idx));
  rep.passed = rep.min_value >= -rep.tolerance;
  rep.config_echo = {{"m", m}, {"q", q}, {"n_sub", grid.n_sub}};
  rep.details = {{"evaluations", checked}, {"gauss_points", pts}};
  return rep;
}

CertReport b_floor_check(const WedgeGrid& phi, int k) {
  const int m = phi.m;
  if (m != 2 && m != 3) fail(ErrorKind::Unsupported, "b_floor_check supports m in {2, 3}");
  require(k >= (m == 2 ? 3 : 5), m == 2 ? "k must be at least 3 for m = 2" : "k must be at least 5 for m = 3");
  require_cone_input(phi);
  WedgeGrid cur = phi;
  for (int i = 0; i < k; ++i) cur = apply_B(cur);
  CertReport rep;
  rep.name = "b_floor";
  rep.min_value = std::numeric_limits<double>::infinity();
  const int n = phi.grid.n_sub;
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    if (!is_singular_point(m, idx, n) && cur.values[r] < rep.min_value) {
      rep.min_value = cur.values[r];
      rep.argmin.assign(idx, idx + m);
    }
    ++r;
  } while (cur.layout.next(idx));
  rep.passed = rep.min_value > 0.0;
  rep.config_echo = {{"m", m}, {"k", k}, {"n_sub", n}};
  rep.details = {{"floor", num(rep.min_value)}, {"sup", num(cur.sup_norm())}};
  return rep;
}

WedgeGrid make_probe(int m, const Grid& grid, const std::string& kind, std::uint64_t seed) {
  require(m >= 1 && m <= kMaxOrder, "order m out of range");
  if (kind == "const") return make_wedge(m, grid, [](const double*) { return 1.0; });
  if (kind == "bump") {
    const double r = 0.45 / m;
    return make_wedge(m, grid, [m, r](const double* t) {
      double d = 0.0;
      for (int j = 0; j < m; ++j) d = std::max(d, std::fabs(t[j] - (-1.0 + (j + 0.5) / m)));
      return std::max(0.0, 1.0 - d / r);
    });
  }
  if (kind == "random") {
    WedgeGrid w = make_wedge(m, grid);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : w.values) v = u(rng);
    return w;
  }
  fail(ErrorKind::InvalidArgument, "unknown probe kind '" + kind + "' (expected const, bump or random)");
}

}  // namespace cdde

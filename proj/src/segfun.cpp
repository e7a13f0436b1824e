// SPDX-License-Identifier: Apache-2.0
#include "cdde/segfun.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "cdde/errors.hpp"

namespace cdde {

Grid make_grid(int n_sub) {
  require(n_sub >= 2, "n_sub must be >= 2, got " + std::to_string(n_sub));
  require(n_sub <= 1 << 20, "n_sub too large");
  Grid g;
  g.n_sub = n_sub;
  g.h = 1.0 / n_sub;
  g.nodes.resize(static_cast<std::size_t>(n_sub) + 1);
  for (int j = 0; j <= n_sub; ++j) g.nodes[j] = static_cast<double>(j - n_sub) / n_sub;
  return g;
}

bool is_aligned(double t, int n_sub) {
  if (!std::isfinite(t)) return false;
  double x = t * n_sub;
  return std::fabs(x - std::nearbyint(x)) < 1e-9;
}

long to_ticks(double t, int n_sub, const char* what) {
  if (!is_aligned(t, n_sub))
    fail(ErrorKind::InvalidArgument, std::string(what) + " = " + std::to_string(t) +
                                         " is not a multiple of 1/" + std::to_string(n_sub));
  return static_cast<long>(std::llround(t * n_sub));
}

namespace {

double interp_at(const std::vector<double>& f, double u) {
  const long last = static_cast<long>(f.size()) - 1;
  long i = static_cast<long>(std::floor(u));
  if (i < 0) i = 0;
  if (i >= last) i = last - 1;
  double r = u - static_cast<double>(i);
  return f[i] + r * (f[i + 1] - f[i]);
}

void check_span(std::size_t count, double x0, double h, double a, double b) {
  require(count >= 2, "integrand needs at least two samples");
  require(a <= b, "integration limits out of order");
  const double lo = x0, hi = x0 + h * static_cast<double>(count - 1);
  const double slack = 1e-12 * std::max(1.0, std::fabs(hi - lo));
  require(a >= lo - slack && b <= hi + slack, "integration limits outside the sampled span");
}

}  // namespace

double integrate_partial(const std::vector<double>& f, double x0, double h, double a, double b) {
  check_span(f.size(), x0, h, a, b);
  if (a == b) return 0.0;
  const long last = static_cast<long>(f.size()) - 1;
  double ua = std::clamp((a - x0) / h, 0.0, static_cast<double>(last));
  double ub = std::clamp((b - x0) / h, 0.0, static_cast<double>(last));
  // Snap to nodes so grid-aligned limits use whole cells.
  if (std::fabs(ua - std::nearbyint(ua)) < 1e-10) ua = std::nearbyint(ua);
  if (std::fabs(ub - std::nearbyint(ub)) < 1e-10) ub = std::nearbyint(ub);
  long ia = static_cast<long>(std::floor(ua));
  long ib = static_cast<long>(std::ceil(ub));
  if (ib - ia <= 1) return (ub - ua) * h * 0.5 * (interp_at(f, ua) + interp_at(f, ub));
  // Partial head [ua, ia+1], whole cells, partial tail [ib-1, ub].
  double s = 0.0;
  long first = ia + 1, lastn = ib - 1;
  s += (static_cast<double>(first) - ua) * h * 0.5 * (interp_at(f, ua) + f[first]);
  for (long j = first; j < lastn; ++j) s += 0.5 * h * (f[j] + f[j + 1]);
  s += (ub - static_cast<double>(lastn)) * h * 0.5 * (f[lastn] + interp_at(f, ub));
  return s;
}

double integrate_partial(const Segment& s, double a, double b) {
  return integrate_partial(s.values, -1.0, s.grid.h, a, b);
}

double integrate_cubic_weighted(const std::vector<double>& f, double x0, double h,
                                const std::array<double, 4>& c, double a, double b) {
  check_span(f.size(), x0, h, a, b);
  if (a == b) return 0.0;
  static const double gx = std::sqrt(0.6);
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double gnode[3] = {-gx, 0.0, gx};
  const long last = static_cast<long>(f.size()) - 1;
  auto poly = [&](double x) { return c[0] + x * (c[1] + x * (c[2] + x * c[3])); };
  auto piece = [&](double p, double q) {
    double mid = 0.5 * (p + q), half = 0.5 * (q - p), s = 0.0;
    for (int k = 0; k < 3; ++k) {
      double x = mid + half * gnode[k];
      s += gw[k] * poly(x) * interp_at(f, (x - x0) / h);
    }
    return s * half;
  };
  double ua = std::clamp((a - x0) / h, 0.0, static_cast<double>(last));
  double ub = std::clamp((b - x0) / h, 0.0, static_cast<double>(last));
  long ia = static_cast<long>(std::floor(ua));
  double s = 0.0;
  double p = a;
  for (long j = ia + 1; j <= last && static_cast<double>(j) < ub; ++j) {
    double q = x0 + h * static_cast<double>(j);
    if (q > p) s += piece(p, q);
    p = q;
  }
  if (b > p) s += piece(p, b);
  return s;
}

double Segment::eval(double theta) const {
  require(theta >= -1.0 - 1e-12 && theta <= 1e-12, "theta outside [-1,0]");
  return interp_at(values, (theta + 1.0) * grid.n_sub);
}

double Segment::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

Segment make_segment(const Grid& grid, const std::function<double(double)>& f) {
  Segment s{grid, std::vector<double>(grid.nodes.size())};
  for (std::size_t j = 0; j < grid.nodes.size(); ++j) s.values[j] = f(grid.nodes[j]);
  return s;
}

std::uint64_t binomial(int a, int b) {
  if (b < 0 || a < 0 || b > a) return 0;
  b = std::min(b, a - b);
  std::uint64_t r = 1;
  for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
  return r;
}

SimplexLayout::SimplexLayout(int m, int n) : m_(m), n_(n) {
  require(m >= 1 && m <= kMaxOrder, "simplex order m must be in [1, 6], got " + std::to_string(m));
  require(n >= 1, "simplex grid needs n >= 1");
  const int amax = n + m + 2;
  table_.assign(static_cast<std::size_t>(amax + 1) * (m + 2), 0);
  for (int a = 0; a <= amax; ++a)
    for (int b = 0; b <= m + 1; ++b) table_[static_cast<std::size_t>(a) * (m + 2) + b] = binomial(a, b);
  std::uint64_t sz = binom(n + m, m);
  if (sz > (std::uint64_t{1} << 28)) fail(ErrorKind::Capacity, "simplex grid too large");
  size_ = static_cast<std::size_t>(sz);
}

std::uint64_t SimplexLayout::binom(int a, int b) const {
  if (a < 0 || b < 0 || b > a) return 0;
  return table_[static_cast<std::size_t>(a) * (m_ + 2) + b];
}

std::uint64_t SimplexLayout::tail_count(int lo, int len) const { return binom(n_ - lo + len, len); }

std::size_t SimplexLayout::rank(const int* idx) const {
  std::uint64_t r = 0;
  int prev = 0;
  for (int p = 0; p < m_; ++p) {
    const int rem = m_ - p - 1;
    r += binom(n_ - prev + rem + 1, rem + 1) - binom(n_ - idx[p] + rem + 1, rem + 1);
    prev = idx[p];
  }
  return static_cast<std::size_t>(r);
}

bool SimplexLayout::next(int* idx) const {
  int p = m_ - 1;
  while (p >= 0 && idx[p] == n_) --p;
  if (p < 0) return false;
  int v = idx[p] + 1;
  for (int q = p; q < m_; ++q) idx[q] = v;
  return true;
}

std::vector<SimplexIndex> simplex_points(int m, const Grid& grid) {
  SimplexLayout lay(m, grid.n_sub);
  std::vector<SimplexIndex> pts;
  pts.reserve(lay.size());
  SimplexIndex idx(static_cast<std::size_t>(m), 0);
  do pts.push_back(idx);
  while (lay.next(idx.data()));
  return pts;
}

WedgeGrid make_wedge(int m, const Grid& grid) {
  WedgeGrid w;
  w.m = m;
  w.grid = grid;
  w.layout = SimplexLayout(m, grid.n_sub);
  w.values.assign(w.layout.size(), 0.0);
  return w;
}

WedgeGrid make_wedge(int m, const Grid& grid, const std::function<double(const double*)>& f) {
  WedgeGrid w = make_wedge(m, grid);
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> th(static_cast<std::size_t>(m));
  std::size_t r = 0;
  do {
    for (int p = 0; p < m; ++p) th[p] = grid.node(idx[p]);
    w.values[r++] = f(th.data());
  } while (w.layout.next(idx.data()));
  return w;
}

double WedgeGrid::interpolate(const double* theta) const {
  const int n = grid.n_sub;
  int base[kMaxOrder];
  double frac[kMaxOrder];
  int order[kMaxOrder];
  for (int p = 0; p < m; ++p) {
    require(theta[p] >= -1.0 - 1e-12 && theta[p] <= 1e-12, "interpolation point outside [-1,0]");
    if (p > 0) require(theta[p] >= theta[p - 1], "interpolation point not sorted");
    double x = std::clamp((theta[p] + 1.0) * n, 0.0, static_cast<double>(n));
    int j = static_cast<int>(std::floor(x));
    if (j >= n) j = n - 1;
    base[p] = j;
    frac[p] = x - j;
    order[p] = p;
  }
  // Monotone coordinates inside a common cell must be incremented last-first
  // so every visited vertex stays in T_m.
  std::sort(order, order + m, [&](int a, int b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    return a > b;
  });
  int v[kMaxOrder] = {0};
  for (int p = 0; p < m; ++p) v[p] = base[p];
  double s = (1.0 - frac[order[0]]) * at(v);
  for (int k = 0; k < m; ++k) {
    v[order[k]] += 1;
    double w = frac[order[k]] - (k + 1 < m ? frac[order[k + 1]] : 0.0);
    if (w != 0.0) s += w * at(v);
  }
  return s;
}

double WedgeGrid::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::fabs(v));
  return s;
}

double antisym_eval_idx(const WedgeGrid& phi, const int* idx) {
  int s[kMaxOrder];
  const int m = phi.m;
  for (int p = 0; p < m; ++p) {
    require(idx[p] >= 0 && idx[p] <= phi.grid.n_sub, "node index out of range");
    s[p] = idx[p];
  }
  int sign = 1;
  for (int i = 1; i < m; ++i) {
    int v = s[i], j = i;
    while (j > 0 && s[j - 1] > v) {
      s[j] = s[j - 1];
      --j;
      sign = -sign;
    }
    s[j] = v;
  }
  for (int i = 1; i < m; ++i)
    if (s[i] == s[i - 1]) return 0.0;
  return sign * phi.at(s);
}

double antisym_eval(const WedgeGrid& phi, const std::vector<double>& theta) {
  require(static_cast<int>(theta.size()) == phi.m, "antisym_eval: wrong number of coordinates");
  int idx[kMaxOrder];
  for (int p = 0; p < phi.m; ++p) {
    double x = (theta[p] + 1.0) * phi.grid.n_sub;
    require(std::fabs(x - std::nearbyint(x)) < 1e-9, "antisym_eval: coordinate is not a grid node");
    idx[p] = static_cast<int>(std::nearbyint(x));
  }
  return antisym_eval_idx(phi, idx);
}

double Trajectory::at_ticks(long k) const {
  long off = k - (t0_ticks - grid.n_sub);
  require(off >= 0 && off < static_cast<long>(samples.size()), "time outside trajectory coverage");
  return samples[static_cast<std::size_t>(off)];
}

Segment Trajectory::segment_at_ticks(long k) const {
  long off = k - t0_ticks;
  require(off >= 0 && k <= end_ticks(), "segment outside trajectory coverage");
  Segment s{grid, std::vector<double>(static_cast<std::size_t>(grid.n_sub) + 1)};
  for (int j = 0; j <= grid.n_sub; ++j) s.values[j] = samples[static_cast<std::size_t>(off + j)];
  return s;
}

Segment Trajectory::segment_at(double t) const { return segment_at_ticks(to_ticks(t, grid.n_sub, "t")); }

double det_pivoted(double* a, int m) {
  double det = 1.0;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    double best = std::fabs(a[c * m + c]);
    for (int r = c + 1; r < m; ++r) {
      double v = std::fabs(a[r * m + c]);
      if (v > best) best = v, piv = r;
    }
    if (best == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < m; ++k) std::swap(a[c * m + k], a[piv * m + k]);
      det = -det;
    }
    const double d = a[c * m + c];
    det *= d;
    for (int r = c + 1; r < m; ++r) {
      const double f = a[r * m + c] / d;
      if (f == 0.0) continue;
      for (int k = c + 1; k < m; ++k) a[r * m + k] -= f * a[c * m + k];
    }
  }
  return det;
}

WedgeGrid wedge_from_solutions(const std::vector<Trajectory>& trajs, double t) {
  require(!trajs.empty(), "wedge_from_solutions needs at least one trajectory");
  const int m = static_cast<int>(trajs.size());
  require(m <= kMaxOrder, "too many trajectories");
  const Grid& g = trajs[0].grid;
  const long tk = to_ticks(t, g.n_sub, "t");
  for (const auto& tr : trajs) {
    require(tr.grid == g, "trajectories must share a grid");
    require(tk - g.n_sub >= tr.t0_ticks - g.n_sub && tk <= tr.end_ticks(),
            "trajectory does not cover [t-1, t]");
  }
  WedgeGrid w = make_wedge(m, g);
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  double a[kMaxOrder * kMaxOrder];
  std::size_t r = 0;
  do {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a[i * m + j] = trajs[i].at_ticks(tk - g.n_sub + idx[j]);
    w.values[r++] = det_pivoted(a, m);
  } while (w.layout.next(idx.data()));
  return w;
}

void write_segment_csv(std::ostream& os, const Segment& s) {
  os << "theta,value\n" << std::setprecision(17);
  for (std::size_t j = 0; j < s.values.size(); ++j) os << s.grid.nodes[j] << ',' << s.values[j] << '\n';
}

void write_wedge_csv(std::ostream& os, const WedgeGrid& w) {
  for (int p = 1; p <= w.m; ++p) os << 'j' << p << ',';
  os << "value\n" << std::setprecision(17);
  std::vector<int> idx(static_cast<std::size_t>(w.m), 0);
  std::size_t r = 0;
  do {
    for (int p = 0; p < w.m; ++p) os << idx[p] << ',';
    os << w.values[r++] << '\n';
  } while (w.layout.next(idx.data()));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x\n" << std::setprecision(17);
  const long start = tr.t0_ticks - tr.grid.n_sub;
  for (std::size_t k = 0; k < tr.samples.size(); ++k)
    os << static_cast<double>(start + static_cast<long>(k)) / tr.grid.n_sub << ',' << tr.samples[k] << '\n';
}

}  // namespace cdde

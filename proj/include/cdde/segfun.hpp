// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace cdde {

// Uniform grid on [-1, 0] with n_sub cells.
struct Grid {
  int n_sub = 0;
  double h = 0.0;
  std::vector<double> nodes;

  double node(int j) const { return nodes[static_cast<std::size_t>(j)]; }
  bool operator==(const Grid& o) const { return n_sub == o.n_sub; }
};

Grid make_grid(int n_sub);

// Converts a time to an integer number of grid steps. Throws InvalidArgument
// naming `what` when t is not a multiple of 1/n_sub.
long to_ticks(double t, int n_sub, const char* what);
bool is_aligned(double t, int n_sub);

// Node values with piecewise-linear interpolation between nodes.
struct Segment {
  Grid grid;
  std::vector<double> values;

  double eval(double theta) const;
  double sup_norm() const;
};

Segment make_segment(const Grid& grid, const std::function<double(double)>& f);

// Exact integral over [a, b] of the piecewise-linear interpolant of samples
// f[j] at x0 + j*h.
double integrate_partial(const std::vector<double>& f, double x0, double h, double a, double b);
double integrate_partial(const Segment& s, double a, double b);

// Exact integral over [a, b] of p(x) * (interpolant of f), where
// p(x) = c[0] + c[1] x + c[2] x^2 + c[3] x^3. Three-point Gauss-Legendre per
// cell piece, which is exact for this degree.
double integrate_cubic_weighted(const std::vector<double>& f, double x0, double h,
                                const std::array<double, 4>& c, double a, double b);

using SimplexIndex = std::vector<int>;

// Lexicographic ranking of monotone m-tuples 0 <= j1 <= ... <= jm <= n.
class SimplexLayout {
 public:
  SimplexLayout() = default;
  SimplexLayout(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  std::size_t rank(const int* idx) const;
  // Count of monotone tuples of length len with entries in [lo, n].
  std::uint64_t tail_count(int lo, int len) const;
  // Advances idx to the next tuple in lex order; false past the end.
  bool next(int* idx) const;

 private:
  std::uint64_t binom(int a, int b) const;
  int m_ = 0;
  int n_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> table_;  // table_[a * (m_+2) + b] = C(a, b)
};

std::vector<SimplexIndex> simplex_points(int m, const Grid& grid);

std::uint64_t binomial(int a, int b);

// A function of m variables stored on the grid points of T_m.
struct WedgeGrid {
  int m = 0;
  Grid grid;
  SimplexLayout layout;
  std::vector<double> values;

  double at(const int* idx) const { return values[layout.rank(idx)]; }
  double at(const SimplexIndex& idx) const { return at(idx.data()); }
  // Piecewise-linear interpolation on the Kuhn subdivision of each cube
  // cell; theta must be sorted (a point of T_m).
  double interpolate(const double* theta) const;
  double sup_norm() const;
};

WedgeGrid make_wedge(int m, const Grid& grid);
WedgeGrid make_wedge(int m, const Grid& grid, const std::function<double(const double*)>& f);

// Largest supported order for simplex storage.
inline constexpr int kMaxOrder = 6;

// Antisymmetric extension: sorts idx, applies the permutation sign, returns 0
// on a repeated coordinate.
double antisym_eval_idx(const WedgeGrid& phi, const int* idx);
double antisym_eval(const WedgeGrid& phi, const std::vector<double>& theta);

// Trajectory of a scalar DDE: samples[k] = x(t0 - 1 + k h), t0 = t0_ticks * h.
struct Trajectory {
  Grid grid;
  long t0_ticks = 0;
  std::vector<double> samples;

  double t0() const { return static_cast<double>(t0_ticks) / grid.n_sub; }
  long end_ticks() const { return t0_ticks - grid.n_sub + static_cast<long>(samples.size()) - 1; }
  double end() const { return static_cast<double>(end_ticks()) / grid.n_sub; }
  double at_ticks(long k) const;
  Segment segment_at(double t) const;
  Segment segment_at_ticks(long k) const;
};

// Determinant of an m x m row-major matrix by partial pivoting; a is overwritten.
double det_pivoted(double* a, int m);

WedgeGrid wedge_from_solutions(const std::vector<Trajectory>& trajs, double t);

void write_segment_csv(std::ostream& os, const Segment& s);
void write_wedge_csv(std::ostream& os, const WedgeGrid& w);
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace cdde

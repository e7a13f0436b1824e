// SPDX-License-Identifier: Apache-2.0
#include "simplex_box.hpp"

namespace cdde::detail {

AxisTables::AxisTables(const WedgeGrid& phi, const std::vector<double>& g) {
  const int m = phi.m;
  const double hh = 0.5 * phi.grid.h;
  const auto& lay = phi.layout;
  tables_.assign(static_cast<std::size_t>(m), std::vector<double>(lay.size(), 0.0));
  int idx[kMaxOrder] = {0};
  std::size_t r = 0;
  do {
    for (int p = 0; p < m; ++p) {
      const int base = p > 0 ? idx[p - 1] : 0;
      if (idx[p] == base) continue;
      idx[p] -= 1;
      const std::size_t rp = lay.rank(idx);
      idx[p] += 1;
      auto& T = tables_[static_cast<std::size_t>(p)];
      T[r] = T[rp] + hh * (g[idx[p] - 1] * phi.values[rp] + g[idx[p]] * phi.values[r]);
    }
    ++r;
  } while (lay.next(idx));
}

namespace {

struct BoxCtx {
  const WedgeGrid* phi;
  const std::vector<double>* table;
  const std::vector<double>* g;
  const int* bounds;
  int k;
  int* tuple;
  double h;
};

double inner(const BoxCtx& c) {
  const int p = c.k - 1;
  c.tuple[p] = c.bounds[p + 1];
  const double hi = (*c.table)[c.phi->layout.rank(c.tuple)];
  c.tuple[p] = c.bounds[p];
  const double lo = (*c.table)[c.phi->layout.rank(c.tuple)];
  return hi - lo;
}

double outer(const BoxCtx& c, int p) {
  if (p == c.k - 1) return inner(c);
  const int lo = c.bounds[p], hi = c.bounds[p + 1];
  double s = 0.0;
  for (int j = lo; j <= hi; ++j) {
    const double w = (j == lo || j == hi) ? 0.5 * c.h : c.h;
    c.tuple[p] = j;
    s += w * (*c.g)[j] * outer(c, p + 1);
  }
  return s;
}

}  // namespace

double box_sum(const WedgeGrid& phi, const AxisTables& tables, const std::vector<double>& g, const int* bounds,
               int k, const int* trailing) {
  const int m = phi.m;
  int tuple[kMaxOrder];
  for (int q = k; q < m; ++q) tuple[q] = trailing[q - k];
  if (k == 0) return phi.at(tuple);
  for (int p = 0; p < k; ++p)
    if (bounds[p] == bounds[p + 1]) return 0.0;
  BoxCtx c{&phi, &tables.axis(k - 1), &g, bounds, k, tuple, phi.grid.h};
  return outer(c, 0);
}

}  // namespace cdde::detail

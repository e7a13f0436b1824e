// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cdde/segfun.hpp"

namespace cdde::detail {

// Cumulative trapezoid integrals of g(t_p) phi(t) along each axis p, started
// at the smallest admissible value of t_p (the previous coordinate, or 0).
class AxisTables {
 public:
  AxisTables(const WedgeGrid& phi, const std::vector<double>& g);
  const std::vector<double>& axis(int p) const { return tables_[static_cast<std::size_t>(p)]; }

 private:
  std::vector<std::vector<double>> tables_;
};

// Iterated trapezoid sum over j_p in [bounds[p], bounds[p+1]], p < k, of
// prod_p g[j_p] * phi(j_0, ..., j_{k-1}, trailing...). bounds has k+1 entries.
double box_sum(const WedgeGrid& phi, const AxisTables& tables, const std::vector<double>& g, const int* bounds,
               int k, const int* trailing);

}  // namespace cdde::detail

// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "cdde/compound.hpp"
#include "cdde/errors.hpp"
#include "cdde/parallel.hpp"
#include "cdde/u0pos.hpp"
#include "doctest.h"

using namespace cdde;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Unsupported;
}

double max_diff(const WedgeGrid& a, const WedgeGrid& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::fabs(a.values[i] - b.values[i]));
  return d;
}

PeriodicCoefficient wavy(const Grid& g, double sign) {
  return make_coefficient(g, 1.0, [sign](double t) { return sign * (1.0 + 0.5 * std::sin(2 * kPi * t)); });
}

// Smooth antisymmetric test function: u_m times a positive smooth factor.
WedgeGrid smooth_wedge(int m, const Grid& g) {
  return make_wedge(m, g, [m](const double* t) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += t[i];
    return u_m_eval(std::vector<double>(t, t + m)) * std::exp(0.5 * s);
  });
}

}  // namespace

TEST_CASE("m = 1 wedge step is the scalar step") {
  Grid g = make_grid(16);
  auto b = wavy(g, -1.0);
  Segment psi = make_segment(g, [](double t) { return std::sin(4 * t) + t; });
  WedgeGrid w = make_wedge(1, g);
  w.values = psi.values;
  for (double eta : {0.25, 0.5, 1.0}) {
    WedgeGrid r = wedge_step(b, 0.25, eta, w);
    Segment s = step(b, 0.25, eta, psi);
    for (int j = 0; j <= 16; ++j) CHECK(std::fabs(r.values[j] - s.values[j]) <= 1e-12);
  }
  WedgeGrid e = wedge_evolve(b, 0.0, 2.5, w);
  Segment s = solve(b, 0.0, 2.5, psi).segment_at(2.5);
  for (int j = 0; j <= 16; ++j) CHECK(std::fabs(e.values[j] - s.values[j]) <= 1e-12);
}

TEST_CASE("zero coefficient reduces to the shift") {
  Grid g = make_grid(8);
  auto b0 = constant_coefficient(g, 1.0, 0.0);
  for (int m = 2; m <= 3; ++m) {
    std::mt19937_64 rng(m);
    WedgeGrid phi = random_antisymmetric(m, g, rng);
    for (int e : {2, 5, 8}) {
      WedgeGrid r = wedge_step_ticks(b0, 0, e, phi);
      for (const auto& p : simplex_points(m, g)) {
        int a = 0;
        while (a < m && p[a] <= 8 - e) ++a;
        // a counts coordinates at or left of -eta; use the smallest admissible split.
        int a_small = 0;
        while (a_small < m && p[a_small] < 8 - e) ++a_small;
        double want = 0.0;
        std::vector<int> sh(m);
        if (a_small == m) {
          for (int i = 0; i < m; ++i) sh[i] = p[i] + e;
          want = phi.at(sh);
        } else if (a >= m - 1) {
          for (int i = 0; i < m - 1; ++i) sh[i] = p[i] + e;
          sh[m - 1] = 8;
          want = antisym_eval_idx(phi, sh.data());
        }
        CAPTURE(p[0]);
        CAPTURE(p[m - 1]);
        CHECK(std::fabs(r.at(p) - want) <= 1e-14);
      }
    }
  }
}

TEST_CASE("u2 example and closed form") {
  Grid g = make_grid(8);
  auto b1 = constant_coefficient(g, 1.0, 1.0);
  WedgeGrid u2 = u_m_grid(2, g);
  WedgeGrid r = wedge_step(b1, 0.0, 1.0, u2);
  int idx[2] = {0, 8};
  CHECK(r.at(idx) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(m2_closed_form(b1, 0.0, u2, {0, 8}) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(kind_of([&] { m2_closed_form(b1, 0.0, u_m_grid(3, g), {0, 1, 2}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("closed form agrees with the general step on random inputs") {
  Grid g = make_grid(10);
  auto b = wavy(g, 1.0);
  std::mt19937_64 rng(77);
  const auto pts = simplex_points(2, g);
  for (int trial = 0; trial < 100; ++trial) {
    WedgeGrid phi = random_antisymmetric(2, g, rng);
    WedgeGrid r = wedge_step(b, 0.3, 1.0, phi);
    for (const auto& p : pts) CHECK(std::fabs(m2_closed_form(b, 0.3, phi, p) - r.at(p)) <= 1e-10);
  }
}

TEST_CASE("wedge_evolve basics") {
  Grid g = make_grid(8);
  auto b = wavy(g, 1.0);
  std::mt19937_64 rng(1);
  WedgeGrid phi = random_antisymmetric(2, g, rng);
  CHECK(wedge_evolve(b, 0.5, 0.5, phi).values == phi.values);
  WedgeGrid twice = wedge_step(b, 1.0, 1.0, wedge_step(b, 0.0, 1.0, phi));
  CHECK(max_diff(twice, wedge_evolve(b, 0.0, 2.0, phi)) == 0.0);
  CHECK(kind_of([&] { wedge_evolve(b, 1.0, 0.5, phi); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { wedge_step(b, 0.0, 1.5, phi); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { wedge_step(b, 0.0, 0.0, phi); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("wedge evolution agrees with the determinant of solutions") {
  const int n = 32;
  Grid g = make_grid(n);
  auto b1 = constant_coefficient(g, 1.0, 1.0);
  Segment s1 = make_segment(g, [](double) { return 1.0; });
  Segment s2 = make_segment(g, [](double t) { return t; });
  std::vector<Trajectory> trs = {solve(b1, 0.0, 2.0, s1), solve(b1, 0.0, 2.0, s2)};
  WedgeGrid phi0 = wedge_from_solutions(trs, 0.0);
  WedgeGrid evolved = wedge_evolve(b1, 0.0, 2.0, phi0);
  WedgeGrid det = wedge_from_solutions(trs, 2.0);
  CHECK(max_diff(evolved, det) <= 5e-3);
}

TEST_CASE("tensor oracle coordinate order does not matter") {
  Grid g = make_grid(12);
  std::mt19937_64 rng(6);
  for (int m = 2; m <= 3; ++m) {
    auto b = wavy(g, m % 2 ? -1.0 : 1.0);
    CubeGrid cube = antisymmetric_cube(random_antisymmetric(m, g, rng));
    CubeGrid fwd = tensor_oracle_step(b, 0.0, 0.75, cube);
    std::vector<int> rev(m);
    for (int i = 0; i < m; ++i) rev[i] = m - 1 - i;
    CubeGrid bwd = tensor_oracle_step(b, 0.0, 0.75, cube, rev);
    double d = 0.0;
    for (std::size_t i = 0; i < fwd.values.size(); ++i) d = std::max(d, std::fabs(fwd.values[i] - bwd.values[i]));
    CHECK(d <= 1e-12);
  }
  CHECK(kind_of([&] {
          tensor_oracle_step(constant_coefficient(g, 1.0, 1.0), 0.0, 1.0, antisymmetric_cube(make_wedge(1, g)), {0, 0});
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("tensor oracle with m = 1 is the scalar step") {
  Grid g = make_grid(10);
  auto b = wavy(g, 1.0);
  Segment psi = make_segment(g, [](double t) { return std::cos(2 * t); });
  WedgeGrid w = make_wedge(1, g);
  w.values = psi.values;
  CubeGrid r = tensor_oracle_step(b, 0.0, 0.6, antisymmetric_cube(w));
  Segment s = step(b, 0.0, 0.6, psi);
  for (int j = 0; j <= 10; ++j) CHECK(std::fabs(r.values[j] - s.values[j]) <= 1e-14);
}

TEST_CASE("direct step agrees with the tensor oracle") {
  for (int m = 2; m <= 3; ++m) {
    for (int n : {8, 16}) {
      Grid g = make_grid(n);
      auto b = constant_coefficient(g, 1.0, m % 2 ? -1.0 : 1.0);
      std::mt19937_64 rng(100 + n + m);
      double worst = 0.0;
      for (int trial = 0; trial < 5; ++trial) {
        WedgeGrid phi = random_antisymmetric(m, g, rng);
        for (double eta : {0.5, 1.0}) {
          WedgeGrid direct = wedge_step(b, 0.0, eta, phi);
          WedgeGrid oracle = restrict_to_simplex(tensor_oracle_step(b, 0.0, eta, antisymmetric_cube(phi)));
          worst = std::max(worst, max_diff(direct, oracle));
        }
      }
      CHECK(worst <= 5e-3);
      CHECK(worst <= 1.0 / (n * n));
    }
  }
}

TEST_CASE("split choice at ambiguous points does not change the result") {
  Grid g = make_grid(12);
  std::mt19937_64 rng(13);
  for (int m = 2; m <= 3; ++m) {
    auto b = wavy(g, m % 2 ? -1.0 : 1.0);
    for (int e : {3, 6, 12}) {
      WedgeGrid phi = random_antisymmetric(m, g, rng);
      WedgeGrid lo = wedge_step_ticks(b, 2, e, phi, SplitChoice::Smallest);
      WedgeGrid hi = wedge_step_ticks(b, 2, e, phi, SplitChoice::Largest);
      CHECK(max_diff(lo, hi) <= 1e-9 * std::max(1.0, lo.sup_norm()));
    }
  }
}

TEST_CASE("process property across a split time") {
  const int n = 16;
  const double h = 1.0 / n;
  Grid g = make_grid(n);
  for (int m = 2; m <= 3; ++m) {
    auto b = wavy(g, m % 2 ? -1.0 : 1.0);
    WedgeGrid phi = smooth_wedge(m, g);
    WedgeGrid direct = wedge_evolve(b, 0.0, 2.0, phi);
    WedgeGrid split = wedge_evolve(b, 0.5, 2.0, wedge_evolve(b, 0.0, 0.5, phi));
    CHECK(max_diff(direct, split) <= 10 * h * h * std::max(phi.sup_norm(), direct.sup_norm()));
  }
}

TEST_CASE("cone_check examples") {
  Grid g = make_grid(6);
  WedgeGrid u2 = u_m_grid(2, g);
  ConeReport r = cone_check(u2, 0.0);
  CHECK(r.passed);
  CHECK(r.min_value == 0.0);
  WedgeGrid neg = u2;
  for (double& v : neg.values) v = -v;
  r = cone_check(neg, 1e-12);
  CHECK_FALSE(r.passed);
  CHECK(r.min_value == doctest::Approx(-1.0));
  CHECK(r.argmin == SimplexIndex{0, 6});
  CHECK(cone_check(u_m_grid(3, g), 0.0).passed);
}

TEST_CASE("positivity certificate examples") {
  Grid g = make_grid(12);
  CertReport r = positivity_certificate(constant_coefficient(g, 1.0, 1.0), 0.0, 1.0, 2, 100, 7);
  CHECK(r.passed);
  CHECK(r.seed == 7);
  Grid g8 = make_grid(8);
  r = positivity_certificate(constant_coefficient(g8, 1.0, -1.0), 0.0, 1.5, 3, 20, 7);
  CHECK(r.passed);
  CHECK(kind_of([&] { positivity_certificate(constant_coefficient(g, 1.0, -1.0), 0.0, 1.0, 2, 10, 7); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("positivity certificate is reproducible and thread independent") {
  Grid g = make_grid(10);
  auto b = wavy(g, 1.0);
  set_threads(1);
  CertReport a = positivity_certificate(b, 0.0, 2.0, 2, 16, 99);
  set_threads(4);
  CertReport c = positivity_certificate(b, 0.0, 2.0, 2, 16, 99);
  set_threads(0);
  CHECK(a.min_value == c.min_value);
  CHECK(a.argmin == c.argmin);
}

TEST_CASE("stronger feedback dominates on cone inputs") {
  Grid g = make_grid(10);
  std::mt19937_64 rng(3);
  for (int m = 2; m <= 3; ++m) {
    const double s = m % 2 ? -1.0 : 1.0;
    auto strong = constant_coefficient(g, 1.0, 2.0 * s);
    auto weak = wavy(g, s);
    for (int trial = 0; trial < 5; ++trial) {
      WedgeGrid phi = random_cone_element(m, g, rng);
      for (double t : {1.0, 2.0}) {
        WedgeGrid hi = wedge_evolve(strong, 0.0, t, phi);
        WedgeGrid lo = wedge_evolve(weak, 0.0, t, phi);
        for (std::size_t i = 0; i < hi.values.size(); ++i)
          CHECK(hi.values[i] >= lo.values[i] - 1e-12 * std::max(1.0, hi.sup_norm()));
      }
    }
  }
}

TEST_CASE("determinant check examples") {
  Grid g = make_grid(16);
  CertReport r = leading_det_check(0.0, 1.0, 2, {0.0, 3.0}, g);
  CHECK(r.passed);
  r = leading_det_check(0.0, -1.0, 1, {0.0, 3.0}, g);
  CHECK(r.passed);
  CHECK(r.min_value >= 0.0);

  Segment one = make_segment(g, [](double) { return 1.0; });
  auto b1 = constant_coefficient(g, 1.0, 1.0);
  Trajectory x = solve(b1, 0.0, 3.0, one);
  r = leading_det_check({x, x}, {1.0, 3.0});
  CHECK_FALSE(r.passed);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("periodic determinant check") {
  Grid g = make_grid(16);
  DdeSystem sys{constant_coefficient(g, 1.0, 0.0), wavy(g, 1.0), 2};
  CertReport r = leading_det_check(sys, 2, {1.0, 3.0});
  CHECK(r.passed);
}

// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "cdde/compound.hpp"
#include "cdde/errors.hpp"
#include "cdde/u0pos.hpp"
#include "doctest.h"

using namespace cdde;

namespace {

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

WedgeGrid ones(int m, const Grid& g) {
  return make_wedge(m, g, [](const double*) { return 1.0; });
}

std::vector<double> nodes_of(const Grid& g, const SimplexIndex& p) {
  std::vector<double> t;
  for (int j : p) t.push_back(g.node(j));
  return t;
}

}  // namespace

TEST_CASE("u_m examples") {
  CHECK(u_m_eval({-0.5, 0.0}) == doctest::Approx(0.5));
  CHECK(u_m_eval({-1.0, -0.5, 0.0}) == doctest::Approx(0.125));
  CHECK(u_m_eval({-1.0, 0.0, 0.0}) == 0.0);
  CHECK(kind_of([] { u_m_eval({0.0, -0.5}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { u_m_eval({-1.5, 0.0}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("u_m^q examples") {
  CHECK(u_m_q_eval({-0.7, -0.2, -0.1}, 0) == 1.0);
  CHECK(u_m_q_eval({-1.0, -0.5, 0.0}, 2) == doctest::Approx(0.125));
  CHECK(u_m_q_eval({-0.5, 0.0}, 1) == doctest::Approx(0.5));
  CHECK(kind_of([] { u_m_q_eval({-0.5, 0.0}, 2); }) == ErrorKind::InvalidArgument);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1, 0);
  for (int m = 2; m <= 5; ++m)
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> t(m);
      for (double& x : t) x = d(rng);
      std::sort(t.begin(), t.end());
      CHECK(u_m_q_eval(t, m - 1) == doctest::Approx(u_m_eval(t)).epsilon(1e-14));
    }
}

TEST_CASE("apply_A examples") {
  Grid g = make_grid(8);
  WedgeGrid one = ones(2, g);
  WedgeGrid r = apply_A(one);
  WedgeGrid r0 = apply_A(one, OpPart::Zero);
  for (const auto& p : simplex_points(2, g)) {
    const double t1 = g.node(p[0]), t2 = g.node(p[1]);
    CHECK(r.at(p) == doctest::Approx((t2 - t1) * (2 + t1)).epsilon(1e-13));
    CHECK(r0.at(p) == doctest::Approx(t2 - t1).epsilon(1e-13));
    CHECK(r.at(p) <= 2 * (t2 - t1) + 1e-14);
  }
  int idx[2] = {4, 8};
  CHECK(r.at(idx) == doctest::Approx(0.75));
  CHECK(kind_of([&] { apply_A(ones(6, make_grid(2))); }) == ErrorKind::Capacity);
}

TEST_CASE("grid A agrees with the exact rule on multilinear data") {
  Grid g = make_grid(6);
  auto f = [](const double* t) { return 1.0 + 0.5 * t[0] - 0.25 * t[1] + 0.1 * t[2]; };
  WedgeGrid phi = make_wedge(3, g, f);
  for (OpPart part : {OpPart::Zero, OpPart::One, OpPart::Both}) {
    WedgeGrid r = apply_A(phi, part);
    for (const auto& p : simplex_points(3, g))
      CHECK(std::fabs(r.at(p) - apply_A_exact(f, 3, nodes_of(g, p), part, 3)) <= 1e-13);
  }
}

TEST_CASE("apply_B examples") {
  Grid g = make_grid(8);
  WedgeGrid one = ones(2, g);
  WedgeGrid b0 = apply_B(one, OpPart::Zero), b1 = apply_B(one, OpPart::One), b = apply_B(one);
  for (const auto& p : simplex_points(2, g)) {
    const double t1 = g.node(p[0]), t2 = g.node(p[1]);
    CHECK(b0.at(p) == doctest::Approx(-(t1 + t2) / 2).epsilon(1e-13));
    CHECK(b1.at(p) == doctest::Approx((1 + t1) * (1 + t2) / 2).epsilon(1e-13));
  }
  int idx[2] = {4, 8};
  CHECK(b.at(idx) == doctest::Approx(0.5));

  WedgeGrid t = apply_B(ones(3, g), OpPart::Zero);
  int trip[3] = {0, 0, 0};
  CHECK(t.at(trip) == doctest::Approx(0.5));
  int sing[3] = {0, 8, 8};
  CHECK(is_singular_point(3, sing, 8));
  CHECK(apply_B(ones(3, g)).at(sing) == 0.0);
  CHECK(kind_of([&] { apply_B(ones(4, make_grid(4))); }) == ErrorKind::Unsupported);
}

TEST_CASE("continuous B and grid B converge together on smooth data") {
  auto f = [](const double* t) { return 2.0 + std::cos(3 * t[0]) * std::exp(t[1]) + (t[2] + 1.0) * t[0]; };
  auto f2 = [](const double* t) { return 2.0 + std::cos(3 * t[0]) * std::exp(t[1]); };
  // Compared at the fixed nodes of a coarse grid, so every point keeps its distance to the corners.
  const int coarse = 4;
  for (int m = 2; m <= 3; ++m) {
    double err[2];
    int i = 0;
    for (int n : {8, 16}) {
      Grid g = make_grid(n);
      WedgeGrid phi = m == 2 ? make_wedge(2, g, f2) : make_wedge(3, g, f);
      WedgeGrid r = apply_B(phi);
      double e = 0.0;
      for (auto p : simplex_points(m, make_grid(coarse))) {
        if (is_singular_point(m, p.data(), coarse)) continue;
        for (int& j : p) j *= n / coarse;
        e = std::max(e, std::fabs(apply_B_at(phi, nodes_of(g, p)) - r.at(p)));
      }
      err[i++] = e;
    }
    CAPTURE(m);
    CHECK(err[1] <= 1e-2);
    CHECK(err[0] / err[1] >= 3.0);
  }
}

TEST_CASE("B is conjugate to A through u_m") {
  // Linear zeta: the grid interpolant is exact, so both sides are exact.
  auto zeta = [](const double* t) { return 1.0 + 0.3 * t[0] - 0.7 * t[1]; };
  auto phi = [&](const double* t) { return zeta(t) * (t[1] - t[0]); };
  Grid g = make_grid(4);
  WedgeGrid zg = make_wedge(2, g, zeta);
  for (double t1 : {-0.9, -0.55, -0.3}) {
    for (double t2 : {-0.2, -0.05}) {
      std::vector<double> th = {t1, t2};
      for (OpPart part : {OpPart::Zero, OpPart::One, OpPart::Both}) {
        double lhs = apply_B_at(zg, th, part) * u_m_eval(th);
        double rhs = apply_A_exact(phi, 2, th, part, 3);
        CHECK(std::fabs(lhs - rhs) <= 1e-12);
      }
    }
  }
}

TEST_CASE("iterated conjugacy holds on the grid") {
  // phi supported away from the faces of T_2.
  auto bump = [](const double* t) {
    double a = t[0] + 0.75, b = t[1] + 0.25;
    double r = 1.0 - 40.0 * (a * a + b * b);
    return r > 0 ? r * r : 0.0;
  };
  for (int n : {16, 32}) {
    Grid g = make_grid(n);
    WedgeGrid A = make_wedge(2, g, bump);
    WedgeGrid B = make_wedge(2, g, [&](const double* t) {
      double u = t[1] - t[0];
      return u > 0 ? bump(t) / u : 0.0;
    });
    for (int k = 1; k <= 3; ++k) {
      A = apply_A(A), B = apply_B(B);
      const double scale = A.sup_norm();
      for (const auto& p : simplex_points(2, g)) {
        if (p[0] == p[1]) continue;
        CHECK(std::fabs(B.at(p) * u_m_eval(nodes_of(g, p)) - A.at(p)) <= 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("A and B keep the cone") {
  std::mt19937_64 rng(9);
  Grid g = make_grid(8);
  for (int m = 2; m <= 3; ++m)
    for (int trial = 0; trial < 10; ++trial) {
      WedgeGrid phi = random_cone_element(m, g, rng);
      for (OpPart part : {OpPart::Zero, OpPart::One, OpPart::Both}) {
        WedgeGrid a = apply_A(phi, part), b = apply_B(phi, part);
        CHECK(a.values[std::min_element(a.values.begin(), a.values.end()) - a.values.begin()] >=
              -1e-12 * a.sup_norm());
        CHECK(*std::min_element(b.values.begin(), b.values.end()) >= -1e-12 * b.sup_norm());
      }
    }
}

TEST_CASE("empirical norms of B") {
  std::mt19937_64 rng(10);
  for (int m = 2; m <= 3; ++m) {
    Grid g = make_grid(m == 2 ? 16 : 8);
    for (int trial = 0; trial < 50; ++trial) {
      WedgeGrid phi = random_antisymmetric(m, g, rng);
      if (trial % 2) phi = random_cone_element(m, g, rng);
      const double s = phi.sup_norm();
      CHECK(apply_B(phi, OpPart::Zero).sup_norm() <= (1 + 1e-9) * s);
      CHECK(apply_B(phi, OpPart::One).sup_norm() <= (1 + 1e-9) * s);
      CHECK(apply_B(phi).sup_norm() <= (2 + 1e-9) * s);
    }
  }
}

TEST_CASE("nu examples") {
  auto [a0, a1] = nu_eval({-1.0, -0.5, 0.0});
  CHECK(a0 == doctest::Approx(1.0));
  CHECK(a1 == doctest::Approx(0.0));
  auto [b0, b1] = nu_eval({0.0, 0.0, 0.0});
  CHECK(b0 == doctest::Approx(0.0));
  CHECK(b1 == doctest::Approx(1.0));
  CHECK(kind_of([] { nu_eval({-1.0, 0.0, 0.0}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { nu_eval({-1.0, 0.0, -0.5}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("decomposition constants") {
  for (int n : {4, 12}) {
    CvDecomposition cv = decompose_CV(ones(3, make_grid(n)));
    CHECK(std::fabs(cv.Q0 - 1.0 / 24) <= 1e-9);
    CHECK(std::fabs(cv.Q1 - 1.0 / 12) <= 1e-9);
  }
  Grid g = make_grid(12);
  CvDecomposition cv = decompose_CV(ones(3, g));
  CHECK(cv.reconstruction_error <= 1e-6);
  CHECK(cv.probes_decay);
  REQUIRE(cv.probe_psi.size() == 3);
  CHECK(cv.probe_psi[2] < cv.probe_psi[1]);
  CHECK(cv.probe_psi[1] < cv.probe_psi[0]);
  CHECK(cv.to_json().contains("Q0"));
}

TEST_CASE("decomposition of the nu functions") {
  Grid g = make_grid(24);
  // Values at the singular point follow the slice limits used by each integral.
  WedgeGrid n1 = make_wedge(3, g, [](const double* t) {
    if (t[0] == -1.0 && t[1] == 0.0) return 1.0;
    return nu_eval({t[0], t[1], t[2]}).second;
  });
  CvDecomposition c1 = decompose_CV(n1);
  CHECK(std::fabs(c1.Q0 - 1.0 / 24) <= 1e-9);
  const double h = 1.0 / 24;
  CHECK(std::fabs(c1.Q1) <= h * h * h);
  WedgeGrid n0 = make_wedge(3, g, [](const double* t) {
    if (t[0] == -1.0 && t[1] == 0.0) return 1.0;
    return nu_eval({t[0], t[1], t[2]}).first;
  });
  CvDecomposition c0 = decompose_CV(n0);
  CHECK(std::fabs(c0.Q1 - 1.0 / 12) <= 1e-9);
  // Only the cell next to the singular point sees its value.
  CHECK(std::fabs(c0.Q0) <= h * h);
}

TEST_CASE("ratio report examples") {
  Grid g = make_grid(16);
  RatioReport r = u0_ratio(ones(2, g), 3);
  CHECK(r.passed);
  CHECK(r.min_ratio > 0);
  CHECK(r.max_ratio <= 8.0);
  CHECK_FALSE(r.exploratory);

  Grid g3 = make_grid(12);
  RatioReport r3 = u0_ratio(ones(3, g3), 5);
  CHECK(r3.passed);
  CHECK(r3.min_ratio > 0);
  CHECK(r3.max_ratio <= 32.0);

  RatioReport rb = u0_ratio(make_probe(2, g, "bump"), 3);
  CHECK(rb.passed);
  CHECK(rb.max_ratio <= 8.0 * make_probe(2, g, "bump").sup_norm());

  RatioReport w = u0_ratio(ones(3, g3), 1);
  CHECK_FALSE(w.warnings.empty());

  RatioReport e = u0_ratio(ones(4, make_grid(12)), 3);
  CHECK(e.exploratory);

  WedgeGrid neg = ones(2, g);
  neg.values[5] = -0.5;
  CHECK(kind_of([&] { u0_ratio(neg, 3); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { u0_ratio(make_wedge(2, g), 3); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("interior rule") {
  int a[2] = {2, 14};
  CHECK(is_ratio_interior(2, a, 16));
  int b[2] = {1, 14};
  CHECK_FALSE(is_ratio_interior(2, b, 16));
  int c[3] = {2, 3, 10};
  CHECK_FALSE(is_ratio_interior(3, c, 16));
}

TEST_CASE("pointwise bounds") {
  Grid g = make_grid(10);
  CHECK(pointwise_bound_check(2, 0, g).passed);
  CHECK(pointwise_bound_check(3, 0, g).passed);
  CHECK(pointwise_bound_check(3, 1, g).passed);
  CHECK(pointwise_bound_check(4, 2, make_grid(5)).passed);
  WedgeGrid a0 = apply_A(ones(2, g), OpPart::Zero);
  WedgeGrid u21 = u_m_q_grid(2, 1, g);
  for (std::size_t i = 0; i < a0.values.size(); ++i) CHECK(a0.values[i] == doctest::Approx(u21.values[i]).epsilon(1e-13));
}

TEST_CASE("B iteration floors") {
  Grid g = make_grid(12);
  CertReport r = b_floor_check(ones(2, g), 3);
  CHECK(r.passed);
  CHECK(r.min_value > 0);
  r = b_floor_check(ones(3, make_grid(8)), 5);
  CHECK(r.passed);
  CHECK(r.min_value > 0);
  r = b_floor_check(make_probe(2, g, "bump"), 3);
  CHECK(r.passed);
  CHECK(kind_of([&] { b_floor_check(ones(2, g), 2); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("probes are nonnegative and reproducible") {
  Grid g = make_grid(10);
  for (int m = 2; m <= 4; ++m)
    for (const char* kind : {"const", "bump", "random"}) {
      WedgeGrid p = make_probe(m, g, kind, 5);
      CHECK(*std::min_element(p.values.begin(), p.values.end()) >= 0.0);
      CHECK(p.sup_norm() > 0.0);
      CHECK(make_probe(m, g, kind, 5).values == p.values);
    }
  CHECK(kind_of([&] { make_probe(2, g, "spike"); }) == ErrorKind::InvalidArgument);
}

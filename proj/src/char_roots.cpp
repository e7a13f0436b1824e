// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <string>

#include "cdde/errors.hpp"
#include "cdde/floquet.hpp"

namespace cdde {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvE = 0.36787944117144233;

cplx w_seed(int branch, cplx z) {
  const cplx two_pi_i(0.0, 2.0 * kPi);
  const double near = std::abs(z + kInvE);
  if ((branch == 0 || branch == -1) && near < 0.3) {
    cplx p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
    if (branch == -1) p = -p;
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  if (branch == 0 && std::abs(z) < 0.3) return z;
  if (branch == 0 && std::abs(z) < 3.0 && std::abs(1.0 + z) > 0.5) return std::log(1.0 + z);
  const cplx L1 = std::log(z) + two_pi_i * static_cast<double>(branch);
  const cplx L2 = std::log(L1);
  return L1 - L2 + L2 / L1;
}

}  // namespace

cplx lambert_w(int branch, cplx z) {
  if (z == cplx(0.0, 0.0)) {
    if (branch == 0) return 0.0;
    fail(ErrorKind::InvalidArgument, "lambert_w: non-principal branch is singular at 0");
  }
  cplx w = w_seed(branch, z);
  for (int it = 0; it < 100; ++it) {
    const cplx ew = std::exp(w);
    const cplx f = w * ew - z;
    const cplx wp1 = w + 1.0;
    if (std::abs(wp1) < 1e-300) break;
    const cplx d = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const cplx step = f / d;
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

std::vector<cplx> char_roots(double alpha0, double beta0, int count) {
  require(beta0 != 0.0, "char_roots requires beta0 != 0");
  require(count >= 1 && count <= 64, "char_roots count must lie in [1, 64]");
  const cplx z(-beta0 * std::exp(alpha0), 0.0);
  auto F = [&](cplx s) { return s + alpha0 + beta0 * std::exp(-s); };
  auto dF = [&](cplx s) { return 1.0 - beta0 * std::exp(-s); };

  std::vector<cplx> roots;
  const int K = count / 2 + 3;
  for (int k = -K - 1; k <= K; ++k) {
    cplx s = lambert_w(k, z) - alpha0;
    double best = std::abs(F(s));
    cplx best_s = s;
    for (int it = 0; it < 200 && best >= 1e-13; ++it) {
      const cplx d = dF(s);
      if (d == cplx(0.0, 0.0)) break;
      s -= F(s) / d;
      const double r = std::abs(F(s));
      if (r < best) best = r, best_s = s;
    }
    if (!(best < 1e-12))
      fail(ErrorKind::NumericFailure, "char_roots: Newton did not converge on branch " + std::to_string(k) +
                                          " (residual " + std::to_string(best) + ")");
    if (std::fabs(best_s.imag()) < 1e-10) best_s.imag(0.0);
    roots.push_back(best_s);
    if (best_s.imag() != 0.0) roots.push_back(std::conj(best_s));
  }
  std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  std::vector<cplx> uniq;
  for (const cplx& r : roots) {
    bool dup = false;
    for (const cplx& u : uniq) dup = dup || std::abs(u - r) < 1e-8;
    if (!dup) uniq.push_back(r);
  }
  // Pair members share a real part; keep the positive imaginary part first.
  std::stable_sort(uniq.begin(), uniq.end(), [](const cplx& a, const cplx& b) {
    if (std::fabs(a.real() - b.real()) > 1e-12 * (1.0 + std::fabs(a.real()))) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  std::size_t keep = std::min<std::size_t>(uniq.size(), static_cast<std::size_t>(count));
  if (keep < uniq.size() && keep > 0 && uniq[keep - 1].imag() > 0.0) ++keep;
  uniq.resize(keep);
  return uniq;
}

}  // namespace cdde

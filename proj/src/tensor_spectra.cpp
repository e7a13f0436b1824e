// SPDX-License-Identifier: Apache-2.0
#include "cdde/tensor_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cdde/errors.hpp"
#include "cdde/kernels.hpp"
#include "cdde/segfun.hpp"

namespace cdde {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

DenseMatrix DenseMatrix::diag(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  DenseMatrix D(n, n);
  for (int i = 0; i < n; ++i) D(i, i) = d[i];
  return D;
}

double frobenius(const DenseMatrix& A) {
  return std::sqrt(kern::dot(A.a.data(), A.a.data(), A.a.size()));
}

double norm_inf(const DenseMatrix& A) {
  double best = 0.0;
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += std::fabs(A(i, j));
    best = std::max(best, s);
  }
  return best;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  require(A.cols == B.rows, "matmul: inner dimensions differ");
  DenseMatrix C(A.rows, B.cols);
  kern::gemm(A.a.data(), B.a.data(), C.a.data(), static_cast<std::size_t>(A.rows),
             static_cast<std::size_t>(A.cols), static_cast<std::size_t>(B.cols));
  return C;
}

DenseMatrix sub(const DenseMatrix& A, const DenseMatrix& B) {
  require(A.rows == B.rows && A.cols == B.cols, "sub: shape mismatch");
  DenseMatrix C = A;
  kern::axpy(-1.0, B.a.data(), C.a.data(), C.a.size());
  return C;
}

std::size_t ComplexSpectrum::total_multiplicity() const {
  std::size_t s = 0;
  for (const auto& e : eigenvalues) s += static_cast<std::size_t>(e.second);
  return s;
}

int ComplexSpectrum::multiplicity_of(cplx z, double tol) const {
  int best = 0;
  double bd = tol;
  for (const auto& e : eigenvalues) {
    double d = std::abs(e.first - z);
    if (d <= bd) bd = d, best = e.second;
  }
  return best;
}

bool spectral_before(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

namespace {

// Makes the computed spectrum of a real matrix exactly closed under
// conjugation. Returns false if some eigenvalue has no partner.
bool pair_conjugates(std::vector<cplx>& ev, double scale) {
  const double real_tol = 1e-10 * scale;
  const double pair_tol = 1e-6 * scale;
  const std::size_t n = ev.size();
  std::vector<char> used(n, 0);
  bool ok = true;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return ev[i].imag() > ev[j].imag(); });
  for (std::size_t oi : order) {
    if (used[oi] || ev[oi].imag() <= real_tol) continue;
    std::size_t best = n;
    double bd = pair_tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || j == oi || ev[j].imag() >= 0) continue;
      double d = std::abs(ev[j] - std::conj(ev[oi]));
      if (d <= bd) bd = d, best = j;
    }
    used[oi] = 1;
    if (best == n) {
      ok = false;
      continue;
    }
    used[best] = 1;
    cplx avg = 0.5 * (ev[oi] + std::conj(ev[best]));
    ev[oi] = avg;
    ev[best] = std::conj(avg);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    if (std::fabs(ev[i].imag()) <= real_tol) {
      ev[i] = cplx(ev[i].real(), 0.0);
    } else {
      ok = false;
    }
  }
  return ok;
}

double residual_proxy(const DenseMatrix& A, cplx lambda, std::uint64_t seed) {
  ComplexLU lu(A, lambda);
  if (lu.singular()) return 0.0;
  const int n = A.rows;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> x(static_cast<std::size_t>(n));
  double nb = 0.0;
  for (auto& v : x) {
    v = cplx(nd(rng), nd(rng));
    nb += std::norm(v);
  }
  double est = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 2; ++it) {
    const double nin = std::sqrt(nb);
    lu.solve(x);
    double nx = 0.0;
    for (const auto& v : x) nx += std::norm(v);
    nx = std::sqrt(nx);
    if (nx == 0.0 || !std::isfinite(nx)) return 0.0;
    est = std::min(est, nin / nx);
    for (auto& v : x) v /= nx;
    nb = 1.0;
  }
  return est;
}

}  // namespace

ComplexSpectrum eigenvalues(const DenseMatrix& A) {
  std::vector<cplx> ev = hessenberg_qr_eigenvalues(A);
  const double scale = frobenius(A);
  ComplexSpectrum out;
  out.conjugate_pairs_ok = pair_conjugates(ev, scale > 0 ? scale : 1.0);
  std::sort(ev.begin(), ev.end(), spectral_before);
  out.expanded = ev;

  const double tol = 1e-6 * scale;
  std::vector<char> used(ev.size(), 0);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    cplx sum = ev[i];
    int count = 1;
    used[i] = 1;
    for (std::size_t j = i + 1; j < ev.size(); ++j) {
      if (!used[j] && std::abs(ev[j] - ev[i]) <= tol) {
        used[j] = 1;
        sum += ev[j];
        ++count;
      }
    }
    cplx rep = sum / static_cast<double>(count);
    if (ev[i].imag() == 0.0) rep = cplx(rep.real(), 0.0);
    out.eigenvalues.emplace_back(rep, count);
  }
  std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end(),
                   [](const auto& x, const auto& y) { return spectral_before(x.first, y.first); });

  if (A.rows <= 300) {
    out.residual_checked = true;
    const double denom = scale > 0 ? scale : 1.0;
    std::uint64_t seed = 0x5eed;
    for (const auto& e : out.eigenvalues) {
      double r = residual_proxy(A, e.first, seed++) / denom;
      out.max_residual = std::max(out.max_residual, r);
    }
    out.residual_ok = out.max_residual <= 1e-8;
  }
  return out;
}

DenseMatrix kron(const DenseMatrix& A, const DenseMatrix& B) {
  const long r = static_cast<long>(A.rows) * B.rows, c = static_cast<long>(A.cols) * B.cols;
  if (r > kMaxDim || c > kMaxDim) fail(ErrorKind::Capacity, "kron: result exceeds 2048 x 2048");
  DenseMatrix K(static_cast<int>(r), static_cast<int>(c));
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) {
      const double a = A(i, j);
      if (a == 0.0) continue;
      for (int p = 0; p < B.rows; ++p)
        kern::axpy(a, B.row(p), K.row(i * B.rows + p) + static_cast<std::size_t>(j) * B.cols,
                   static_cast<std::size_t>(B.cols));
    }
  return K;
}

DenseMatrix antisymmetrizer(int n, int m) {
  require(n >= 1 && m >= 1, "antisymmetrizer: n and m must be positive");
  double total = std::pow(static_cast<double>(n), m);
  if (total > 4096) fail(ErrorKind::Capacity, "antisymmetrizer: n^m exceeds 4096");
  const int N = static_cast<int>(std::llround(total));
  DenseMatrix P(N, N);
  std::vector<int> perm(static_cast<std::size_t>(m));
  double fact = 1.0;
  for (int k = 2; k <= m; ++k) fact *= k;
  std::vector<int> digits(static_cast<std::size_t>(m));
  for (int I = 0; I < N; ++I) {
    int x = I;
    for (int p = m - 1; p >= 0; --p) {
      digits[p] = x % n;
      x /= n;
    }
    std::iota(perm.begin(), perm.end(), 0);
    do {
      int inv = 0;
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
          if (perm[a] > perm[b]) ++inv;
      int J = 0;
      for (int p = 0; p < m; ++p) J = J * n + digits[perm[p]];
      P(I, J) += (inv % 2 ? -1.0 : 1.0) / fact;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return P;
}

std::vector<std::vector<int>> ordered_subsets(int n, int m) {
  std::vector<std::vector<int>> out;
  if (m > n || m < 0) return out;
  std::vector<int> s(static_cast<std::size_t>(m));
  std::iota(s.begin(), s.end(), 0);
  for (;;) {
    out.push_back(s);
    int p = m - 1;
    while (p >= 0 && s[p] == n - m + p) --p;
    if (p < 0) break;
    ++s[p];
    for (int q = p + 1; q < m; ++q) s[q] = s[q - 1] + 1;
  }
  return out;
}

DenseMatrix compound_matrix(const DenseMatrix& A, int m) {
  require(A.rows == A.cols, "compound_matrix: matrix is not square");
  require(m >= 1, "compound_matrix: order must be positive");
  require(m <= A.rows, "compound_matrix: order exceeds dimension");
  if (binomial(A.rows, m) > static_cast<std::uint64_t>(kMaxDim))
    fail(ErrorKind::Capacity, "compound_matrix: dimension exceeds 2048");
  const auto sets = ordered_subsets(A.rows, m);
  const int N = static_cast<int>(sets.size());
  DenseMatrix C(N, N);
  std::vector<double> minor(static_cast<std::size_t>(m) * m);
  for (int I = 0; I < N; ++I)
    for (int J = 0; J < N; ++J) {
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) minor[static_cast<std::size_t>(p) * m + q] = A(sets[I][p], sets[J][q]);
      C(I, J) = det_pivoted(minor.data(), m);
    }
  return C;
}

namespace {

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

std::uint64_t predicted_wedge_multiplicity(const std::vector<std::vector<std::pair<cplx, int>>>& factor_spectra,
                                           cplx lambda0, int m, double tol) {
  require(m >= 1, "order must be positive");
  require(lambda0 != cplx(0.0), "lambda0 must be nonzero");
  if (factor_spectra.size() == 1) {
    const auto& sp = factor_spectra[0];
    const int d = static_cast<int>(sp.size());
    std::vector<int> kappa(static_cast<std::size_t>(d), 0);
    std::uint64_t total = 0;
    // Enumerate multisets of size m with per-eigenvalue caps.
    auto rec = [&](auto&& self, int i, int left, cplx prod, std::uint64_t weight) -> void {
      if (left == 0) {
        if (close(prod, lambda0, tol)) total += weight;
        return;
      }
      if (i == d) return;
      const int cap = std::min(left, sp[i].second);
      cplx p = prod;
      for (int k = 0; k <= cap; ++k) {
        kappa[i] = k;
        self(self, i + 1, left - k, p, weight * binomial(sp[i].second, k));
        p *= sp[i].first;
      }
      kappa[i] = 0;
    };
    rec(rec, 0, m, cplx(1.0), 1);
    return total;
  }
  require(static_cast<int>(factor_spectra.size()) == m, "need one spectrum or one per factor");
  std::uint64_t total = 0;
  auto rec = [&](auto&& self, int j, cplx prod, std::uint64_t weight) -> void {
    if (j == m) {
      if (close(prod, lambda0, tol)) total += weight;
      return;
    }
    for (const auto& e : factor_spectra[j]) self(self, j + 1, prod * e.first, weight * static_cast<std::uint64_t>(e.second));
  };
  rec(rec, 0, cplx(1.0), 1);
  return total;
}

double greedy_match_error(std::vector<cplx> a, std::vector<cplx> b) {
  require(a.size() == b.size(), "greedy_match_error: sizes differ");
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (const cplx& x : a) {
    std::size_t best = b.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(x - b[j]);
      if (d < bd) bd = d, best = j;
    }
    used[best] = 1;
    worst = std::max(worst, bd);
  }
  return worst;
}

int numeric_rank(const DenseMatrix& A0, double tol) {
  DenseMatrix A = A0;
  const int r = A.rows, c = A.cols;
  int rank = 0;
  std::vector<char> col_used(static_cast<std::size_t>(c), 0), row_used(static_cast<std::size_t>(r), 0);
  for (int step = 0; step < std::min(r, c); ++step) {
    int bi = -1, bj = -1;
    double best = tol;
    for (int i = 0; i < r; ++i) {
      if (row_used[i]) continue;
      for (int j = 0; j < c; ++j) {
        if (col_used[j]) continue;
        if (std::fabs(A(i, j)) > best) best = std::fabs(A(i, j)), bi = i, bj = j;
      }
    }
    if (bi < 0) break;
    ++rank;
    row_used[bi] = col_used[bj] = 1;
    for (int i = 0; i < r; ++i) {
      if (row_used[i]) continue;
      const double f = A(i, bj) / A(bi, bj);
      if (f != 0.0) kern::axpy(-f, A.row(bi), A.row(i), static_cast<std::size_t>(c));
    }
  }
  return rank;
}

}  // namespace cdde

// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <string>

#include "cdde/errors.hpp"
#include "cdde/kernels.hpp"
#include "cdde/tensor_spectra.hpp"

namespace cdde {

namespace {

// Diagonal similarity by powers of two so row and column norms are comparable.
void balance(DenseMatrix& A) {
  const int n = A.rows;
  const double radix = 2.0, sqrdx = radix * radix;
  bool done = false;
  int sweeps = 0;
  while (!done && sweeps++ < 100) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(A(j, i));
        r += std::fabs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        kern::scale(g, A.row(i), static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) A(j, i) *= f;
      }
    }
  }
}

void hessenberg(DenseMatrix& A) {
  const int n = A.rows;
  std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int k = 0; k + 2 < n; ++k) {
    const int len = n - k - 1;
    double alpha = 0.0;
    for (int i = 0; i < len; ++i) {
      v[i] = A(k + 1 + i, k);
      alpha += v[i] * v[i];
    }
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (v[0] > 0) alpha = -alpha;
    v[0] -= alpha;
    const double vv = kern::dot(v.data(), v.data(), static_cast<std::size_t>(len));
    if (vv == 0.0) continue;
    const double beta = 2.0 / vv;
    // Left: rows k+1.. of A -= beta v (v^T A).
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < len; ++i) kern::axpy(v[i], A.row(k + 1 + i) + k, w.data() + k, static_cast<std::size_t>(n - k));
    for (int i = 0; i < len; ++i)
      kern::axpy(-beta * v[i], w.data() + k, A.row(k + 1 + i) + k, static_cast<std::size_t>(n - k));
    // Right: columns k+1.. of A -= beta (A v) v^T.
    for (int i = 0; i < n; ++i) {
      double* r = A.row(i) + k + 1;
      const double s = kern::dot(r, v.data(), static_cast<std::size_t>(len));
      kern::axpy(-beta * s, v.data(), r, static_cast<std::size_t>(len));
    }
    A(k + 1, k) = alpha;
    for (int i = k + 2; i < n; ++i) A(i, k) = 0.0;
  }
}

cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  // Eigenvalue of [[a, b], [c, d]] closer to d.
  const cplx tr_half = 0.5 * (a + d);
  const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  const cplx l1 = tr_half + disc, l2 = tr_half - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

std::vector<cplx> hessenberg_qr_eigenvalues(const DenseMatrix& A0) {
  if (A0.rows != A0.cols) fail(ErrorKind::InvalidArgument, "eigenvalues: matrix is not square");
  const int n = A0.rows;
  if (n > kMaxDim) fail(ErrorKind::Capacity, "eigenvalues: dimension exceeds 2048");
  for (double x : A0.a)
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "eigenvalues: non-finite entry");
  std::vector<cplx> eig(static_cast<std::size_t>(n));
  if (n == 0) return eig;
  DenseMatrix A = A0;
  balance(A);
  hessenberg(A);

  std::vector<cplx> H(static_cast<std::size_t>(n) * n);
  double hnorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      H[static_cast<std::size_t>(i) * n + j] = A(i, j);
      hnorm += A(i, j) * A(i, j);
    }
  hnorm = std::sqrt(hnorm);
  auto h = [&](int i, int j) -> cplx& { return H[static_cast<std::size_t>(i) * n + j]; };
  const double eps = std::numeric_limits<double>::epsilon();
  const double abs_tol = eps * hnorm;

  std::vector<double> cs(static_cast<std::size_t>(n));
  std::vector<cplx> sn(static_cast<std::size_t>(n));
  int hi = n - 1;
  long total = 0;
  const long limit = 100L * n;
  int its = 0;
  while (hi >= 0) {
    if (hi == 0) {
      eig[0] = h(0, 0);
      break;
    }
    int l = hi;
    for (; l > 0; --l) {
      const double sub = std::abs(h(l, l - 1));
      const double diag = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (sub <= eps * diag || sub <= abs_tol) {
        h(l, l - 1) = 0.0;
        break;
      }
    }
    if (l == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      its = 0;
      continue;
    }
    if (++total > limit)
      fail(ErrorKind::NumericFailure, "QR iteration did not converge after " + std::to_string(limit) + " sweeps");
    ++its;
    cplx mu;
    if (its % 11 == 0) {
      const double e = std::abs(h(hi, hi - 1));
      mu = h(hi, hi) + cplx(0.75 * e, 0.4 * e);
    } else {
      mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }
    for (int k = l; k <= hi; ++k) h(k, k) -= mu;
    for (int k = l; k < hi; ++k) {
      const cplx a = h(k, k), b = h(k + 1, k);
      const double aa = std::abs(a), r = std::hypot(aa, std::abs(b));
      double c;
      cplx s;
      if (r == 0.0) {
        c = 1.0;
        s = 0.0;
      } else if (aa == 0.0) {
        c = 0.0;
        s = std::conj(b) / std::abs(b);
      } else {
        c = aa / r;
        s = (a / aa) * std::conj(b) / r;
      }
      cs[k] = c;
      sn[k] = s;
      for (int j = k; j <= hi; ++j) {
        const cplx x = h(k, j), y = h(k + 1, j);
        h(k, j) = c * x + s * y;
        h(k + 1, j) = -std::conj(s) * x + c * y;
      }
    }
    for (int k = l; k < hi; ++k) {
      const double c = cs[k];
      const cplx s = sn[k];
      const int top = std::min(k + 2, hi);
      for (int i = l; i <= top; ++i) {
        const cplx x = h(i, k), y = h(i, k + 1);
        h(i, k) = x * c + y * std::conj(s);
        h(i, k + 1) = -x * s + y * c;
      }
    }
    for (int k = l; k <= hi; ++k) h(k, k) += mu;
  }
  return eig;
}

ComplexLU::ComplexLU(const DenseMatrix& A, cplx shift) : n_(A.rows) {
  if (A.rows != A.cols) fail(ErrorKind::InvalidArgument, "LU: matrix is not square");
  const int n = n_;
  lu_.resize(static_cast<std::size_t>(n) * n);
  piv_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lu_[static_cast<std::size_t>(i) * n + j] = A(i, j) - (i == j ? shift : cplx(0.0));
  auto m = [&](int i, int j) -> cplx& { return lu_[static_cast<std::size_t>(i) * n + j]; };
  min_pivot_ = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > best) best = std::abs(m(i, k)), p = i;
    piv_[k] = p;
    min_pivot_ = std::min(min_pivot_, best);
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
    const cplx d = m(k, k);
    for (int i = k + 1; i < n; ++i) {
      const cplx f = m(i, k) / d;
      m(i, k) = f;
      if (f == cplx(0.0)) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  if (n == 0) min_pivot_ = 0.0;
}

void ComplexLU::solve(std::vector<cplx>& x) const {
  const int n = n_;
  if (singular_) fail(ErrorKind::NumericFailure, "LU solve: singular matrix");
  auto m = [&](int i, int j) { return lu_[static_cast<std::size_t>(i) * n + j]; };
  for (int k = 0; k < n; ++k)
    if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) x[i] -= m(i, k) * x[k];
  for (int i = n - 1; i >= 0; --i) {
    cplx s = x[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
}

}  // namespace cdde

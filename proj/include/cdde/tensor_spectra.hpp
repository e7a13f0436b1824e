// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace cdde {

using cplx = std::complex<double>;

// Row-major real matrix.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }

  static DenseMatrix identity(int n);
  static DenseMatrix diag(const std::vector<double>& d);
};

inline constexpr int kMaxDim = 2048;

double frobenius(const DenseMatrix& A);
double norm_inf(const DenseMatrix& A);
DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix sub(const DenseMatrix& A, const DenseMatrix& B);

struct ComplexSpectrum {
  // Clustered eigenvalues with algebraic multiplicity, ordered by descending
  // modulus, then real part, then imaginary part.
  std::vector<std::pair<cplx, int>> eigenvalues;
  // Every computed eigenvalue in the same order (length = dimension).
  std::vector<cplx> expanded;
  double max_residual = 0.0;   // largest singular-value proxy of A - lambda I, over ||A||
  bool residual_checked = false;
  bool residual_ok = true;
  bool conjugate_pairs_ok = true;

  std::size_t total_multiplicity() const;
  int multiplicity_of(cplx z, double tol) const;
};

// Ordering used by ComplexSpectrum.
bool spectral_before(const cplx& a, const cplx& b);

ComplexSpectrum eigenvalues(const DenseMatrix& A);

// Raw eigenvalues of a real matrix: balancing, Householder Hessenberg
// reduction and complex shifted QR. Unordered.
std::vector<cplx> hessenberg_qr_eigenvalues(const DenseMatrix& A);

DenseMatrix kron(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix antisymmetrizer(int n, int m);
DenseMatrix compound_matrix(const DenseMatrix& A, int m);

// Lexicographic m-subsets of {0..n-1}.
std::vector<std::vector<int>> ordered_subsets(int n, int m);

// One spectrum: multiplicity of lambda0 in the m-th exterior power. m spectra:
// multiplicity of lambda0 in the tensor product of the factors.
std::uint64_t predicted_wedge_multiplicity(const std::vector<std::vector<std::pair<cplx, int>>>& factor_spectra,
                                           cplx lambda0, int m, double tol = 1e-9);

// Greedy nearest matching of two multisets of equal size; returns the largest
// matched distance.
double greedy_match_error(std::vector<cplx> a, std::vector<cplx> b);

// Numerical rank by Gaussian elimination with complete pivoting.
int numeric_rank(const DenseMatrix& A, double tol);

// LU factorization of A - shift I in complex arithmetic with partial pivoting.
class ComplexLU {
 public:
  ComplexLU(const DenseMatrix& A, cplx shift);
  int dim() const { return n_; }
  double min_pivot() const { return min_pivot_; }
  bool singular() const { return singular_; }
  // Solves in place; requires !singular().
  void solve(std::vector<cplx>& x) const;

 private:
  int n_;
  std::vector<cplx> lu_;
  std::vector<int> piv_;
  double min_pivot_ = 0.0;
  bool singular_ = false;
};

}  // namespace cdde

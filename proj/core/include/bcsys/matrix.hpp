#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "bcsys/errors.hpp"

namespace bcsys {

using cxd = std::complex<double>;

// Relative singular-value threshold below which a square matrix is treated
// as singular everywhere in the library (sigma_min/sigma_max <= threshold).
inline constexpr double kInvertibilityThreshold = 1e-10;

// Dense complex matrix, row-major. Small sizes only (boundary matrices,
// trace transforms, transfer-function values); the banded solver handles
// everything grid-sized.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);  // zero-initialized
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cxd> entries);
  CMatrix(std::initializer_list<std::initializer_list<cxd>> rows);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  cxd& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  cxd operator()(std::size_t i, std::size_t j) const {
    return e_[i * cols_ + j];
  }

  CMatrix transpose() const;
  CMatrix adjoint() const;
  CMatrix block(std::size_t i0, std::size_t j0, std::size_t r,
                std::size_t c) const;
  void set_block(std::size_t i0, std::size_t j0, const CMatrix& b);

  double max_abs() const;
  double frobenius_norm() const;
  double inf_norm() const;  // max row sum of absolute values

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(cxd s);

  static CMatrix hstack(const CMatrix& a, const CMatrix& b);
  static CMatrix vstack(const CMatrix& a, const CMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cxd> e_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(const CMatrix& a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cxd s, CMatrix a);
CMatrix operator*(CMatrix a, cxd s);
std::vector<cxd> operator*(const CMatrix& a, const std::vector<cxd>& x);

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol);

// X with A*X = B via partially pivoted elimination. Throws
// SingularMatrixError when a pivot falls below threshold.
CMatrix solve_linear(const CMatrix& a, const CMatrix& b);

// A^{-1} via solve_linear against the identity.
CMatrix inverse(const CMatrix& a);

// Real eigenvalues of a Hermitian matrix, nondecreasing, via cyclic Jacobi
// on the symmetrized input. Throws NotHermitianError when the asymmetry
// defect exceeds tolerance.
std::vector<double> hermitian_eigenvalues(const CMatrix& a);

// Largest singular value.
double operator_norm(const CMatrix& a);

// Smallest singular value (of min(rows, cols) singular values).
double smallest_singular_value(const CMatrix& a);

// sigma_min/sigma_max > kInvertibilityThreshold for a square matrix.
bool is_invertible(const CMatrix& a);

// exp(A) by scaling-and-squaring with a truncated-series kernel.
CMatrix matrix_exponential(const CMatrix& a);

}  // namespace bcsys

#include "bcsys/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bcsys {

namespace {

bool finite(cxd v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

void require_finite(const std::vector<cxd>& entries) {
  for (cxd v : entries) {
    if (!finite(v)) {
      throw DimensionError("matrix entries must be finite (no NaN/Inf)");
    }
  }
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), e_(rows * cols, cxd(0.0, 0.0)) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cxd> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
  if (e_.size() != rows_ * cols_) {
    throw DimensionError("entry count does not match rows*cols");
  }
  require_finite(e_);
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cxd>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  e_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionError("ragged initializer for CMatrix");
    }
    e_.insert(e_.end(), r.begin(), r.end());
  }
  require_finite(e_);
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::transpose() const {
  CMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

CMatrix CMatrix::block(std::size_t i0, std::size_t j0, std::size_t r,
                       std::size_t c) const {
  if (i0 + r > rows_ || j0 + c > cols_) {
    throw DimensionError("block extends past matrix bounds");
  }
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
  return m;
}

void CMatrix::set_block(std::size_t i0, std::size_t j0, const CMatrix& b) {
  if (i0 + b.rows() > rows_ || j0 + b.cols() > cols_) {
    throw DimensionError("block extends past matrix bounds");
  }
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      (*this)(i0 + i, j0 + j) = b(i, j);
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (cxd v : e_) m = std::max(m, std::abs(v));
  return m;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (cxd v : e_) s += std::norm(v);
  return std::sqrt(s);
}

double CMatrix::inf_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    m = std::max(m, s);
  }
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw DimensionError("shape mismatch in matrix addition");
  }
  for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += rhs.e_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw DimensionError("shape mismatch in matrix subtraction");
  }
  for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= rhs.e_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cxd s) {
  for (auto& v : e_) v *= s;
  return *this;
}

CMatrix CMatrix::hstack(const CMatrix& a, const CMatrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.rows() != b.rows()) throw DimensionError("hstack row mismatch");
  CMatrix m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

CMatrix CMatrix::vstack(const CMatrix& a, const CMatrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.cols() != b.cols()) throw DimensionError("vstack column mismatch");
  CMatrix m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator-(const CMatrix& a) {
  CMatrix m = a;
  return m *= cxd(-1.0, 0.0);
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
  CMatrix m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      cxd aik = a(i, k);
      if (aik == cxd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
    }
  }
  return m;
}

CMatrix operator*(cxd s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cxd s) { return a *= s; }

std::vector<cxd> operator*(const CMatrix& a, const std::vector<cxd>& x) {
  if (a.cols() != x.size()) throw DimensionError("matvec shape mismatch");
  std::vector<cxd> y(a.rows(), cxd(0.0, 0.0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cxd s(0.0, 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).max_abs() <= tol;
}

CMatrix solve_linear(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols()) throw DimensionError("solve_linear needs square A");
  if (b.rows() != a.rows()) throw DimensionError("rhs row count mismatch");
  const std::size_t n = a.rows();
  const std::size_t k = b.cols();
  CMatrix lu = a;
  CMatrix x = b;
  const double pivot_floor = 1e-14 * std::max(1e-300, a.max_abs());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    double best = std::abs(lu(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      double v = std::abs(lu(i, col));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best <= pivot_floor) {
      throw SingularMatrixError("pivot below threshold at column " +
                                std::to_string(col));
    }
    if (p != col) {
      for (std::size_t j = col; j < n; ++j) std::swap(lu(col, j), lu(p, j));
      for (std::size_t j = 0; j < k; ++j) std::swap(x(col, j), x(p, j));
    }
    const cxd piv = lu(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const cxd f = lu(i, col) / piv;
      if (f == cxd(0.0, 0.0)) continue;
      lu(i, col) = cxd(0.0, 0.0);
      for (std::size_t j = col + 1; j < n; ++j) lu(i, j) -= f * lu(col, j);
      for (std::size_t j = 0; j < k; ++j) x(i, j) -= f * x(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    const cxd piv = lu(col, col);
    for (std::size_t j = 0; j < k; ++j) {
      cxd s = x(col, j);
      for (std::size_t m = col + 1; m < n; ++m) s -= lu(col, m) * x(m, j);
      x(col, j) = s / piv;
    }
  }
  return x;
}

CMatrix inverse(const CMatrix& a) {
  return solve_linear(a, CMatrix::identity(a.rows()));
}

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("hermitian_eigenvalues needs a square matrix");
  }
  const std::size_t n = a.rows();
  const double scale = std::max(1.0, a.max_abs());
  if ((a - a.adjoint()).max_abs() > 1e-9 * scale) {
    throw NotHermitianError("asymmetry defect exceeds tolerance");
  }
  CMatrix m = a + a.adjoint();
  m *= cxd(0.5, 0.0);

  const double fro = std::max(m.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(m(p, q));
    if (std::sqrt(off) <= 1e-15 * fro) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cxd apq = m(p, q);
        const double abpq = std::abs(apq);
        if (abpq <= 1e-18 * fro) continue;
        // Unitary U = diag-phase * real Jacobi rotation annihilating (p,q).
        const cxd phase = apq / abpq;
        const double app = m(p, p).real();
        const double aqq = m(q, q).real();
        const double tau = (aqq - app) / (2.0 * abpq);
        double t;
        if (tau >= 0.0) {
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cxd upp = c;
        const cxd upq = s;
        const cxd uqp = -s * std::conj(phase);
        const cxd uqq = c * std::conj(phase);
        for (std::size_t i = 0; i < n; ++i) {  // columns: M <- M U
          const cxd mip = m(i, p), miq = m(i, q);
          m(i, p) = mip * upp + miq * uqp;
          m(i, q) = mip * upq + miq * uqq;
        }
        for (std::size_t j = 0; j < n; ++j) {  // rows: M <- U^H M
          const cxd mpj = m(p, j), mqj = m(q, j);
          m(p, j) = std::conj(upp) * mpj + std::conj(uqp) * mqj;
          m(q, j) = std::conj(upq) * mpj + std::conj(uqq) * mqj;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {

// Eigenvalues of the smaller Gram matrix (A^H A or A A^H); the squared
// singular values of A.
std::vector<double> gram_eigenvalues(const CMatrix& a) {
  const CMatrix g =
      a.rows() >= a.cols() ? a.adjoint() * a : a * a.adjoint();
  return hermitian_eigenvalues(g);
}

}  // namespace

double operator_norm(const CMatrix& a) {
  if (a.empty()) return 0.0;
  const auto ev = gram_eigenvalues(a);
  return std::sqrt(std::max(0.0, ev.back()));
}

double smallest_singular_value(const CMatrix& a) {
  if (a.empty()) return 0.0;
  const auto ev = gram_eigenvalues(a);
  return std::sqrt(std::max(0.0, ev.front()));
}

bool is_invertible(const CMatrix& a) {
  if (a.rows() != a.cols() || a.empty()) return false;
  const auto ev = gram_eigenvalues(a);
  const double smax = std::sqrt(std::max(0.0, ev.back()));
  const double smin = std::sqrt(std::max(0.0, ev.front()));
  return smax > 0.0 && smin / smax > kInvertibilityThreshold;
}

CMatrix matrix_exponential(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("matrix_exponential needs a square matrix");
  }
  const std::size_t n = a.rows();
  const double nrm = a.inf_norm();
  int squarings = 0;
  double scale = 1.0;
  while (nrm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  CMatrix b = a;
  b *= cxd(scale, 0.0);
  CMatrix result = CMatrix::identity(n);
  CMatrix term = CMatrix::identity(n);
  for (int j = 1; j <= 30; ++j) {
    term = term * b;
    term *= cxd(1.0 / j, 0.0);
    result += term;
    if (term.max_abs() <= 1e-20 * std::max(1.0, result.max_abs())) break;
  }
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

}  // namespace bcsys

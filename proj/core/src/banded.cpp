#include "bcsys/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcsys/errors.hpp"

namespace bcsys {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(n * (2 * kl + ku + 1), cxd(0.0, 0.0)) {}

void BandedMatrix::add(std::size_t i, std::size_t j, cxd v) {
  if (i >= n_ || j >= n_ || (i > j && i - j > kl_) || (j > i && j - i > ku_)) {
    throw DimensionError("banded entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") outside band");
  }
  ref(i, j) += v;
}

void BandedMatrix::set(std::size_t i, std::size_t j, cxd v) {
  if (i >= n_ || j >= n_ || (i > j && i - j > kl_) || (j > i && j - i > ku_)) {
    throw DimensionError("banded entry outside band");
  }
  ref(i, j) = v;
}

cxd BandedMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || (i > j && i - j > kl_) || (j > i && j - i > ku_)) {
    return cxd(0.0, 0.0);
  }
  return val(i, j);
}

std::vector<cxd> BandedMatrix::apply(const std::vector<cxd>& x) const {
  if (x.size() != n_) throw DimensionError("banded matvec size mismatch");
  std::vector<cxd> y(n_, cxd(0.0, 0.0));
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    cxd s(0.0, 0.0);
    for (std::size_t j = j0; j <= j1; ++j) s += val(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<cxd> BandedMatrix::apply_adjoint(const std::vector<cxd>& x) const {
  if (x.size() != n_) throw DimensionError("banded matvec size mismatch");
  std::vector<cxd> y(n_, cxd(0.0, 0.0));
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j > ku_ ? j - ku_ : 0;
    const std::size_t i1 = std::min(n_ - 1, j + kl_);
    cxd s(0.0, 0.0);
    for (std::size_t i = i0; i <= i1; ++i) s += std::conj(val(i, j)) * x[i];
    y[j] = s;
  }
  return y;
}

BandedLU::BandedLU(BandedMatrix m) : m_(std::move(m)), piv_(m_.n_) {
  const std::size_t n = m_.n_;
  const std::size_t kl = m_.kl_;
  const std::size_t ku = m_.ku_;
  double amax = 0.0;
  for (const cxd& v : m_.ab_) amax = std::max(amax, std::abs(v));
  const double floor = 1e-16 * std::max(amax, 1e-300);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t ilast = std::min(n - 1, j + kl);
    std::size_t p = j;
    double best = std::abs(m_.val(j, j));
    for (std::size_t i = j + 1; i <= ilast; ++i) {
      const double v = std::abs(m_.val(i, j));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[j] = p;
    if (best <= floor) {
      singular_ = true;
      return;
    }
    const std::size_t klast = std::min(n - 1, j + kl + ku);
    if (p != j) {
      for (std::size_t k = j; k <= klast; ++k) {
        std::swap(m_.ref(j, k), m_.ref(p, k));
      }
    }
    const cxd piv = m_.val(j, j);
    for (std::size_t i = j + 1; i <= ilast; ++i) {
      const cxd l = m_.val(i, j) / piv;
      m_.ref(i, j) = l;
      if (l == cxd(0.0, 0.0)) continue;
      for (std::size_t k = j + 1; k <= klast; ++k) {
        m_.ref(i, k) -= l * m_.val(j, k);
      }
    }
  }
}

void BandedLU::solve_in_place(std::vector<cxd>& b) const {
  if (singular_) throw SingularMatrixError("banded factorization is singular");
  const std::size_t n = m_.n_;
  if (b.size() != n) throw DimensionError("rhs size mismatch");
  const std::size_t kl = m_.kl_;
  const std::size_t ku = m_.ku_;
  for (std::size_t j = 0; j < n; ++j) {
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const std::size_t ilast = std::min(n - 1, j + kl);
    for (std::size_t i = j + 1; i <= ilast; ++i) b[i] -= m_.val(i, j) * b[j];
  }
  for (std::size_t j = n; j-- > 0;) {
    b[j] /= m_.val(j, j);
    const std::size_t i0 = j > kl + ku ? j - kl - ku : 0;
    for (std::size_t i = i0; i < j; ++i) b[i] -= m_.val(i, j) * b[j];
  }
}

std::vector<cxd> BandedLU::solve(std::vector<cxd> b) const {
  solve_in_place(b);
  return b;
}

namespace {

BandedMatrix adjoint_of(const BandedMatrix& a) {
  BandedMatrix m(a.size(), a.upper(), a.lower());
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > a.lower() ? i - a.lower() : 0;
    const std::size_t j1 = std::min(n - 1, i + a.upper());
    for (std::size_t j = j0; j <= j1; ++j) {
      const cxd v = a.at(i, j);
      if (v != cxd(0.0, 0.0)) m.set(j, i, std::conj(v));
    }
  }
  return m;
}

double vec_norm(const std::vector<cxd>& x) {
  double s = 0.0;
  for (cxd v : x) s += std::norm(v);
  return std::sqrt(s);
}

void vec_scale(std::vector<cxd>& x, double f) {
  for (cxd& v : x) v *= f;
}

}  // namespace

BorderedSolver::BorderedSolver(BandedMatrix a,
                               std::vector<std::vector<cxd>> u_cols,
                               std::vector<std::vector<cxd>> v_rows)
    : n_(a.size()),
      r_(u_cols.size()),
      a_(a),
      lu_(a),
      lu_adj_(adjoint_of(a)),
      u_(std::move(u_cols)),
      v_(std::move(v_rows)) {
  if (v_.size() != r_) throw DimensionError("U/V rank mismatch");
  for (const auto& c : u_) {
    if (c.size() != n_) throw DimensionError("U column length mismatch");
  }
  for (const auto& r : v_) {
    if (r.size() != n_) throw DimensionError("V row length mismatch");
  }
  banded_singular_ = lu_.singular() || lu_adj_.singular();
  if (banded_singular_) return;
  z_.reserve(r_);
  zadj_.reserve(r_);
  for (std::size_t c = 0; c < r_; ++c) {
    z_.push_back(lu_.solve(u_[c]));
    std::vector<cxd> vh(n_);
    for (std::size_t k = 0; k < n_; ++k) vh[k] = std::conj(v_[c][k]);
    zadj_.push_back(lu_adj_.solve(vh));
  }
  CMatrix cap = CMatrix::identity(r_);
  for (std::size_t i = 0; i < r_; ++i) {
    for (std::size_t j = 0; j < r_; ++j) {
      cxd s(0.0, 0.0);
      for (std::size_t k = 0; k < n_; ++k) s += v_[i][k] * z_[j][k];
      cap(i, j) += s;
    }
  }
  cap_ = cap;
  if (r_ > 0) {
    try {
      capinv_ = inverse(cap_);
    } catch (const SingularMatrixError&) {
      cap_singular_ = true;
    }
  } else {
    capinv_ = CMatrix(0, 0);
  }
}

std::vector<cxd> BorderedSolver::solve(const std::vector<cxd>& b) const {
  if (singular()) throw SingularMatrixError("bordered system is singular");
  std::vector<cxd> x = lu_.solve(b);
  if (r_ == 0) return x;
  std::vector<cxd> w(r_, cxd(0.0, 0.0));
  for (std::size_t c = 0; c < r_; ++c) {
    cxd s(0.0, 0.0);
    for (std::size_t k = 0; k < n_; ++k) s += v_[c][k] * x[k];
    w[c] = s;
  }
  const std::vector<cxd> y = capinv_ * w;
  for (std::size_t c = 0; c < r_; ++c) {
    const cxd f = y[c];
    if (f == cxd(0.0, 0.0)) continue;
    for (std::size_t k = 0; k < n_; ++k) x[k] -= z_[c][k] * f;
  }
  return x;
}

std::vector<cxd> BorderedSolver::solve_adjoint(const std::vector<cxd>& b) const {
  if (singular()) throw SingularMatrixError("bordered system is singular");
  std::vector<cxd> x = lu_adj_.solve(b);
  if (r_ == 0) return x;
  std::vector<cxd> w(r_, cxd(0.0, 0.0));
  for (std::size_t c = 0; c < r_; ++c) {
    cxd s(0.0, 0.0);
    for (std::size_t k = 0; k < n_; ++k) s += std::conj(u_[c][k]) * x[k];
    w[c] = s;
  }
  const std::vector<cxd> y = capinv_.adjoint() * w;
  for (std::size_t c = 0; c < r_; ++c) {
    const cxd f = y[c];
    if (f == cxd(0.0, 0.0)) continue;
    for (std::size_t k = 0; k < n_; ++k) x[k] -= zadj_[c][k] * f;
  }
  return x;
}

std::vector<cxd> BorderedSolver::apply(const std::vector<cxd>& x) const {
  std::vector<cxd> y = a_.apply(x);
  for (std::size_t c = 0; c < r_; ++c) {
    cxd s(0.0, 0.0);
    for (std::size_t k = 0; k < n_; ++k) s += v_[c][k] * x[k];
    if (s == cxd(0.0, 0.0)) continue;
    for (std::size_t k = 0; k < n_; ++k) y[k] += u_[c][k] * s;
  }
  return y;
}

std::vector<cxd> BorderedSolver::apply_adjoint(const std::vector<cxd>& x) const {
  std::vector<cxd> y = a_.apply_adjoint(x);
  for (std::size_t c = 0; c < r_; ++c) {
    cxd s(0.0, 0.0);
    for (std::size_t k = 0; k < n_; ++k) s += std::conj(u_[c][k]) * x[k];
    if (s == cxd(0.0, 0.0)) continue;
    for (std::size_t k = 0; k < n_; ++k) y[k] += std::conj(v_[c][k]) * s;
  }
  return y;
}

double BorderedSolver::singular_value_ratio(int iterations) const {
  if (singular()) return 0.0;
  std::vector<cxd> v(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    v[i] = cxd(1.0 + 0.3 * std::sin(1.7 * static_cast<double>(i)),
               0.2 * std::cos(0.9 * static_cast<double>(i)));
  }
  vec_scale(v, 1.0 / vec_norm(v));
  double smax2 = 0.0;
  std::vector<cxd> w = v;
  for (int it = 0; it < iterations; ++it) {
    w = apply_adjoint(apply(w));
    const double nm = vec_norm(w);
    if (nm == 0.0) return 0.0;
    smax2 = nm;
    vec_scale(w, 1.0 / nm);
  }
  double inv2 = 0.0;
  w = v;
  for (int it = 0; it < iterations; ++it) {
    w = solve(solve_adjoint(w));
    const double nm = vec_norm(w);
    if (!std::isfinite(nm) || nm == 0.0) return 0.0;
    inv2 = nm;
    vec_scale(w, 1.0 / nm);
  }
  const double smax = std::sqrt(smax2);
  const double smin = 1.0 / std::sqrt(inv2);
  return smax > 0.0 ? smin / smax : 0.0;
}

}  // namespace bcsys

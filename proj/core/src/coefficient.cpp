#include "bcsys/coefficient.hpp"

#include <cmath>

#include "bcsys/errors.hpp"

namespace bcsys {

namespace {

void require_square_uniform(const std::vector<CMatrix>& ms) {
  if (ms.empty()) throw DimensionError("coefficient needs at least one matrix");
  const std::size_t n = ms.front().rows();
  for (const auto& m : ms) {
    if (m.rows() != n || m.cols() != n) {
      throw DimensionError("coefficient matrices must be square, same size");
    }
  }
}

}  // namespace

CoefficientFunction CoefficientFunction::constant(CMatrix value) {
  CoefficientFunction f;
  f.kind_ = Kind::Constant;
  f.coeffs_ = {std::move(value)};
  require_square_uniform(f.coeffs_);
  return f;
}

CoefficientFunction CoefficientFunction::polynomial(std::vector<CMatrix> coeffs) {
  CoefficientFunction f;
  f.kind_ = Kind::Polynomial;
  f.coeffs_ = std::move(coeffs);
  require_square_uniform(f.coeffs_);
  return f;
}

CoefficientFunction CoefficientFunction::piecewise_constant(
    std::vector<CMatrix> pieces, std::vector<double> breakpoints) {
  CoefficientFunction f;
  f.kind_ = Kind::PiecewiseConstant;
  f.coeffs_ = std::move(pieces);
  f.breaks_ = std::move(breakpoints);
  require_square_uniform(f.coeffs_);
  if (f.breaks_.size() + 1 != f.coeffs_.size()) {
    throw DimensionError("piecewise coefficient needs one more piece than breakpoints");
  }
  double prev = 0.0;
  for (double b : f.breaks_) {
    if (!(b > prev && b < 1.0)) {
      throw DimensionError("breakpoints must be strictly increasing inside (0,1)");
    }
    prev = b;
  }
  return f;
}

std::size_t CoefficientFunction::dim() const {
  return coeffs_.empty() ? 0 : coeffs_.front().rows();
}

CMatrix CoefficientFunction::eval(double zeta) const {
  switch (kind_) {
    case Kind::Constant:
      return coeffs_.front();
    case Kind::Polynomial: {
      CMatrix acc = coeffs_.back();
      for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
        acc = acc * cxd(zeta, 0.0) + coeffs_[k];
      }
      return acc;
    }
    case Kind::PiecewiseConstant: {
      std::size_t idx = 0;
      while (idx < breaks_.size() && zeta >= breaks_[idx]) ++idx;
      return coeffs_[idx];
    }
  }
  throw Error("unreachable coefficient kind");
}

CoefficientFunction CoefficientFunction::negated() const {
  CoefficientFunction f = *this;
  for (auto& m : f.coeffs_) m *= cxd(-1.0, 0.0);
  return f;
}

CoefficientFunction CoefficientFunction::skew_part() const {
  CoefficientFunction f = *this;
  for (auto& m : f.coeffs_) {
    CMatrix s = m - m.adjoint();
    s *= cxd(0.5, 0.0);
    m = s;
  }
  return f;
}

bool CoefficientFunction::operator==(const CoefficientFunction& other) const {
  if (kind_ != other.kind_ || coeffs_.size() != other.coeffs_.size() ||
      breaks_ != other.breaks_) {
    return false;
  }
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k].rows() != other.coeffs_[k].rows() ||
        coeffs_[k].cols() != other.coeffs_[k].cols() ||
        !approx_equal(coeffs_[k], other.coeffs_[k], 0.0)) {
      return false;
    }
  }
  return true;
}

std::string to_string(CoefficientFunction::Kind k) {
  switch (k) {
    case CoefficientFunction::Kind::Constant: return "constant";
    case CoefficientFunction::Kind::Polynomial: return "polynomial";
    case CoefficientFunction::Kind::PiecewiseConstant: return "piecewise-constant";
  }
  return "?";
}

}  // namespace bcsys

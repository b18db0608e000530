#pragma once

#include <string>
#include <vector>

#include "bcsys/matrix.hpp"

namespace bcsys {

// Matrix-valued coefficient on [0,1]: constant, polynomial in the spatial
// variable, or piecewise constant with breakpoints inside (0,1).
class CoefficientFunction {
 public:
  enum class Kind { Constant, Polynomial, PiecewiseConstant };

  CoefficientFunction() = default;

  static CoefficientFunction constant(CMatrix value);
  // coeffs[k] multiplies zeta^k.
  static CoefficientFunction polynomial(std::vector<CMatrix> coeffs);
  // pieces[i] applies on [break[i-1], break[i]); breakpoints strictly
  // increasing, all inside (0,1).
  static CoefficientFunction piecewise_constant(std::vector<CMatrix> pieces,
                                                std::vector<double> breakpoints);

  Kind kind() const { return kind_; }
  std::size_t dim() const;  // matrix size n
  const std::vector<CMatrix>& coefficients() const { return coeffs_; }
  const std::vector<double>& breakpoints() const { return breaks_; }

  CMatrix eval(double zeta) const;
  bool is_constant() const { return kind_ == Kind::Constant; }

  // Negation of the coefficient (used for the dual system).
  CoefficientFunction negated() const;
  // Skew part (A - A^*)/2 applied piecewise to the representation.
  CoefficientFunction skew_part() const;

  bool operator==(const CoefficientFunction& other) const;

 private:
  Kind kind_ = Kind::Constant;
  std::vector<CMatrix> coeffs_;
  std::vector<double> breaks_;
};

std::string to_string(CoefficientFunction::Kind k);

}  // namespace bcsys

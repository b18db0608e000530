#pragma once

#include <optional>
#include <string>

#include "bcsys/matrix.hpp"
#include "bcsys/system_spec.hpp"

namespace bcsys {

// Derived boundary matrices of a spec: the trace transform T mapping
// tau(Hx) to the canonical boundary pair [u_e; y_e], its inverse, the
// (K, B, C) decomposition of the boundary rows over (u_e | y_e), and the
// ingredients of the passivity test.
struct BoundaryAlgebra {
  CMatrix T;     // 4n x 4n
  CMatrix Tinv;  // 4n x 4n
  CMatrix K1, K2;  // (2n - m) x 2n
  CMatrix B1, B2;  // m x 2n
  CMatrix C1, C2;  // m x 2n
  CMatrix R;       // 2n x 2n
  CMatrix Sigma;   // 4n x 4n block antidiagonal identity
  CMatrix WtB;     // 2n x 4n (only when m = 2n)
  CMatrix WtC;     // m x 4n
};

// Builds T and Tinv. With tau ordered (h(1), h'(1), h(0), h'(0)):
//   u_e = (1/sqrt2) [P2 h'(1) + P1 h(1)/2 ; P2 h'(0) + P1 h(0)/2]
//   y_e = (1/sqrt2) [h(1) ; -h(0)]
// Throws SingularP2Error if P2 is not invertible (defensive).
BoundaryAlgebra trace_transform(const SystemSpec& spec);

// Populates K1..C2 via [K1 K2] = WB2 Tinv, [B1 B2] = WB1 Tinv,
// [C1 C2] = WC Tinv (column split 2n | 2n into u_e / y_e coefficients).
BoundaryAlgebra decompose_boundary(const SystemSpec& spec);

enum class Passivity { EnergyPreserving, Passive, NotPassive, NotApplicable };

std::string to_string(Passivity p);

struct PassivityResult {
  Passivity status = Passivity::NotApplicable;
  // Largest |eigenvalue| of Sigma - M^{-1} for the EnergyPreserving verdict,
  // most negative eigenvalue magnitude for Passive/NotPassive.
  double eigen_defect = 0.0;
  std::string diagnostic;
};

// Matrix passivity test. Requires m = 2n and P0 skew-adjoint; returns
// NotApplicable otherwise. Builds WtB = [WB1; WB2] [[R, I], [-R, I]],
// WtC = WC [[R, I], [-R, I]], M = [WtB; WtC] Sigma [WtB; WtC]^* and tests
// Sigma - M^{-1}. When M is singular the direct energy-preserving
// characterization WtB Sigma WtB^* = 0 decides instead, with a diagnostic.
PassivityResult passivity_check(const SystemSpec& spec);

enum class WellPosedness { WellPosed, NotWellPosed, SufficientConditionFails };

std::string to_string(WellPosedness v);

struct WellPosednessReport {
  WellPosedness verdict = WellPosedness::SufficientConditionFails;
  std::string criterion;        // "B1-iff" (m = 2n) or "K1B1-sufficient"
  double sigma_min = 0.0;       // of the tested matrix
  double sigma_ratio = 0.0;     // sigma_min / sigma_max of the tested matrix
  std::optional<CMatrix> feedthrough;  // C1 B1^{-1} when B1 is invertible
  Passivity passivity = Passivity::NotApplicable;
  double passivity_defect = 0.0;
  bool regular = false;
  std::string regular_reason;
  bool q_submatrix_agrees = true;  // cross-check of the equivalent criterion
};

// m = 2n: WellPosed iff B1 invertible (NotWellPosed otherwise);
// m < 2n: [K1; B1] invertible => WellPosed, else SufficientConditionFails.
// Cross-checks the equivalent criterion on the h'(1)/h'(0) column blocks of
// the stacked boundary matrix.
WellPosednessReport wellposedness_verdict(const SystemSpec& spec);

std::string format_report(const SystemSpec& spec,
                          const WellPosednessReport& report);

struct SVDecomposition {
  CMatrix S;  // 2n x 2n invertible
  CMatrix V;  // 2n x 2n
  bool contraction = false;   // VV^* <= I (within tolerance)
  double min_eig_I_minus_VVs = 0.0;
};

// W = S [I+V, I-V] with S = (W_L + W_R)/2 and V = S^{-1} W_L - I.
// Throws SingularSError when (W_L + W_R)/2 is not invertible.
SVDecomposition decompose_SV(const CMatrix& w);

// Dual system: coefficients (-P2, -P1, -P0, same H); input matrix
// [I - V^*, -I - V^*] [[R^{-1}, -R^{-1}], [I, I]] on tau(Hx) with V from
// the S-V factorization of WtB; output matrix WC. Requires m = 2n
// (NotApplicableError otherwise) and an invertible S (SingularSError).
SystemSpec dual_system(const SystemSpec& spec);

// Canonical full-boundary system with the same coefficients: input rows are
// the u_e rows of T (m = 2n, no algebraic constraints), output rows the
// y_e rows. Energy preserving whenever P0 is skew-adjoint.
SystemSpec extended_spec(const SystemSpec& spec);

}  // namespace bcsys

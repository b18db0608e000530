#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bcsys/boundary_algebra.hpp"
#include "common.hpp"

using namespace bcsys;
using namespace bcsys::testing;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Per-row comparison up to sign: boundary rows are only determined up to a
// nonzero row scaling by the conditions they encode.
double rowwise_sign_defect(const CMatrix& a, const CMatrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double plus = 0.0, minus = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      plus = std::max(plus, std::abs(a(i, j) - b(i, j)));
      minus = std::max(minus, std::abs(a(i, j) + b(i, j)));
    }
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

}  // namespace

TEST_CASE("trace transform: scalar Schroedinger by hand") {
  SystemSpec s = schrodinger_derivative();
  BoundaryAlgebra ba = trace_transform(s);
  // u_e = (1/sqrt2)(i h'(1), i h'(0)), y_e = (1/sqrt2)(h(1), -h(0)).
  CMatrix expected{{cxd(0, 0), cxd(0, 1 / kSqrt2), cxd(0, 0), cxd(0, 0)},
                   {cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 1 / kSqrt2)},
                   {cxd(1 / kSqrt2, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)},
                   {cxd(0, 0), cxd(0, 0), cxd(-1 / kSqrt2, 0), cxd(0, 0)}};
  CHECK((ba.T - expected).max_abs() < 1e-14);
  CHECK(std::abs(ba.Tinv(1, 0) - cxd(0, -kSqrt2)) < 1e-13);
  CHECK((ba.T * ba.Tinv - CMatrix::identity(4)).max_abs() < 1e-12);
}

TEST_CASE("trace transform: T is invertible and consistent on random specs") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 1 + rng() % 3;
    SystemSpec s = random_spec(rng, n, 2 * n);
    BoundaryAlgebra ba = trace_transform(s);
    CHECK((ba.T * ba.Tinv - CMatrix::identity(4 * n)).max_abs() < 1e-9);
    CHECK((ba.Tinv * ba.T - CMatrix::identity(4 * n)).max_abs() < 1e-9);
  }
}

TEST_CASE("trace transform rejects singular P2") {
  SystemSpec s = schrodinger_derivative();
  s.P2 = CMatrix{{cxd(0, 0)}};
  CHECK_THROWS_AS(trace_transform(s), SingularP2Error);
}

TEST_CASE("string fixture decomposes to the expected boundary matrices") {
  BoundaryAlgebra ba = decompose_boundary(beam_viscous());
  CMatrix stacked = CMatrix::vstack(ba.K1, ba.B1);
  CMatrix expected{{cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0)},
                   {cxd(0, 0), cxd(1, 0), cxd(0, 0), cxd(0, 0)},
                   {cxd(0, 0), cxd(0, 0), cxd(-1, 0), cxd(0, 0)},
                   {cxd(-1, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)}};
  expected *= cxd(kSqrt2, 0);
  CHECK((stacked - expected).max_abs() < 1e-12);
}

TEST_CASE("string-with-bar fixture matches up to row signs") {
  BoundaryAlgebra ba = decompose_boundary(beam_elastic());
  CMatrix stacked = CMatrix::vstack(ba.K1, ba.B1);
  CMatrix expected{
      {cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, -1)},
      {cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0), cxd(0, 0)},
      {cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0), cxd(0, 0), cxd(0, 0)},
      {cxd(0, 0), cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)},
      {cxd(0, 0), cxd(0, 0), cxd(0, -1), cxd(0, 0), cxd(0, 0), cxd(0, 0)},
      {cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)}};
  expected *= cxd(kSqrt2, 0);
  CHECK(rowwise_sign_defect(stacked, expected) < 1e-12);
}

TEST_CASE("Schroedinger decomposition: derivative input, position output") {
  BoundaryAlgebra ba = decompose_boundary(schrodinger_derivative());
  CMatrix b1exp = CMatrix::identity(2);
  b1exp *= cxd(0, -kSqrt2);
  CHECK((ba.B1 - b1exp).max_abs() < 1e-13);
  CHECK(ba.B2.max_abs() < 1e-13);
  CHECK(ba.C1.max_abs() < 1e-13);
  CMatrix c2exp = CMatrix::identity(2);
  c2exp *= cxd(kSqrt2, 0);
  CHECK((ba.C2 - c2exp).max_abs() < 1e-13);
}

TEST_CASE("decomposition reconstructs the boundary rows") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng() % 3;
    std::size_t m = 1 + rng() % (2 * n);
    SystemSpec s = random_spec(rng, n, m);
    BoundaryAlgebra ba = decompose_boundary(s);
    CMatrix kb = CMatrix::vstack(CMatrix::hstack(ba.K1, ba.K2),
                                 CMatrix::hstack(ba.B1, ba.B2));
    CMatrix all = CMatrix::vstack(kb, CMatrix::hstack(ba.C1, ba.C2));
    CMatrix rows = CMatrix::vstack(CMatrix::vstack(s.WB2, s.WB1), s.WC);
    CHECK((all * ba.T - rows).max_abs() < 1e-9);
  }
}

TEST_CASE("well-posedness verdicts on the fixtures") {
  WellPosednessReport r = wellposedness_verdict(beam_viscous());
  CHECK(r.verdict == WellPosedness::WellPosed);
  CHECK(r.criterion == "K1B1-sufficient");
  CHECK(r.q_submatrix_agrees);

  r = wellposedness_verdict(schrodinger_derivative());
  CHECK(r.verdict == WellPosedness::WellPosed);
  CHECK(r.criterion == "B1-iff");
  REQUIRE(r.feedthrough.has_value());
  CHECK(r.feedthrough->max_abs() < 1e-12);  // C1 = 0 here

  r = wellposedness_verdict(schrodinger_position());
  CHECK(r.verdict == WellPosedness::NotWellPosed);
  CHECK(r.q_submatrix_agrees);
  CHECK_FALSE(r.feedthrough.has_value());
}

TEST_CASE("verdict is invariant under invertible recombination of rows") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 1 + rng() % 3;
    SystemSpec s = random_spec(rng, n, 2 * n);
    WellPosednessReport before = wellposedness_verdict(s);
    CMatrix g = random_full_row_rank(rng, 2 * n, 2 * n);
    s.WB1 = g * s.WB1;
    WellPosednessReport after = wellposedness_verdict(s);
    CHECK(before.verdict == after.verdict);
  }
}

TEST_CASE("column-block cross-check agrees on random specs") {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng() % 3;
    std::size_t m = 1 + rng() % (2 * n);
    SystemSpec s = random_spec(rng, n, m);
    WellPosednessReport r = wellposedness_verdict(s);
    CHECK(r.q_submatrix_agrees);
  }
}

TEST_CASE("passivity classification") {
  // Full-boundary canonical system: exactly energy preserving.
  SystemSpec ext = extended_spec(schrodinger_derivative());
  PassivityResult p = passivity_check(ext);
  CHECK(p.status == Passivity::EnergyPreserving);
  CHECK(p.eigen_defect < 1e-10);

  // Reversing the sign of the output breaks the supply balance.
  SystemSpec anti = ext;
  anti.WC = -ext.WC;
  p = passivity_check(anti);
  CHECK(p.status == Passivity::NotPassive);

  // m < 2n: the matrix test does not apply.
  p = passivity_check(beam_viscous());
  CHECK(p.status == Passivity::NotApplicable);

  // P0 not skew-adjoint: not applicable either.
  std::mt19937 rng(45);
  SystemSpec s = random_spec(rng, 2, 4, /*skew_p0=*/false);
  p = passivity_check(s);
  CHECK(p.status == Passivity::NotApplicable);
}

TEST_CASE("S-V factorization: hand cases") {
  CMatrix i2 = CMatrix::identity(2);
  SVDecomposition d = decompose_SV(CMatrix::hstack(i2, i2));
  CHECK((d.S - i2).max_abs() < 1e-14);
  CHECK(d.V.max_abs() < 1e-14);
  CHECK(d.contraction);

  CMatrix two = i2;
  two *= cxd(2, 0);
  d = decompose_SV(CMatrix::hstack(two, CMatrix(2, 2)));
  CHECK((d.S - i2).max_abs() < 1e-14);
  CHECK((d.V - i2).max_abs() < 1e-14);
  CHECK(d.contraction);

  CHECK_THROWS_AS(decompose_SV(CMatrix::hstack(i2, -i2)), SingularSError);
}

TEST_CASE("S-V factorization: random round trips") {
  std::mt19937 rng(46);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t k = 1 + rng() % 4;
    CMatrix s0 = random_full_row_rank(rng, k, k);
    CMatrix v0 = random_matrix(rng, k, k);
    CMatrix ik = CMatrix::identity(k);
    CMatrix w = CMatrix::hstack(s0 * (ik + v0), s0 * (ik - v0));
    SVDecomposition d = decompose_SV(w);
    CHECK((d.S - s0).max_abs() < 1e-10 * (1.0 + s0.max_abs()));
    CHECK((d.V - v0).max_abs() < 1e-9 * (1.0 + v0.max_abs()));
    // Contraction flag consistent with the spectrum of I - VV^*.
    CMatrix g = ik - d.V * d.V.adjoint();
    double lo = hermitian_eigenvalues(g).front();
    CHECK(d.contraction == (lo >= -1e-9));
    CHECK(d.min_eig_I_minus_VVs == doctest::Approx(lo).epsilon(1e-8));
  }
}

TEST_CASE("extended spec: canonical full-boundary system") {
  SystemSpec base = beam_viscous();
  SystemSpec ext = extended_spec(base);
  CHECK(ext.m == 2 * ext.n);
  CHECK(ext.WB2.rows() == 0);
  CHECK((ext.P2 - base.P2).max_abs() == 0.0);
  CHECK(validate(ext).passed);
  BoundaryAlgebra ba = decompose_boundary(ext);
  // Inputs are exactly u_e, outputs exactly y_e.
  CHECK((ba.B1 - CMatrix::identity(4)).max_abs() < 1e-10);
  CHECK(ba.B2.max_abs() < 1e-10);
  CHECK(ba.C1.max_abs() < 1e-10);
  CHECK((ba.C2 - CMatrix::identity(4)).max_abs() < 1e-10);
}

TEST_CASE("dual system: structure and involution on the coefficients") {
  SystemSpec base = schrodinger_derivative();
  SystemSpec dual = dual_system(base);
  CHECK(validate(dual).passed);
  CHECK((dual.P2 + base.P2).max_abs() < 1e-13);
  CHECK((dual.P1 + base.P1).max_abs() < 1e-13);
  CHECK(dual.H == base.H);
  // The dual swaps the boundary channels: its input acts where the base
  // observed (positions), its output reads where the base was driven
  // (derivative traces). Column blocks of tau are (h(1),h'(1),h(0),h'(0)).
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(dual.WB1(i, 1)) < 1e-13);
    CHECK(std::abs(dual.WB1(i, 3)) < 1e-13);
    CHECK(std::abs(dual.WC(i, 0)) < 1e-13);
    CHECK(std::abs(dual.WC(i, 2)) < 1e-13);
  }

  SystemSpec dd = dual_system(dual);
  CHECK((dd.P2 - base.P2).max_abs() < 1e-12);
  CHECK((dd.P1 - base.P1).max_abs() < 1e-12);
  CHECK((dd.P0.eval(0.25) - base.P0.eval(0.25)).max_abs() < 1e-12);

  // The double-dual boundary conditions span the original ones: stacking
  // both row sets gains no rank.
  CHECK(smallest_singular_value(dd.WB1) > 1e-6);
  CHECK(smallest_singular_value(base.WB1) > 1e-6);
  CMatrix stacked = CMatrix::vstack(dd.WB1, base.WB1);
  CHECK(smallest_singular_value(stacked) < 1e-10);
}

TEST_CASE("dual of an energy-preserving spec preserves energy") {
  SystemSpec ext = extended_spec(schrodinger_derivative());
  SystemSpec dual = dual_system(ext);
  CHECK(validate(dual).passed);
  PassivityResult p = passivity_check(dual);
  CHECK(p.status == Passivity::EnergyPreserving);
}

TEST_CASE("dual requires a square input map") {
  CHECK_THROWS_AS(dual_system(beam_viscous()), NotApplicableError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bcsys/spec_io.hpp"
#include "bcsys/system_spec.hpp"
#include "common.hpp"

using namespace bcsys;
using namespace bcsys::testing;

TEST_CASE("coefficient kinds evaluate correctly") {
  CMatrix a{{cxd(2, 1)}};
  auto c = CoefficientFunction::constant(a);
  CHECK(c.eval(0.3)(0, 0) == cxd(2, 1));

  // 1 + 2 z + 3 z^2 at z = 0.5 -> 2.75.
  auto p = CoefficientFunction::polynomial(
      {CMatrix{{cxd(1, 0)}}, CMatrix{{cxd(2, 0)}}, CMatrix{{cxd(3, 0)}}});
  CHECK(p.eval(0.5)(0, 0).real() == doctest::Approx(2.75));
  CHECK(p.eval(0.0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(p.eval(1.0)(0, 0).real() == doctest::Approx(6.0));

  auto pw = CoefficientFunction::piecewise_constant(
      {CMatrix{{cxd(1, 0)}}, CMatrix{{cxd(5, 0)}}}, {0.4});
  CHECK(pw.eval(0.1)(0, 0).real() == doctest::Approx(1.0));
  CHECK(pw.eval(0.9)(0, 0).real() == doctest::Approx(5.0));
}

TEST_CASE("piecewise breakpoints must be strictly increasing inside (0,1)") {
  std::vector<CMatrix> pieces{CMatrix{{cxd(1, 0)}}, CMatrix{{cxd(2, 0)}}};
  CHECK_THROWS_AS(CoefficientFunction::piecewise_constant(pieces, {1.5}),
                  DimensionError);
  std::vector<CMatrix> three{CMatrix{{cxd(1, 0)}}, CMatrix{{cxd(2, 0)}},
                             CMatrix{{cxd(3, 0)}}};
  CHECK_THROWS_AS(CoefficientFunction::piecewise_constant(three, {0.6, 0.4}),
                  DimensionError);
}

TEST_CASE("coefficient algebra: negation, skew part, equality") {
  std::mt19937 rng(31);
  CMatrix a = random_matrix(rng, 3, 3);
  auto c = CoefficientFunction::constant(a);
  CHECK((c.negated().eval(0.2) + c.eval(0.2)).max_abs() < 1e-15);
  CMatrix sk = c.skew_part().eval(0.7);
  CHECK((sk + sk.adjoint()).max_abs() < 1e-14);
  CHECK((sk - cxd(0.5, 0) * (a - a.adjoint())).max_abs() < 1e-14);
  CHECK(c == CoefficientFunction::constant(a));
  CHECK_FALSE(c == c.negated());
}

TEST_CASE("example files parse with the expected shapes") {
  SystemSpec bv = beam_viscous();
  CHECK(bv.n == 2);
  CHECK(bv.m == 1);
  CHECK(bv.P2(0, 1) == cxd(-1, 0));
  CHECK(bv.P2(1, 0) == cxd(1, 0));
  CHECK(bv.WB1.rows() == 1);
  CHECK(bv.WB2.rows() == 3);
  CHECK(bv.WC.cols() == 8);

  SystemSpec be = beam_elastic();
  CHECK(be.n == 3);
  CHECK(be.m == 1);
  CHECK(be.P2(2, 2) == cxd(0, 1));

  SystemSpec sd = schrodinger_derivative();
  CHECK(sd.n == 1);
  CHECK(sd.m == 2);
  CHECK(sd.WB2.rows() == 0);
}

TEST_CASE("schema violations raise SchemaError") {
  CHECK_THROWS_AS(parse_spec("{\"n\": 1}"), SchemaError);
  CHECK_THROWS_AS(parse_spec("not json at all"), SchemaError);
  // Unknown key.
  std::string doc = emit_spec(schrodinger_derivative());
  std::string extra = doc;
  extra.insert(extra.rfind('}'), ", \"extra\": 1");
  CHECK_THROWS_AS(parse_spec(extra), SchemaError);
  CHECK_THROWS_AS(parse_spec_file("/nonexistent/path.spec"), IoError);
}

TEST_CASE("shape violations raise DimensionError") {
  SystemSpec s = schrodinger_derivative();
  s.WC = CMatrix(2, 5);  // wrong width (4n = 4)
  CHECK_THROWS_AS(s.check_dimensions(), DimensionError);
  CHECK_THROWS_AS(parse_spec(
                      R"({"n":1,"m":2,"P2":[[[0,1]]],"P1":[[0]],
            "P0":{"kind":"constant","coeffs":[[[0]]]},
            "H":{"kind":"constant","coeffs":[[[1]]]},
            "WB1":[[0,1,0],[0,0,0,1]],"WB2":[],
            "WC":[[1,0,0,0],[0,0,-1,0]]})"),
                  DimensionError);
}

TEST_CASE("emit then parse is the identity") {
  for (const SystemSpec& s : {beam_viscous(), beam_elastic(),
                              schrodinger_derivative(), schrodinger_position()}) {
    SystemSpec back = parse_spec(emit_spec(s));
    CHECK(back == s);
  }
  // Polynomial and piecewise coefficients survive the round trip too.
  std::mt19937 rng(32);
  SystemSpec s = random_spec(rng, 2, 3);
  s.P0 = CoefficientFunction::polynomial(
      {random_skew_adjoint(rng, 2), random_skew_adjoint(rng, 2)});
  s.H = CoefficientFunction::piecewise_constant(
      {random_positive(rng, 2), random_positive(rng, 2)}, {0.5});
  CHECK(parse_spec(emit_spec(s)) == s);
}

TEST_CASE("validate: fixtures pass, structural defects are reported") {
  ValidationReport r = validate(beam_viscous());
  CHECK(r.passed);
  CHECK(r.p0_skew);
  CHECK(r.h_min_eig == doctest::Approx(1.0));

  r = validate(beam_elastic());
  CHECK(r.passed);
  CHECK_FALSE(r.p0_skew);  // coupling block is not skew-adjoint

  // Breaking P2 skew-adjointness is caught with the right defect size.
  SystemSpec bad = beam_viscous();
  bad.P2 = CMatrix::identity(2);
  r = validate(bad);
  CHECK_FALSE(r.passed);
  bool found = false;
  for (const auto& c : r.checks)
    if (!c.passed && c.name.find("P2") != std::string::npos) {
      found = true;
      CHECK(c.defect == doctest::Approx(2.0).epsilon(1e-12));
    }
  CHECK(found);

  // Rank-deficient stacked boundary matrix is caught.
  bad = schrodinger_derivative();
  bad.WC = bad.WB1;
  r = validate(bad);
  CHECK_FALSE(r.passed);
}

TEST_CASE("validate: indefinite H fails") {
  SystemSpec s = schrodinger_derivative();
  s.H = CoefficientFunction::constant(CMatrix{{cxd(-1, 0)}});
  ValidationReport r = validate(s);
  CHECK_FALSE(r.passed);
  CHECK(r.h_min_eig == doctest::Approx(-1.0));
}

TEST_CASE("format_report lists every check") {
  std::string txt = format_report(validate(beam_viscous()));
  CHECK(txt.find("pass") != std::string::npos);
}

TEST_CASE("energy_norm: exact values and convergence") {
  GridFunction zero{1, 11, std::vector<cxd>(11, cxd(0, 0))};
  auto h1 = CoefficientFunction::constant(CMatrix{{cxd(1, 0)}});
  CHECK(energy_norm(zero, h1) == doctest::Approx(0.0));

  // f = 1, H = 2: E = 1/2 * 2 = 1, norm 1 (trapezoid is exact).
  GridFunction one{1, 21, std::vector<cxd>(21, cxd(1, 0))};
  auto h2 = CoefficientFunction::constant(CMatrix{{cxd(2, 0)}});
  CHECK(energy_norm(one, h2) == doctest::Approx(1.0).epsilon(1e-13));

  // f = z, H = 1: norm = sqrt(1/6), trapezoid error O(N^-2).
  auto make = [](std::size_t N) {
    GridFunction f{1, N, std::vector<cxd>(N)};
    for (std::size_t k = 0; k < N; ++k)
      f.values[k] = cxd(static_cast<double>(k) / static_cast<double>(N - 1), 0);
    return f;
  };
  double exact = std::sqrt(1.0 / 6.0);
  double e1 = std::abs(energy_norm(make(11), h1) - exact);
  double e2 = std::abs(energy_norm(make(21), h1) - exact);
  CHECK(e1 < 2e-3);
  CHECK(e2 < e1);
  CHECK(e1 / e2 > 3.0);  // second order

  GridFunction bad{1, 2, {cxd(0, 0), cxd(0, 0)}};
  CHECK_THROWS_AS(bad.check(), DimensionError);
}

TEST_CASE("energy_norm: equivalence with the unweighted norm") {
  std::mt19937 rng(33);
  auto h = CoefficientFunction::constant(random_positive(rng, 2));
  auto ev = hermitian_eigenvalues(h.eval(0.0));
  double lo = ev.front(), hi = ev.back();
  for (int trial = 0; trial < 20; ++trial) {
    GridFunction f{2, 31, std::vector<cxd>(62)};
    for (auto& v : f.values) v = random_cxd(rng);
    double en = energy_norm(f, h);
    auto id = CoefficientFunction::constant(CMatrix::identity(2));
    double l2 = energy_norm(f, id);
    CHECK(en * en >= lo * l2 * l2 - 1e-12);
    CHECK(en * en <= hi * l2 * l2 + 1e-12);
  }
}

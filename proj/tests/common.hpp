#pragma once

// Shared fixtures and generators for the test suites: the example system
// files, hand-built variants, and seeded random specs satisfying the
// structural hypotheses.

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "bcsys/boundary_algebra.hpp"
#include "bcsys/matrix.hpp"
#include "bcsys/spec_io.hpp"
#include "bcsys/system_spec.hpp"

#ifndef BCSYS_EXAMPLES_DIR
#error "BCSYS_EXAMPLES_DIR must be defined by the build"
#endif

namespace bcsys::testing {

inline std::string example_path(const std::string& name) {
  return std::string(BCSYS_EXAMPLES_DIR) + "/" + name;
}

// Vibrating string with structural damping at one end (n = 2, m = 1).
inline SystemSpec beam_viscous() {
  return parse_spec_file(example_path("beam_viscous.spec"));
}

// String with an attached rigid bar, elastic suspension (n = 3, m = 1).
inline SystemSpec beam_elastic() {
  return parse_spec_file(example_path("beam_elastic.spec"));
}

// Schroedinger equation, derivative control at both ends (n = 1, m = 2).
inline SystemSpec schrodinger_derivative() {
  return parse_spec_file(example_path("schrodinger_derivative.spec"));
}

// Schroedinger equation, position control (n = 1, m = 2): not well posed.
inline SystemSpec schrodinger_position() {
  return parse_spec_file(example_path("schrodinger_position.spec"));
}

// -------------------------------------------------------------------------
// Seeded random generators.

inline cxd random_cxd(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return {d(rng), d(rng)};
}

inline CMatrix random_matrix(std::mt19937& rng, std::size_t r,
                             std::size_t c) {
  CMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = random_cxd(rng);
  return a;
}

inline CMatrix random_hermitian(std::mt19937& rng, std::size_t n) {
  CMatrix a = random_matrix(rng, n, n);
  CMatrix h = a + a.adjoint();
  h *= cxd(0.5, 0.0);
  return h;
}

inline CMatrix random_skew_adjoint(std::mt19937& rng, std::size_t n) {
  CMatrix a = random_matrix(rng, n, n);
  CMatrix s = a - a.adjoint();
  s *= cxd(0.5, 0.0);
  return s;
}

// Skew-adjoint and invertible: shift the (purely imaginary) spectrum of a
// random skew-adjoint matrix away from zero along the imaginary axis.
inline CMatrix random_invertible_skew(std::mt19937& rng, std::size_t n) {
  CMatrix s = random_skew_adjoint(rng, n);
  double shift = operator_norm(s) + 1.0;
  CMatrix out = s;
  for (std::size_t i = 0; i < n; ++i) out(i, i) += cxd(0.0, shift);
  return out;
}

// Uniformly positive definite: B^H B + I.
inline CMatrix random_positive(std::mt19937& rng, std::size_t n) {
  CMatrix b = random_matrix(rng, n, n);
  CMatrix h = b.adjoint() * b;
  for (std::size_t i = 0; i < n; ++i) h(i, i) += cxd(1.0, 0.0);
  return h;
}

// Full-row-rank matrix (regenerates until the smallest singular value is
// comfortably positive).
inline CMatrix random_full_row_rank(std::mt19937& rng, std::size_t r,
                                    std::size_t c) {
  for (;;) {
    CMatrix w = random_matrix(rng, r, c);
    if (smallest_singular_value(w) > 1e-3) return w;
  }
}

// Random spec satisfying every structural hypothesis (constant P0, H).
inline SystemSpec random_spec(std::mt19937& rng, std::size_t n,
                              std::size_t m, bool skew_p0 = true) {
  SystemSpec s;
  s.n = n;
  s.m = m;
  s.P2 = random_invertible_skew(rng, n);
  s.P1 = random_hermitian(rng, n);
  CMatrix p0 = skew_p0 ? random_skew_adjoint(rng, n) : random_matrix(rng, n, n);
  s.P0 = CoefficientFunction::constant(p0);
  s.H = CoefficientFunction::constant(random_positive(rng, n));
  CMatrix w = random_full_row_rank(rng, 2 * n + m, 4 * n);
  s.WB1 = w.block(0, 0, m, 4 * n);
  s.WB2 = w.block(m, 0, 2 * n - m, 4 * n);
  s.WC = w.block(2 * n, 0, m, 4 * n);
  return s;
}

// Smooth initial grid state: a few sine modes per component.
inline GridFunction smooth_state(std::size_t n, std::size_t N) {
  GridFunction f;
  f.n = n;
  f.N = N;
  f.values.assign(n * N, cxd(0.0, 0.0));
  const double pi = 3.14159265358979323846;
  for (std::size_t k = 0; k < N; ++k) {
    double z = static_cast<double>(k) / static_cast<double>(N - 1);
    for (std::size_t i = 0; i < n; ++i) {
      double a = std::sin(pi * (static_cast<double>(i) + 1.0) * z);
      double b = 0.5 * std::sin(2.0 * pi * z + 0.3 * static_cast<double>(i));
      f.values[k * n + i] = cxd(a + b, 0.25 * a);
    }
  }
  return f;
}

}  // namespace bcsys::testing

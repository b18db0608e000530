#pragma once

#include <cstddef>
#include <vector>

#include "bcsys/matrix.hpp"

namespace bcsys {

// Complex banded matrix with kl sub- and ku superdiagonals, stored
// column-major with room for the extra kl superdiagonals that partial
// pivoting fills in during factorization.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  // Accumulates into (i, j); throws DimensionError outside the band.
  void add(std::size_t i, std::size_t j, cxd v);
  void set(std::size_t i, std::size_t j, cxd v);
  cxd at(std::size_t i, std::size_t j) const;  // zero outside the band

  std::vector<cxd> apply(const std::vector<cxd>& x) const;
  std::vector<cxd> apply_adjoint(const std::vector<cxd>& x) const;

 private:
  friend class BandedLU;
  std::size_t n_, kl_, ku_, ldab_;
  std::vector<cxd> ab_;
  cxd& ref(std::size_t i, std::size_t j) { return ab_[j * ldab_ + kl_ + ku_ + i - j]; }
  cxd val(std::size_t i, std::size_t j) const {
    return ab_[j * ldab_ + kl_ + ku_ + i - j];
  }
};

// LU factorization of a BandedMatrix with partial pivoting.
class BandedLU {
 public:
  // Factors a copy of m; inspect singular() before calling solve.
  explicit BandedLU(BandedMatrix m);

  bool singular() const { return singular_; }
  void solve_in_place(std::vector<cxd>& b) const;  // throws if singular
  std::vector<cxd> solve(std::vector<cxd> b) const;

 private:
  BandedMatrix m_;
  std::vector<std::size_t> piv_;
  bool singular_ = false;
};

// Solver for A + U*V with A banded, U (n x r) and V (r x n) dense but
// skinny: factors A once, then applies the low-rank correction through the
// r x r capacitance matrix. Also estimates the extreme singular values of
// the full operator by power/inverse iteration.
class BorderedSolver {
 public:
  // u is column-major (r columns of length n), v is row-major (r rows of
  // length n). Either may be empty (r = 0).
  BorderedSolver(BandedMatrix a, std::vector<std::vector<cxd>> u_cols,
                 std::vector<std::vector<cxd>> v_rows);

  bool banded_singular() const { return banded_singular_; }
  bool singular() const { return banded_singular_ || cap_singular_; }

  std::vector<cxd> solve(const std::vector<cxd>& b) const;
  std::vector<cxd> solve_adjoint(const std::vector<cxd>& b) const;
  std::vector<cxd> apply(const std::vector<cxd>& x) const;
  std::vector<cxd> apply_adjoint(const std::vector<cxd>& x) const;

  // sigma_min/sigma_max of A + U*V (0 when singular).
  double singular_value_ratio(int iterations = 40) const;

 private:
  std::size_t n_;
  std::size_t r_;
  BandedMatrix a_;
  BandedLU lu_;
  BandedLU lu_adj_;
  std::vector<std::vector<cxd>> u_, v_;
  std::vector<std::vector<cxd>> z_;      // A^{-1} U
  std::vector<std::vector<cxd>> zadj_;   // A^{-H} V^H
  CMatrix cap_;                          // I + V A^{-1} U
  CMatrix capinv_;
  bool banded_singular_ = false;
  bool cap_singular_ = false;
};

}  // namespace bcsys

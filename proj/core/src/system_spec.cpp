#include "bcsys/system_spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "bcsys/errors.hpp"

namespace bcsys {

void SystemSpec::check_dimensions() const {
  if (n == 0) throw DimensionError("state block size n must be positive");
  if (m == 0 || m > 2 * n) {
    throw DimensionError("input size m must satisfy 0 < m <= 2n");
  }
  auto need = [](const CMatrix& a, std::size_t r, std::size_t c,
                 const char* what) {
    if (a.rows() != r || a.cols() != c) {
      throw DimensionError(std::string(what) + " has wrong shape");
    }
  };
  need(P2, n, n, "P2");
  need(P1, n, n, "P1");
  if (P0.dim() != n) throw DimensionError("P0 has wrong shape");
  if (H.dim() != n) throw DimensionError("H has wrong shape");
  need(WB1, m, 4 * n, "WB1");
  if (2 * n - m > 0) {
    need(WB2, 2 * n - m, 4 * n, "WB2");
  } else if (!WB2.empty()) {
    throw DimensionError("WB2 must be empty when m = 2n");
  }
  need(WC, m, 4 * n, "WC");
}

bool operator==(const SystemSpec& a, const SystemSpec& b) {
  auto eq = [](const CMatrix& x, const CMatrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           approx_equal(x, y, 0.0);
  };
  return a.n == b.n && a.m == b.m && eq(a.P2, b.P2) && eq(a.P1, b.P1) &&
         a.P0 == b.P0 && a.H == b.H && eq(a.WB1, b.WB1) && eq(a.WB2, b.WB2) &&
         eq(a.WC, b.WC);
}

namespace {

std::vector<double> sample_points(const CoefficientFunction& h) {
  std::set<double> pts;
  for (int i = 0; i <= 100; ++i) pts.insert(i / 100.0);
  for (double b : h.breakpoints()) {
    pts.insert(b);
    // straddle each breakpoint so both one-sided values are sampled
    pts.insert(std::max(0.0, b - 1e-9));
  }
  return {pts.begin(), pts.end()};
}

}  // namespace

ValidationReport validate(const SystemSpec& spec) {
  ValidationReport rep;
  try {
    spec.check_dimensions();
  } catch (const DimensionError& e) {
    rep.checks.push_back({"dimensions", false, 0.0, e.what()});
    rep.passed = false;
    return rep;
  }
  rep.checks.push_back({"dimensions", true, 0.0, ""});

  const double p1_defect = (spec.P1 - spec.P1.adjoint()).max_abs();
  rep.checks.push_back({"P1 self-adjoint", p1_defect <= 1e-12,
                        p1_defect, ""});

  const double p2_defect = (spec.P2 + spec.P2.adjoint()).max_abs();
  rep.checks.push_back({"P2 skew-adjoint", p2_defect <= 1e-12, p2_defect, ""});

  const double p2_smin = smallest_singular_value(spec.P2);
  const bool p2_inv = is_invertible(spec.P2);
  rep.checks.push_back({"P2 invertible", p2_inv, p2_smin,
                        "sigma_min(P2)"});

  double h_herm_defect = 0.0;
  double hmin = std::numeric_limits<double>::infinity();
  double hmax = -std::numeric_limits<double>::infinity();
  bool h_eig_ok = true;
  double p0_skew_defect = 0.0;
  for (double z : sample_points(spec.H)) {
    const CMatrix hz = spec.H.eval(z);
    h_herm_defect = std::max(h_herm_defect, (hz - hz.adjoint()).max_abs());
    try {
      const auto ev = hermitian_eigenvalues(hz);
      hmin = std::min(hmin, ev.front());
      hmax = std::max(hmax, ev.back());
    } catch (const NotHermitianError&) {
      h_eig_ok = false;
    }
  }
  for (double z : sample_points(spec.P0)) {
    const CMatrix pz = spec.P0.eval(z);
    p0_skew_defect = std::max(p0_skew_defect, (pz + pz.adjoint()).max_abs());
  }
  rep.checks.push_back({"H self-adjoint", h_herm_defect <= 1e-12,
                        h_herm_defect, ""});
  const bool h_pos = h_eig_ok && hmin > 1e-12;
  {
    std::ostringstream det;
    det << "eigenvalues of H within [" << hmin << ", " << hmax << "]";
    rep.checks.push_back({"H uniformly positive", h_pos, hmin, det.str()});
  }
  rep.h_min_eig = hmin;
  rep.h_max_eig = hmax;

  const CMatrix stacked =
      CMatrix::vstack(CMatrix::vstack(spec.WB1, spec.WB2), spec.WC);
  const double w_smin = smallest_singular_value(stacked);
  const double w_smax = operator_norm(stacked);
  const bool full_rank =
      w_smax > 0.0 && w_smin / w_smax > kInvertibilityThreshold;
  rep.checks.push_back({"stacked [WB1;WB2;WC] full row rank", full_rank,
                        w_smin, "sigma_min of the stacked boundary matrix"});

  rep.p0_skew = p0_skew_defect <= 1e-12;
  rep.checks.push_back({"P0 skew-adjoint (informational)", rep.p0_skew,
                        p0_skew_defect,
                        "gates the passivity test and energy-balance checks"});

  if (spec.H.kind() == CoefficientFunction::Kind::PiecewiseConstant) {
    rep.warnings.push_back(
        "H is piecewise constant; C1 smoothness cannot be certified for "
        "this representation");
  }

  rep.passed = true;
  for (const auto& c : rep.checks) {
    if (c.name == "P0 skew-adjoint (informational)") continue;
    rep.passed = rep.passed && c.passed;
  }
  return rep;
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    os << (c.passed ? "pass" : "FAIL") << "  " << c.name
       << "  (defect " << c.defect << ")";
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  for (const auto& w : report.warnings) os << "warning: " << w << "\n";
  os << (report.passed ? "all structural hypotheses hold"
                       : "structural hypotheses violated")
     << "\n";
  return os.str();
}

void GridFunction::check() const {
  if (N < 3) throw DimensionError("grid needs at least 3 nodes");
  if (values.size() != n * N) throw DimensionError("grid value count mismatch");
  for (cxd v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DimensionError("grid values must be finite");
    }
  }
}

double energy_norm(const GridFunction& f, const CoefficientFunction& h) {
  f.check();
  if (h.dim() != f.n) throw DimensionError("H dimension mismatch");
  const double dz = 1.0 / static_cast<double>(f.N - 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.N; ++k) {
    const double z = static_cast<double>(k) * dz;
    const CMatrix hz = h.eval(z);
    cxd q(0.0, 0.0);
    for (std::size_t i = 0; i < f.n; ++i) {
      for (std::size_t j = 0; j < f.n; ++j) {
        q += std::conj(f.values[k * f.n + i]) * hz(i, j) *
             f.values[k * f.n + j];
      }
    }
    const double w = (k == 0 || k == f.N - 1) ? 0.5 : 1.0;
    acc += w * q.real();
  }
  return std::sqrt(std::max(0.0, 0.5 * acc * dz));
}

}  // namespace bcsys

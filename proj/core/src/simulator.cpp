#include "bcsys/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bcsys/errors.hpp"

namespace bcsys {

InputSignal InputSignal::zero(std::size_t m) {
  InputSignal u;
  u.m_ = m;
  return u;
}

InputSignal InputSignal::from_samples(std::vector<double> times,
                                      std::vector<std::vector<cxd>> values) {
  if (times.empty() || times.size() != values.size()) {
    throw DimensionError("input signal needs matching times and values");
  }
  InputSignal u;
  u.m_ = values.front().size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || (i > 0 && times[i] <= times[i - 1])) {
      throw DimensionError("input sample times must be strictly increasing");
    }
    if (values[i].size() != u.m_) {
      throw DimensionError("input sample dimensions differ");
    }
    for (cxd v : values[i]) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw DimensionError("input samples must be finite");
      }
    }
  }
  u.times_ = std::move(times);
  u.values_ = std::move(values);
  return u;
}

std::vector<cxd> InputSignal::eval(double t) const {
  if (times_.empty()) return std::vector<cxd>(m_, cxd(0.0, 0.0));
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  std::vector<cxd> out(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    out[i] = values_[lo][i] + cxd(w, 0.0) * (values_[hi][i] - values_[lo][i]);
  }
  return out;
}

namespace {

// tau_N stencil row k over grid values of h, as (column, weight) pairs.
std::vector<std::pair<std::size_t, double>> trace_row(std::size_t k,
                                                      std::size_t n,
                                                      std::size_t N,
                                                      double dz) {
  const std::size_t b = k / n;
  const std::size_t c = k % n;
  const std::size_t last = n * (N - 1);
  switch (b) {
    case 0:
      return {{last + c, 1.0}};
    case 1:
      return {{last + c, 1.5 / dz},
              {last - n + c, -2.0 / dz},
              {last - 2 * n + c, 0.5 / dz}};
    case 2:
      return {{c, 1.0}};
    default:
      return {{c, -1.5 / dz}, {n + c, 2.0 / dz}, {2 * n + c, -0.5 / dz}};
  }
}

std::vector<cxd> matvec(const CMatrix& a, const std::vector<cxd>& x) {
  return a * x;
}

// row * L for a banded L, via (L^H conj(row))^conj.
std::vector<cxd> row_times_banded(const std::vector<cxd>& row,
                                  const BandedMatrix& l) {
  std::vector<cxd> conj_row(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) conj_row[i] = std::conj(row[i]);
  std::vector<cxd> tmp = l.apply_adjoint(conj_row);
  for (cxd& v : tmp) v = std::conj(v);
  return tmp;
}

double quadratic_energy(const std::vector<cxd>& x,
                        const std::vector<CMatrix>& h_nodes,
                        const std::vector<double>& weights, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < h_nodes.size(); ++k) {
    cxd q(0.0, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        q += std::conj(x[k * n + a]) * h_nodes[k](a, b) * x[k * n + b];
      }
    }
    acc += weights[k] * q.real();
  }
  return 0.5 * acc;
}

}  // namespace

DiscreteSystem discretize(const SystemSpec& spec, std::size_t N) {
  const CMatrix rows = spec.WB2.empty()
                           ? spec.WB1
                           : CMatrix::vstack(spec.WB1, spec.WB2);
  return discretize(spec, N, rows, spec.m);
}

DiscreteSystem discretize(const SystemSpec& spec, std::size_t N,
                          const CMatrix& boundary_rows,
                          std::size_t num_inputs) {
  spec.check_dimensions();
  if (N < 16) throw DimensionError("simulation grid needs N >= 16");
  const std::size_t n = spec.n;
  if (boundary_rows.rows() != 2 * n || boundary_rows.cols() != 4 * n) {
    throw DimensionError("boundary rows must be 2n x 4n");
  }
  const double dz = 1.0 / static_cast<double>(N - 1);

  DiscreteSystem d;
  d.spec = spec;
  d.N = N;
  d.num_inputs = num_inputs;
  d.weights.assign(N, dz);
  d.weights.front() = d.weights.back() = 0.5 * dz;

  std::vector<CMatrix> h_nodes(N), hinv_nodes(N);
  for (std::size_t k = 0; k < N; ++k) {
    h_nodes[k] = spec.H.eval(static_cast<double>(k) * dz);
    hinv_nodes[k] = inverse(h_nodes[k]);
  }

  // dx/dt = (P2 D2 + P1 D1 + P0) H x with central differences inside and
  // one-sided differences of the same stencils at the end nodes.
  const std::size_t band = 3 * n - 1;
  BandedMatrix l(n * N, band, band);
  auto add_block = [&](std::size_t node_row, std::size_t node_col,
                       const CMatrix& stencil) {
    const CMatrix blk = stencil * h_nodes[node_col];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (blk(i, j) != cxd(0.0, 0.0)) {
          l.add(node_row * n + i, node_col * n + j, blk(i, j));
        }
      }
    }
  };
  const double idz2 = 1.0 / (dz * dz);
  const double idz = 1.0 / dz;
  for (std::size_t j = 1; j + 1 < N; ++j) {
    const double z = static_cast<double>(j) * dz;
    add_block(j, j - 1,
              cxd(idz2, 0.0) * spec.P2 - cxd(0.5 * idz, 0.0) * spec.P1);
    add_block(j, j, cxd(-2.0 * idz2, 0.0) * spec.P2 + spec.P0.eval(z));
    add_block(j, j + 1,
              cxd(idz2, 0.0) * spec.P2 + cxd(0.5 * idz, 0.0) * spec.P1);
  }
  add_block(0, 0, cxd(idz2, 0.0) * spec.P2 - cxd(idz, 0.0) * spec.P1 +
                      spec.P0.eval(0.0));
  add_block(0, 1, cxd(-2.0 * idz2, 0.0) * spec.P2 + cxd(idz, 0.0) * spec.P1);
  add_block(0, 2, cxd(idz2, 0.0) * spec.P2);
  add_block(N - 1, N - 1, cxd(idz2, 0.0) * spec.P2 + cxd(idz, 0.0) * spec.P1 +
                              spec.P0.eval(1.0));
  add_block(N - 1, N - 2,
            cxd(-2.0 * idz2, 0.0) * spec.P2 - cxd(idz, 0.0) * spec.P1);
  add_block(N - 1, N - 3, cxd(idz2, 0.0) * spec.P2);
  d.L = std::move(l);

  // Tau maps grid values of x to tau_N(Hx).
  d.Tau = CMatrix(4 * n, n * N);
  for (std::size_t k = 0; k < 4 * n; ++k) {
    for (const auto& [col, coef] : trace_row(k, n, N, dz)) {
      const std::size_t node = col / n;
      const std::size_t comp = col % n;
      for (std::size_t b = 0; b < n; ++b) {
        d.Tau(k, node * n + b) += cxd(coef, 0.0) * h_nodes[node](comp, b);
      }
    }
  }
  d.C = boundary_rows * d.Tau;
  d.Cin = spec.WB1 * d.Tau;
  d.Cout = spec.WC * d.Tau;

  // Energy-orthogonal constraint-restoration gain
  //   K = W^{-1} C^H (C W^{-1} C^H)^{-1},  W = trapezoid-weighted H.
  const CMatrix ch = d.C.adjoint();  // nN x 2n
  CMatrix wic(n * N, 2 * n);
  for (std::size_t node = 0; node < N; ++node) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 2 * n; ++c) {
        cxd acc(0.0, 0.0);
        for (std::size_t b = 0; b < n; ++b) {
          acc += hinv_nodes[node](i, b) * ch(node * n + b, c);
        }
        wic(node * n + i, c) = acc / d.weights[node];
      }
    }
  }
  const CMatrix small = d.C * wic;  // 2n x 2n, Hermitian positive definite
                                    // exactly when the constraints have
                                    // full row rank
  if (!is_invertible(small)) {
    throw RankDeficientConstraintsError(
        "discrete boundary rows do not determine the traces");
  }
  d.K = wic * inverse(small);

  // C * L, the rows of the projected dynamics correction.
  d.CL = CMatrix(2 * n, n * N);
  for (std::size_t i = 0; i < 2 * n; ++i) {
    std::vector<cxd> row(n * N);
    for (std::size_t j = 0; j < n * N; ++j) row[j] = d.C(i, j);
    const std::vector<cxd> cl = row_times_banded(row, d.L);
    for (std::size_t j = 0; j < n * N; ++j) d.CL(i, j) = cl[j];
  }
  return d;
}

GridTrajectory simulate(const DiscreteSystem& disc, const GridFunction& x0,
                        const InputSignal& u, double T, double dt,
                        bool keep_states) {
  const std::size_t n = disc.spec.n;
  const std::size_t N = disc.N;
  x0.check();
  if (x0.n != n || x0.N != N) {
    throw DimensionError("initial state grid does not match discretization");
  }
  if (!(dt > 0.0) || !(T >= 0.0)) {
    throw DimensionError("need dt > 0 and T >= 0");
  }
  if (u.dim() != disc.num_inputs) {
    throw DimensionError("input signal dimension mismatch");
  }
  const std::size_t nn = n * N;

  std::vector<CMatrix> h_nodes(N);
  for (std::size_t k = 0; k < N; ++k) {
    h_nodes[k] = disc.spec.H.eval(static_cast<double>(k) /
                                  static_cast<double>(N - 1));
  }

  auto rhs_at = [&](double t) {
    std::vector<cxd> r(2 * n, cxd(0.0, 0.0));
    const std::vector<cxd> ut = u.eval(t);
    for (std::size_t i = 0; i < disc.num_inputs; ++i) r[i] = ut[i];
    return r;
  };

  // Repair the initial state onto the constraint manifold for u(0).
  std::vector<cxd> x = x0.values;
  {
    std::vector<cxd> defect = matvec(disc.C, x);
    const std::vector<cxd> r0 = rhs_at(0.0);
    for (std::size_t i = 0; i < defect.size(); ++i) defect[i] -= r0[i];
    const std::vector<cxd> corr = matvec(disc.K, defect);
    for (std::size_t i = 0; i < nn; ++i) x[i] -= corr[i];
  }

  GridTrajectory traj;
  traj.dt = dt;
  traj.n = n;
  traj.N = N;
  traj.m = disc.spec.m;
  {
    std::vector<cxd> corr(nn);
    for (std::size_t i = 0; i < nn; ++i) corr[i] = x0.values[i] - x[i];
    traj.projection_defect =
        std::sqrt(quadratic_energy(corr, h_nodes, disc.weights, n));
  }

  // Implicit trapezoid on dx/dt = P L x + K dr/dt with P = I - K C:
  //   (I - dt/2 PL) x_{k+1} = (I + dt/2 PL) x_k + K (r_{k+1} - r_k).
  // The implicit matrix is banded (I - dt/2 L) plus the rank-2n correction
  // (dt/2 K) (C L).
  BandedMatrix a(nn, disc.L.lower(), disc.L.upper());
  for (std::size_t i = 0; i < nn; ++i) {
    const std::size_t jlo = i > disc.L.lower() ? i - disc.L.lower() : 0;
    const std::size_t jhi = std::min(nn - 1, i + disc.L.upper());
    for (std::size_t j = jlo; j <= jhi; ++j) {
      cxd v = cxd(-0.5 * dt, 0.0) * disc.L.at(i, j);
      if (i == j) v += cxd(1.0, 0.0);
      if (v != cxd(0.0, 0.0)) a.add(i, j, v);
    }
  }
  std::vector<std::vector<cxd>> u_cols(2 * n), v_rows(2 * n);
  for (std::size_t c = 0; c < 2 * n; ++c) {
    u_cols[c].resize(nn);
    v_rows[c].resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      u_cols[c][i] = cxd(0.5 * dt, 0.0) * disc.K(i, c);
      v_rows[c][i] = disc.CL(c, i);
    }
  }
  BorderedSolver solver(std::move(a), std::move(u_cols), std::move(v_rows));
  if (solver.singular()) {
    throw StepSolveFailedError("implicit step operator singular at t = 0");
  }

  const std::size_t nsteps = static_cast<std::size_t>(std::llround(T / dt));
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.energies.push_back(quadratic_energy(x, h_nodes, disc.weights, n));
    traj.traces.push_back(matvec(disc.Tau, x));
    traj.outputs.push_back(matvec(disc.Cout, x));
    traj.inputs.push_back(matvec(disc.Cin, x));
    if (keep_states) traj.states.push_back(GridFunction{n, N, x});
  };
  record(0.0);

  std::vector<cxd> r_prev = rhs_at(0.0);
  for (std::size_t k = 0; k < nsteps; ++k) {
    const double t_next = static_cast<double>(k + 1) * dt;
    const std::vector<cxd> r_next = rhs_at(t_next);
    // b = x + dt/2 (L x - K (CL x)) + K (r_next - r_prev)
    std::vector<cxd> lx = disc.L.apply(x);
    const std::vector<cxd> clx = matvec(disc.CL, x);
    const std::vector<cxd> kclx = matvec(disc.K, clx);
    std::vector<cxd> dr(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) dr[i] = r_next[i] - r_prev[i];
    const std::vector<cxd> kdr = matvec(disc.K, dr);
    std::vector<cxd> b(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      b[i] = x[i] + cxd(0.5 * dt, 0.0) * (lx[i] - kclx[i]) + kdr[i];
    }
    x = solver.solve(b);
    record(t_next);
    r_prev = r_next;
  }
  traj.final_state = GridFunction{n, N, x};
  return traj;
}

double wellposedness_ratio(const GridTrajectory& traj) {
  if (traj.times.size() < 2) {
    throw DegenerateDataError("trajectory too short");
  }
  auto sq = [](const std::vector<cxd>& v) {
    double s = 0.0;
    for (cxd e : v) s += std::norm(e);
    return s;
  };
  double inty = 0.0, intu = 0.0;
  const std::size_t last = traj.times.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double w = (i == 0 || i == last) ? 0.5 : 1.0;
    inty += w * sq(traj.outputs[i]) * traj.dt;
    intu += w * sq(traj.inputs[i]) * traj.dt;
  }
  const double denom = traj.energies.front() + intu;
  if (denom <= 0.0) {
    throw DegenerateDataError("zero initial energy and zero input");
  }
  return (traj.energies.back() + inty) / denom;
}

std::vector<double> energy_balance_residual(const GridTrajectory& traj,
                                            const SystemSpec& spec) {
  const ValidationReport vr = validate(spec);
  if (!vr.p0_skew) {
    throw NotApplicableError(
        "energy balance needs P0 skew-adjoint (the P0 supply term must have "
        "zero real part)");
  }
  const BoundaryAlgebra ba = trace_transform(spec);
  const std::size_t n = spec.n;
  std::vector<double> res;
  if (traj.times.size() < 2) return res;
  res.reserve(traj.times.size() - 1);
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    std::vector<cxd> mid(4 * n);
    for (std::size_t k = 0; k < 4 * n; ++k) {
      mid[k] = cxd(0.5, 0.0) * (traj.traces[i][k] + traj.traces[i + 1][k]);
    }
    cxd supply(0.0, 0.0);
    for (std::size_t a = 0; a < 2 * n; ++a) {
      cxd ue(0.0, 0.0), ye(0.0, 0.0);
      for (std::size_t k = 0; k < 4 * n; ++k) {
        ue += ba.T(a, k) * mid[k];
        ye += ba.T(2 * n + a, k) * mid[k];
      }
      supply += std::conj(ue) * ye;
    }
    const double de = (traj.energies[i + 1] - traj.energies[i]) / traj.dt;
    res.push_back(de - 2.0 * supply.real());
  }
  return res;
}

FeedbackReport feedback_experiment(const SystemSpec& spec, double k,
                                   const GridFunction& x0, double T,
                                   double dt, std::size_t N) {
  spec.check_dimensions();
  if (spec.WB1.rows() != spec.WC.rows()) {
    throw NotSquareError("feedback needs matching input/output dimensions");
  }
  if (k < 0.0) throw DimensionError("feedback gain must be nonnegative");

  CMatrix folded = spec.WB1;
  folded += cxd(k, 0.0) * spec.WC;
  const CMatrix rows = spec.WB2.empty()
                           ? folded
                           : CMatrix::vstack(folded, spec.WB2);
  const DiscreteSystem disc = discretize(spec, N, rows, spec.m);

  FeedbackReport rep;
  rep.gain = k;
  rep.passivity = passivity_check(spec).status;
  rep.trajectory = simulate(disc, x0, InputSignal::zero(spec.m), T, dt);

  const GridTrajectory& traj = rep.trajectory;
  const double e0 = traj.energies.front();
  double max_inc = 0.0, max_gap = 0.0;
  for (std::size_t i = 0; i + 1 < traj.energies.size(); ++i) {
    max_inc = std::max(max_inc, traj.energies[i + 1] - traj.energies[i]);
    double ymid2 = 0.0;
    for (std::size_t j = 0; j < traj.outputs[i].size(); ++j) {
      ymid2 += std::norm(cxd(0.5, 0.0) *
                         (traj.outputs[i][j] + traj.outputs[i + 1][j]));
    }
    const double de = (traj.energies[i + 1] - traj.energies[i]) / traj.dt;
    max_gap = std::max(max_gap, std::abs(de + 2.0 * k * ymid2));
  }
  rep.max_energy_increase = max_inc;
  rep.max_balance_gap = max_gap;

  std::size_t half_idx = traj.energies.size();
  for (std::size_t i = 0; i < traj.energies.size(); ++i) {
    if (traj.energies[i] <= 0.5 * e0) {
      half_idx = i;
      break;
    }
  }
  const std::size_t upto =
      half_idx < traj.energies.size() ? half_idx : traj.energies.size() - 1;
  if (half_idx < traj.energies.size()) rep.t_half = traj.times[half_idx];
  if (e0 > 0.0) {
    double inty = 0.0;
    for (std::size_t i = 0; i <= upto; ++i) {
      const double w = (i == 0 || i == upto) ? 0.5 : 1.0;
      double y2 = 0.0;
      for (cxd v : traj.outputs[i]) y2 += std::norm(v);
      inty += w * y2 * traj.dt;
    }
    rep.observability_estimate = inty / e0;
  }
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trajectory_csv(const GridTrajectory& traj) {
  std::ostringstream os;
  os << "t,E";
  const std::size_t ny = traj.outputs.empty() ? 0 : traj.outputs.front().size();
  const std::size_t nu = traj.inputs.empty() ? 0 : traj.inputs.front().size();
  for (std::size_t j = 0; j < ny; ++j) {
    os << ",y_re_" << (j + 1) << ",y_im_" << (j + 1);
  }
  for (std::size_t j = 0; j < nu; ++j) {
    os << ",u_re_" << (j + 1) << ",u_im_" << (j + 1);
  }
  os << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << fmt(traj.times[i]) << "," << fmt(traj.energies[i]);
    for (std::size_t j = 0; j < ny; ++j) {
      os << "," << fmt(traj.outputs[i][j].real()) << ","
         << fmt(traj.outputs[i][j].imag());
    }
    for (std::size_t j = 0; j < nu; ++j) {
      os << "," << fmt(traj.inputs[i][j].real()) << ","
         << fmt(traj.inputs[i][j].imag());
    }
    os << "\n";
  }
  return os.str();
}

std::string state_dump(const GridFunction& state) {
  std::ostringstream os;
  for (cxd v : state.values) {
    os << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
  }
  return os.str();
}

}  // namespace bcsys

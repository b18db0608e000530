#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bcsys/banded.hpp"
#include "bcsys/boundary_algebra.hpp"
#include "bcsys/matrix.hpp"
#include "bcsys/system_spec.hpp"

namespace bcsys {

// Time-dependent input u(t) in C^m, piecewise linear between strictly
// increasing sample times, held constant outside the sampled range.
class InputSignal {
 public:
  InputSignal() = default;

  static InputSignal zero(std::size_t m);
  static InputSignal from_samples(std::vector<double> times,
                                  std::vector<std::vector<cxd>> values);

  std::size_t dim() const { return m_; }
  std::vector<cxd> eval(double t) const;

 private:
  std::size_t m_ = 0;
  std::vector<double> times_;
  std::vector<std::vector<cxd>> values_;
};

// Semi-discrete system on N uniform nodes: interior method-of-lines rows
// dx/dt = (P2 D2 + P1 D1 + P0) H x with one-sided difference rows at the
// end nodes, the 2n boundary conditions [WB1; WB2] tau_N(Hx) = [u; 0] as
// algebraic constraints, and the output map y = WC tau_N(Hx).
struct DiscreteSystem {
  SystemSpec spec;
  std::size_t N = 0;
  std::size_t num_inputs = 0;  // rows of the inhomogeneous constraint block
  BandedMatrix L;              // dx/dt = L x (before constraint projection)
  CMatrix C;     // 2n x nN constraint rows on grid values of x
  CMatrix Cin;   // num_inputs x nN: measured input WB1 tau_N(Hx)
  CMatrix Cout;  // m x nN: y = Cout x
  CMatrix Tau;   // 4n x nN: tau_N(Hx)
  CMatrix K;     // nN x 2n constraint-restoration gain (energy-orthogonal)
  CMatrix CL;    // C * L
  std::vector<double> weights;  // trapezoid weights (including dz)

  DiscreteSystem() : L(1, 0, 0) {}
};

// Builds the semi-discrete system; the constraint rows are folded into an
// energy-orthogonal projection so that the step operator preserves the
// quadratic energy of the skew part exactly. Throws
// RankDeficientConstraintsError when the discrete boundary rows do not
// determine the traces, DimensionError for N < 16.
// boundary_rows overrides [WB1; WB2] (used for feedback folding); it must
// keep 2n rows.
DiscreteSystem discretize(const SystemSpec& spec, std::size_t N);
DiscreteSystem discretize(const SystemSpec& spec, std::size_t N,
                          const CMatrix& boundary_rows,
                          std::size_t num_inputs);

struct GridTrajectory {
  double dt = 0.0;
  std::size_t n = 0, N = 0, m = 0;
  std::vector<double> times;
  std::vector<double> energies;               // E(t_i) = energy_norm^2
  std::vector<std::vector<cxd>> outputs;      // y(t_i), m entries
  std::vector<std::vector<cxd>> inputs;       // u(t_i), num_inputs entries
  std::vector<std::vector<cxd>> traces;       // tau_N(Hx)(t_i), 4n entries
  GridFunction final_state;
  double projection_defect = 0.0;  // energy norm of the initial repair
  std::vector<GridFunction> states;  // filled only when requested
};

inline constexpr std::size_t kDefaultSimGrid = 200;
inline constexpr double kDefaultTimeStep = 1e-3;

// Implicit trapezoidal stepping of the constrained semi-discrete system.
// x0 is repaired onto the constraint manifold for u(0) first (defect
// recorded). Throws StepSolveFailedError when the per-step system is
// singular.
GridTrajectory simulate(const DiscreteSystem& disc, const GridFunction& x0,
                        const InputSignal& u, double T,
                        double dt = kDefaultTimeStep,
                        bool keep_states = false);

// (E(T) + trapezoid integral of |y|^2) / (E(0) + trapezoid integral of
// |u|^2). Throws DegenerateDataError when the denominator vanishes.
double wellposedness_ratio(const GridTrajectory& traj);

// Per-step residual (E(t_{i+1}) - E(t_i))/dt - 2 Re<u_e, y_e> with the
// canonical boundary pair evaluated from midpoint-averaged traces. Requires
// P0 skew-adjoint (NotApplicableError otherwise).
std::vector<double> energy_balance_residual(const GridTrajectory& traj,
                                            const SystemSpec& spec);

struct FeedbackReport {
  GridTrajectory trajectory;
  double gain = 0.0;
  double max_energy_increase = 0.0;  // max over steps of E(t_{i+1}) - E(t_i)
  double max_balance_gap = 0.0;  // |dE/dt + 2k|y|^2| sup over steps
  double t_half = -1.0;          // first time E <= E(0)/2, -1 if not reached
  // trapezoid integral of |y|^2 over [0, t_half] divided by E(0); lower
  // bound evidence for the observability constant.
  double observability_estimate = 0.0;
  Passivity passivity = Passivity::NotApplicable;
};

// Closed loop u = -k y folded into the constraint rows ([WB1 + k WC; WB2],
// homogeneous). Throws NotSquareError on input/output size mismatch and
// DimensionError for k < 0.
FeedbackReport feedback_experiment(const SystemSpec& spec, double k,
                                   const GridFunction& x0, double T,
                                   double dt = kDefaultTimeStep,
                                   std::size_t N = kDefaultSimGrid);

// CSV rows `t,E,y_re_1,y_im_1,...,u_re_1,u_im_1,...`, one per step.
std::string trajectory_csv(const GridTrajectory& traj);

// Node-major dump of the final state, one `re,im` pair per line.
std::string state_dump(const GridFunction& state);

}  // namespace bcsys

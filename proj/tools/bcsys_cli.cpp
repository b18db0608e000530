// Command-line front end: validation, boundary analysis, frequency sweeps,
// time-domain simulation, feedback experiments, and dual-system export for
// boundary control/observation systems given as JSON spec files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcsys/boundary_algebra.hpp"
#include "bcsys/errors.hpp"
#include "bcsys/simulator.hpp"
#include "bcsys/spec_io.hpp"
#include "bcsys/transfer.hpp"

namespace {

using bcsys::cxd;

// Exit codes: 0 = result produced (verdicts like NotWellPosed included),
// 1 = malformed input (schema/shape/file), 2 = analysis precondition failed.
constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitPrecondition = 2;

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw bcsys::IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw bcsys::IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw bcsys::IoError("cannot move " + tmp + " to " + path);
}

std::vector<double> parse_omega_range(const std::string& text) {
  double a = 0.0, b = 0.0;
  long count = 0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%ld%c", &a, &b, &count, &extra) != 3 ||
      count < 1) {
    throw bcsys::SchemaError("omega range must be start:stop:count, got '" +
                             text + "'");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(a);
    return out;
  }
  for (long i = 0; i < count; ++i) {
    out.push_back(a + (b - a) * static_cast<double>(i) /
                          static_cast<double>(count - 1));
  }
  return out;
}

// Smooth seeded initial state: per component, a random combination of the
// first three sine modes (low-frequency, zero at the ends).
bcsys::GridFunction seeded_initial_state(const bcsys::SystemSpec& spec,
                                         std::size_t N, unsigned seed) {
  std::mt19937 rng(seed);
  auto draw = [&rng]() {
    return 2.0 * (static_cast<double>(rng()) / 4294967296.0) - 1.0;
  };
  const std::size_t n = spec.n;
  std::vector<cxd> amp(n * 3);
  for (auto& a : amp) a = cxd(draw(), draw());
  bcsys::GridFunction x0{n, N, std::vector<cxd>(n * N, cxd(0.0, 0.0))};
  const double pi = 3.14159265358979323846;
  for (std::size_t k = 0; k < N; ++k) {
    const double z = static_cast<double>(k) / static_cast<double>(N - 1);
    for (std::size_t i = 0; i < n; ++i) {
      cxd v(0.0, 0.0);
      for (std::size_t mode = 0; mode < 3; ++mode) {
        v += amp[i * 3 + mode] *
             std::sin(static_cast<double>(mode + 1) * pi * z);
      }
      x0.values[k * n + i] = v;
    }
  }
  return x0;
}

int run_validate(const std::string& spec_path) {
  const bcsys::SystemSpec spec = bcsys::parse_spec_file(spec_path);
  const bcsys::ValidationReport rep = bcsys::validate(spec);
  std::cout << bcsys::format_report(rep);
  return rep.passed ? kExitOk : kExitBadInput;
}

int run_analyze(const std::string& spec_path) {
  const bcsys::SystemSpec spec = bcsys::parse_spec_file(spec_path);
  const bcsys::ValidationReport vrep = bcsys::validate(spec);
  if (!vrep.passed) {
    std::cout << bcsys::format_report(vrep);
    std::cerr << "structural hypotheses violated:";
    for (const auto& c : vrep.checks) {
      if (!c.passed) std::cerr << " [" << c.name << "]";
    }
    std::cerr << "\n";
    return kExitBadInput;
  }
  const bcsys::WellPosednessReport rep = bcsys::wellposedness_verdict(spec);
  std::cout << bcsys::format_report(spec, rep);
  return kExitOk;
}

int run_transfer(const std::string& spec_path, double re,
                 const std::string& omega, std::size_t grid,
                 const std::string& out) {
  const bcsys::SystemSpec spec = bcsys::parse_spec_file(spec_path);
  const std::vector<double> omegas = parse_omega_range(omega);
  const bcsys::TransferSweep sweep =
      bcsys::transfer_sweep(spec, re, omegas, grid);
  const std::string csv = bcsys::sweep_csv(sweep.samples);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_atomic(out, csv);
  }
  std::size_t hits = 0;
  for (const auto& s : sweep.samples) hits += s.on_spectrum ? 1 : 0;
  std::cerr << "samples: " << sweep.samples.size()
            << "  sup |G|: " << sweep.sup_norm
            << "  spectrum hits: " << hits << "\n";
  return kExitOk;
}

int run_simulate(const std::string& spec_path, std::size_t grid, double T,
                 double dt, unsigned seed, const std::string& out,
                 bool dump_state) {
  const bcsys::SystemSpec spec = bcsys::parse_spec_file(spec_path);
  const bcsys::DiscreteSystem disc = bcsys::discretize(spec, grid);
  const bcsys::GridFunction x0 = seeded_initial_state(spec, grid, seed);
  const bcsys::GridTrajectory traj = bcsys::simulate(
      disc, x0, bcsys::InputSignal::zero(spec.m), T, dt);
  if (!out.empty()) write_atomic(out, bcsys::trajectory_csv(traj));
  if (dump_state) {
    if (out.empty()) {
      throw bcsys::IoError("--dump-state needs --out to derive the path");
    }
    write_atomic(out + ".state", bcsys::state_dump(traj.final_state));
  }
  const double e0 = traj.energies.front();
  const double eT = traj.energies.back();
  std::cout << "E(0) = " << e0 << "  E(T) = " << eT;
  if (e0 > 0.0) {
    std::cout << "  conservation defect = " << std::abs(eT - e0) / e0;
  }
  std::cout << "\nprojection defect = " << traj.projection_defect << "\n";
  try {
    std::cout << "well-posedness ratio = " << bcsys::wellposedness_ratio(traj)
              << "\n";
  } catch (const bcsys::DegenerateDataError&) {
    std::cout << "well-posedness ratio undefined (zero data)\n";
  }
  return kExitOk;
}

int run_feedback(const std::string& spec_path, double gain, std::size_t grid,
                 double T, double dt, unsigned seed, const std::string& out,
                 bool dump_state) {
  const bcsys::SystemSpec spec = bcsys::parse_spec_file(spec_path);
  const bcsys::PassivityResult pas = bcsys::passivity_check(spec);
  if (pas.status == bcsys::Passivity::NotPassive) {
    throw bcsys::NotApplicableError(
        "feedback u = -k y needs an impedance-passive spec; passivity check "
        "returned NotPassive");
  }
  if (pas.status == bcsys::Passivity::NotApplicable) {
    std::cerr << "warning: passivity test not applicable (" << pas.diagnostic
              << "); proceeding\n";
  }
  const bcsys::GridFunction x0 = seeded_initial_state(spec, grid, seed);
  const bcsys::FeedbackReport rep =
      bcsys::feedback_experiment(spec, gain, x0, T, dt, grid);
  if (!out.empty()) write_atomic(out, bcsys::trajectory_csv(rep.trajectory));
  if (dump_state) {
    if (out.empty()) {
      throw bcsys::IoError("--dump-state needs --out to derive the path");
    }
    write_atomic(out + ".state",
                 bcsys::state_dump(rep.trajectory.final_state));
  }
  const double e0 = rep.trajectory.energies.front();
  std::cout << "gain k = " << rep.gain << "  E(0) = " << e0
            << "  E(T) = " << rep.trajectory.energies.back() << "\n";
  std::cout << "max per-step energy increase = " << rep.max_energy_increase
            << "\n";
  std::cout << "max |dE/dt + 2k|y|^2| = " << rep.max_balance_gap << "\n";
  if (rep.t_half >= 0.0) {
    std::cout << "half-energy time t_half = " << rep.t_half << "\n";
  } else {
    std::cout << "half-energy time not reached within the horizon\n";
  }
  std::cout << "observability estimate int |y|^2 / E(0) = "
            << rep.observability_estimate << "\n";
  return kExitOk;
}

int run_dual(const std::string& spec_path, const std::string& out) {
  const bcsys::SystemSpec spec = bcsys::parse_spec_file(spec_path);
  const bcsys::SystemSpec dual = bcsys::dual_system(spec);
  bcsys::emit_spec_file(dual, out);
  std::cout << "dual spec written to " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary control/observation system toolkit"};
  app.require_subcommand(1);

  std::string spec_path, out, omega = "0:0:1";
  double re = 1.0, horizon = 1.0, dt = bcsys::kDefaultTimeStep, gain = 1.0;
  std::size_t grid = 0;
  unsigned seed = 0;
  bool dump_state = false;

  auto add_spec = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_path, "spec file (JSON)")->required();
  };

  CLI::App* validate = app.add_subcommand("validate", "structural checks");
  add_spec(validate);

  CLI::App* analyze =
      app.add_subcommand("analyze", "boundary decomposition and verdicts");
  add_spec(analyze);

  CLI::App* transfer = app.add_subcommand("transfer", "frequency sweep");
  add_spec(transfer);
  transfer->add_option("--re", re, "real part of s");
  transfer->add_option("--omega", omega, "imaginary parts, start:stop:count");
  transfer->add_option("--grid", grid, "collocation grid size");
  transfer->add_option("--out", out, "CSV output path");

  CLI::App* simulate = app.add_subcommand("simulate", "time-domain run");
  add_spec(simulate);
  simulate->add_option("--grid", grid, "spatial grid size");
  simulate->add_option("--horizon", horizon, "final time T");
  simulate->add_option("--dt", dt, "time step");
  simulate->add_option("--seed", seed, "seed for the initial state");
  simulate->add_option("--out", out, "trajectory CSV path");
  simulate->add_flag("--dump-state", dump_state, "write final state dump");

  CLI::App* feedback =
      app.add_subcommand("feedback", "closed loop u = -k y");
  add_spec(feedback);
  feedback->add_option("--gain", gain, "feedback gain k");
  feedback->add_option("--grid", grid, "spatial grid size");
  feedback->add_option("--horizon", horizon, "final time T");
  feedback->add_option("--dt", dt, "time step");
  feedback->add_option("--seed", seed, "seed for the initial state");
  feedback->add_option("--out", out, "trajectory CSV path");
  feedback->add_flag("--dump-state", dump_state, "write final state dump");

  CLI::App* dual = app.add_subcommand("dual", "export the dual system");
  add_spec(dual);
  dual->add_option("--out", out, "dual spec output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(spec_path);
    if (analyze->parsed()) return run_analyze(spec_path);
    if (transfer->parsed()) {
      return run_transfer(spec_path, re, omega,
                          grid ? grid : bcsys::kDefaultTransferGrid, out);
    }
    if (simulate->parsed()) {
      return run_simulate(spec_path, grid ? grid : bcsys::kDefaultSimGrid,
                          horizon, dt, seed, out, dump_state);
    }
    if (feedback->parsed()) {
      return run_feedback(spec_path, gain,
                          grid ? grid : bcsys::kDefaultSimGrid, horizon, dt,
                          seed, out, dump_state);
    }
    if (dual->parsed()) return run_dual(spec_path, out);
  } catch (const bcsys::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const bcsys::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const bcsys::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const bcsys::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitOk;
}

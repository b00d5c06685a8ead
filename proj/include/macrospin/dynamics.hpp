#pragma once
// Time evolution engines: closed unitary dynamics, the stepwise
// measure-and-dephase toy model, the Lindblad master equation with
// dephasing and thermal environments, and the quantum-state-diffusion
// trajectory unraveling with deterministic seeding.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "macrospin/spin.hpp"

namespace macrospin::dynamics {

using linalg::cplx;
using linalg::Matrix;
using linalg::Vector;
using spin::SpinJ;

// --- toy dephasing model ---------------------------------------------------

struct ToyModelParams {
  double omega;
  double delta_t;
  int n_steps = 0;

  double c() const { return std::pow(std::cos(omega * delta_t), 2); }
  // quantum Zeno-like freezing below, step beyond the dynamical
  // timescale above
  bool zeno_regime() const { return omega * delta_t < 0.05; }
  bool coarse_step() const { return omega * delta_t > 1.0; }
};

class ToyModel {
 public:
  ToyModel(const SpinJ& s, const ToyModelParams& params);

  const SpinJ& spin_j() const { return j_; }
  const ToyModelParams& params() const { return params_; }

  // one free-evolution step followed by pointer-basis dephasing of the
  // (+j, -j) coherences; leakage outside span{|+j>,|-j>} is recorded
  Matrix step(const Matrix& rho) const;
  double last_leakage() const { return last_leakage_; }

  // n steps from |+j><+j|
  Matrix state_after(int n) const;
  // evolve an arbitrary state across [t0, t1]; both must sit on the step
  // grid within 1e-9
  Matrix evolve(const Matrix& rho, double t0, double t1) const;

 private:
  SpinJ j_;
  ToyModelParams params_;
  Matrix u_dt_;
  mutable double last_leakage_ = 0.0;
};

double survival_recurrence(double c, int n);
double survival_closed_form(double c, int n);  // (1 + (2c-1)^n) / 2

struct SurvivalSeries {
  std::vector<double> times;
  std::vector<double> values;
};

SurvivalSeries toy_survival_series(const ToyModel& model, int n_steps);

struct DecayFit {
  bool ok = false;
  double nu = 0.0;
  double max_residual = 0.0;  // on log(2A-1)
  std::string message;
};

// least-squares fit of log(2A - 1) against t; requires >= 5 usable points
// with A in (1/2, 1]
DecayFit fit_decay_rate(const SurvivalSeries& series);

// --- Lindblad models -------------------------------------------------------

enum class Representation { dicke, full };

struct LindbladModel {
  Matrix hamiltonian;
  std::vector<Matrix> lindblad_ops;
  Representation rep = Representation::dicke;
  int n_qubits = 0;
  std::string label;

  std::size_t dim() const { return hamiltonian.rows(); }
};

// H from the N-qubit chain Hamiltonian; in the Dicke representation the
// effective precession rate is 2^(N-1) * omega so both representations
// evolve identically on the same time axis.
LindbladModel build_dephasing_model(int n_qubits, double omega,
                                    double gamma_dp, Representation rep);
LindbladModel build_thermal_model(int n_qubits, double omega, double gamma_th,
                                  double n_bar, Representation rep);
LindbladModel build_closed_model(int n_qubits, double omega,
                                 Representation rep);

// --- master equation -------------------------------------------------------

struct IntegratorOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double positivity_floor = -1e-6;
  double max_step = 0.0;  // 0 = unlimited
};

struct EvolutionDiagnostics {
  double max_trace_drift = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Matrix> states;
  EvolutionDiagnostics diagnostics;
};

Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho);

EvolutionResult integrate_master(const LindbladModel& model,
                                 const Matrix& rho0,
                                 const std::vector<double>& time_grid,
                                 const IntegratorOptions& options = {});

// --- quantum state diffusion ----------------------------------------------

struct QsdOptions {
  double max_step = 0.0;    // 0 = rule min(0.01/omega_scale, 0.1/|LdagL|)
  double omega_scale = 1.0;
  int threads = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;  // normalized, at the grid times
};

Trajectory qsd_trajectory(const LindbladModel& model, const Vector& psi0,
                          const std::vector<double>& time_grid,
                          std::uint64_t seed, const QsdOptions& options = {});

struct TrajectoryEnsemble {
  std::size_t n_trajectories = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> times;
  std::vector<Matrix> averaged_states;
  // per-time mean and standard error of <m_z> across trajectories
  std::vector<double> mz_mean;
  std::vector<double> mz_stderr;
};

TrajectoryEnsemble ensemble_average(const LindbladModel& model,
                                    const Vector& psi0,
                                    const std::vector<double>& time_grid,
                                    std::size_t n_trajectories,
                                    std::uint64_t master_seed,
                                    const QsdOptions& options = {});

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

// --- observables -----------------------------------------------------------

struct MagnetizationHistogram {
  std::vector<double> edges;          // size bins + 1, covering [-j, +j]
  std::vector<double> probabilities;  // size bins
};

std::vector<double> default_bin_edges(const SpinJ& s);

// sums Dicke-basis diagonal populations of rho into the bins
MagnetizationHistogram magnetization_distribution(
    const SpinJ& s, const Matrix& rho, const std::vector<double>& edges);

std::vector<double> linear_grid(double start, double stop, int points);

}  // namespace macrospin::dynamics

#pragma once
// Quantitative checkers: the measure-then-evolve mixture condition on the
// Q-distribution, its two-state survival-function specialization, the
// exponential-multiplicativity scan, and the spatiotemporal continuity
// witness on coarse-grained slot occupations.

#include <functional>
#include <optional>
#include <vector>

#include "macrospin/dynamics.hpp"
#include "macrospin/husimi.hpp"

namespace macrospin::macroreal {

using linalg::Matrix;
using SurvivalFn = std::function<double(double)>;

// evolves a state across [t0, t1]
using Channel = std::function<Matrix(const Matrix&, double, double)>;

Channel make_closed_channel(const Matrix& hamiltonian);
Channel make_toy_channel(const dynamics::ToyModel& model);
Channel make_master_channel(const dynamics::LindbladModel& model,
                            const dynamics::IntegratorOptions& options = {});

struct TimePair {
  double t_i, t_j;
};

struct PairResult {
  double t_i, t_j;
  double delta;          // total-variation distance on Q
  int skipped_outcomes;  // unreachable measurement outcomes at t_i
};

struct MRReport {
  std::vector<PairResult> pairs;
  double epsilon;
  bool satisfied;  // max delta <= epsilon
  double max_delta;
};

// Per pair: lhs is Q of the state evolved 0 -> t_j unmeasured; rhs is the
// weighted mixture of the Kraus-reduced states measured at t_i and then
// evolved t_i -> t_j.
MRReport mr_condition_check(const Channel& channel, const Matrix& rho0,
                            const husimi::PovmSet& povm,
                            const std::vector<TimePair>& pairs,
                            const husimi::CoherentBasis& basis,
                            double epsilon);

// |a(t_j) - a(t_i) a(t_j - t_i)| / 2, the two-delta total variation
double two_state_mr_check(const SurvivalFn& a, double t_i, double t_j);

struct ScanResult {
  double max_mismatch = 0.0;
  bool range_ok = true;  // a(t) stayed within [-1, 1]
};

// max mismatch over all ordered pairs drawn from the grid; a(t) leaving
// [-1, 1] marks the survival function itself as inadmissible
ScanResult multiplicativity_scan(const SurvivalFn& a,
                                 const std::vector<double>& time_grid);

// all ordered pairs from a logarithmic grid over [0.1/nu, 5/nu]
std::vector<TimePair> log_pair_grid(double nu, int points);

struct SlotTimeSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> occupations;  // [time][slot], rows sum to 1
  int north = 0;
  int south = 0;
  std::vector<int> middle;
};

struct ContinuityReport {
  double witness = 0.0;  // south gain accumulated while middle stayed empty
  double eps_mid;
  double delta_transfer;
  bool violation = false;
  std::optional<double> violation_time;
  bool unreliable = false;  // time grid coarser than max_dt
};

ContinuityReport continuity_witness(const SlotTimeSeries& series,
                                    double eps_mid, double delta_transfer,
                                    double max_dt = 0.0);

}  // namespace macrospin::macroreal

#include "macrospin/macroreal.hpp"

#include <cmath>
#include <stdexcept>

namespace macrospin::macroreal {

Channel make_closed_channel(const Matrix& hamiltonian) {
  return [hamiltonian](const Matrix& rho, double t0, double t1) {
    if (t1 < t0) throw std::invalid_argument("channel must evolve forward");
    if (t1 == t0) return rho;
    const Matrix u = spin::propagator(hamiltonian, t1 - t0);
    return linalg::matmul(u, linalg::matmul(rho, linalg::dagger(u)));
  };
}

Channel make_toy_channel(const dynamics::ToyModel& model) {
  return [&model](const Matrix& rho, double t0, double t1) {
    return model.evolve(rho, t0, t1);
  };
}

Channel make_master_channel(const dynamics::LindbladModel& model,
                            const dynamics::IntegratorOptions& options) {
  return [&model, options](const Matrix& rho, double t0, double t1) {
    if (t1 < t0) throw std::invalid_argument("channel must evolve forward");
    if (t1 == t0) return rho;
    // time-homogeneous generator: shift the interval to [0, t1 - t0]
    const auto res =
        dynamics::integrate_master(model, rho, {0.0, t1 - t0}, options);
    return res.states.back();
  };
}

MRReport mr_condition_check(const Channel& channel, const Matrix& rho0,
                            const husimi::PovmSet& povm,
                            const std::vector<TimePair>& pairs,
                            const husimi::CoherentBasis& basis,
                            double epsilon) {
  MRReport report;
  report.epsilon = epsilon;
  report.max_delta = 0.0;
  for (const TimePair& pair : pairs) {
    if (pair.t_i > pair.t_j)
      throw std::invalid_argument("mr pair requires t_i <= t_j");
    const Matrix rho_lhs = channel(rho0, 0.0, pair.t_j);
    const husimi::QDistribution q_lhs = husimi::q_distribution(rho_lhs, basis);

    const Matrix rho_i = channel(rho0, 0.0, pair.t_i);
    husimi::QDistribution q_rhs{
        std::vector<double>(basis.grid->size(), 0.0), basis.grid};
    int skipped = 0;
    for (std::size_t k = 0; k < povm.elements.size(); ++k) {
      const auto reduced = husimi::kraus_reduce(rho_i, povm, k);
      if (!reduced) {
        ++skipped;
        continue;
      }
      const Matrix evolved = channel(reduced->rho, pair.t_i, pair.t_j);
      const husimi::QDistribution q_k = husimi::q_distribution(evolved, basis);
      for (std::size_t i = 0; i < q_rhs.values.size(); ++i)
        q_rhs.values[i] += reduced->probability * q_k.values[i];
    }
    const double delta = q_lhs.total_variation(q_rhs);
    report.pairs.push_back({pair.t_i, pair.t_j, delta, skipped});
    report.max_delta = std::max(report.max_delta, delta);
  }
  report.satisfied = report.max_delta <= epsilon;
  return report;
}

double two_state_mr_check(const SurvivalFn& a, double t_i, double t_j) {
  if (t_i >= t_j) throw std::invalid_argument("requires t_i < t_j");
  return 0.5 * std::abs(a(t_j) - a(t_i) * a(t_j - t_i));
}

ScanResult multiplicativity_scan(const SurvivalFn& a,
                                 const std::vector<double>& time_grid) {
  if (time_grid.size() < 3)
    throw std::invalid_argument("scan needs a grid of at least 3 points");
  ScanResult res;
  for (double t : time_grid) {
    const double v = a(t);
    if (v < -1.0 - 1e-12 || v > 1.0 + 1e-12) res.range_ok = false;
  }
  for (std::size_t i = 0; i < time_grid.size(); ++i) {
    for (std::size_t j = i + 1; j < time_grid.size(); ++j) {
      if (time_grid[i] >= time_grid[j]) continue;
      res.max_mismatch =
          std::max(res.max_mismatch,
                   two_state_mr_check(a, time_grid[i], time_grid[j]));
    }
  }
  return res;
}

std::vector<TimePair> log_pair_grid(double nu, int points) {
  if (nu <= 0.0 || points < 2)
    throw std::invalid_argument("log_pair_grid needs nu > 0, points >= 2");
  std::vector<double> ts;
  const double lo = std::log(0.1 / nu), hi = std::log(5.0 / nu);
  for (int i = 0; i < points; ++i)
    ts.push_back(std::exp(lo + (hi - lo) * i / (points - 1)));
  std::vector<TimePair> pairs;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      pairs.push_back({ts[i], ts[j]});
  return pairs;
}

ContinuityReport continuity_witness(const SlotTimeSeries& series,
                                    double eps_mid, double delta_transfer,
                                    double max_dt) {
  const std::size_t nt = series.times.size();
  if (nt == 0 || series.occupations.size() != nt)
    throw std::invalid_argument("empty or inconsistent slot time series");
  for (const auto& row : series.occupations) {
    double sum = 0.0;
    for (double v : row) sum += v;
    if (std::abs(sum - 1.0) > 1e-8)
      throw std::invalid_argument("slot occupations must sum to 1");
  }

  ContinuityReport report;
  report.eps_mid = eps_mid;
  report.delta_transfer = delta_transfer;
  if (max_dt > 0.0) {
    for (std::size_t i = 1; i < nt; ++i)
      if (series.times[i] - series.times[i - 1] > max_dt * (1.0 + 1e-12))
        report.unreliable = true;
  }

  const double south0 = series.occupations.front()[series.south];
  double middle_peak = 0.0;
  for (std::size_t i = 0; i < nt; ++i) {
    double mid = 0.0;
    for (int k : series.middle) mid += series.occupations[i][k];
    middle_peak = std::max(middle_peak, mid);
    if (middle_peak >= eps_mid) break;  // continuous transport took over
    const double gain = series.occupations[i][series.south] - south0;
    if (gain > report.witness) {
      report.witness = gain;
      if (gain >= delta_transfer && !report.violation) {
        report.violation = true;
        report.violation_time = series.times[i];
      }
    }
  }
  report.violation = report.witness >= delta_transfer;
  if (!report.violation) report.violation_time.reset();
  return report;
}

}  // namespace macrospin::macroreal

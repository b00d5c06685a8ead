#include "macrospin/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace macrospin::dynamics {

namespace ker = macrospin::kernels;

// --- toy model -------------------------------------------------------------

ToyModel::ToyModel(const SpinJ& s, const ToyModelParams& params)
    : j_(s), params_(params) {
  if (params.omega <= 0.0 || params.delta_t <= 0.0)
    throw std::invalid_argument("toy model requires omega > 0, delta_t > 0");
  u_dt_ = spin::propagator(spin::build_nonclassical_hamiltonian(s, params.omega),
                           params.delta_t);
}

Matrix ToyModel::step(const Matrix& rho) const {
  Matrix next = linalg::matmul(u_dt_, linalg::matmul(rho, linalg::dagger(u_dt_)));
  const std::size_t d = next.rows();
  next(0, d - 1) = 0.0;
  next(d - 1, 0) = 0.0;
  double block = next(0, 0).real() + next(d - 1, d - 1).real();
  last_leakage_ = std::max(0.0, linalg::trace(next).real() - block);
  return next;
}

Matrix ToyModel::state_after(int n) const {
  Matrix rho = linalg::outer(spin::basis_state(j_, j_.j()),
                             spin::basis_state(j_, j_.j()));
  for (int k = 0; k < n; ++k) rho = step(rho);
  return rho;
}

namespace {

int step_index(double t, double delta_t) {
  const double n = t / delta_t;
  const int ni = static_cast<int>(std::lround(n));
  if (std::abs(n - ni) > 1e-9 * std::max(1.0, std::abs(n)))
    throw std::invalid_argument("toy-model time not on the step grid");
  return ni;
}

}  // namespace

Matrix ToyModel::evolve(const Matrix& rho, double t0, double t1) const {
  const int n0 = step_index(t0, params_.delta_t);
  const int n1 = step_index(t1, params_.delta_t);
  if (n1 < n0) throw std::invalid_argument("toy evolution must go forward");
  Matrix out = rho;
  for (int k = n0; k < n1; ++k) out = step(out);
  return out;
}

double survival_recurrence(double c, int n) {
  if (c < 0.0 || c > 1.0 || n < 0)
    throw std::invalid_argument("survival recurrence needs c in [0,1], n >= 0");
  double a = 1.0;
  for (int k = 0; k < n; ++k) a = c * a + (1.0 - c) * (1.0 - a);
  return a;
}

double survival_closed_form(double c, int n) {
  return 0.5 * (1.0 + std::pow(2.0 * c - 1.0, n));
}

SurvivalSeries toy_survival_series(const ToyModel& model, int n_steps) {
  SurvivalSeries series;
  const double c = model.params().c();
  for (int n = 0; n <= n_steps; ++n) {
    series.times.push_back(n * model.params().delta_t);
    series.values.push_back(survival_recurrence(c, n));
  }
  return series;
}

DecayFit fit_decay_rate(const SurvivalSeries& series) {
  DecayFit fit;
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double a2 = 2.0 * series.values[i] - 1.0;
    if (series.values[i] < 0.5 - 1e-12) {
      fit.message = "survival value below 1/2; exponential form excluded";
      return fit;
    }
    if (a2 > 1e-12) {
      ts.push_back(series.times[i]);
      ys.push_back(std::log(a2));
    }
  }
  if (ts.size() < 5) {
    fit.message = "fewer than 5 usable points above the 1/2 floor";
    return fit;
  }
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ys[i] > ys[i - 1] + 1e-12) {
      fit.message = "survival series is not monotone decreasing";
      return fit;
    }
  }
  // model log(2A-1) = -nu t, through the origin
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  if (stt <= 0.0) {
    fit.message = "degenerate time axis";
    return fit;
  }
  fit.nu = -sty / stt;
  if (fit.nu <= 0.0) {
    fit.message = "fitted rate is not positive (constant series?)";
    return fit;
  }
  for (std::size_t i = 0; i < ts.size(); ++i)
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(ys[i] + fit.nu * ts[i]));
  fit.ok = true;
  return fit;
}

// --- Lindblad models -------------------------------------------------------

namespace {

void check_model_size(int n_qubits, Representation rep) {
  if (rep == Representation::full && (n_qubits < 1 || n_qubits > 12))
    throw std::invalid_argument("full-space representation limited to N <= 12");
  if (rep == Representation::dicke && (n_qubits < 1 || n_qubits > 20))
    throw std::invalid_argument("Dicke representation limited to N <= 20");
}

Matrix dicke_hamiltonian(int n_qubits, double omega) {
  // effective rate 2^(N-1) * omega matches the product-space chain
  const double omega_eff = std::ldexp(omega, n_qubits - 1);
  return spin::build_nonclassical_hamiltonian(SpinJ::from_qubits(n_qubits),
                                              omega_eff);
}

}  // namespace

LindbladModel build_closed_model(int n_qubits, double omega,
                                 Representation rep) {
  check_model_size(n_qubits, rep);
  LindbladModel m;
  m.rep = rep;
  m.n_qubits = n_qubits;
  m.label = "closed";
  m.hamiltonian = rep == Representation::dicke
                      ? dicke_hamiltonian(n_qubits, omega)
                      : spin::build_product_hamiltonian(n_qubits, omega);
  return m;
}

LindbladModel build_dephasing_model(int n_qubits, double omega,
                                    double gamma_dp, Representation rep) {
  LindbladModel m = build_closed_model(n_qubits, omega, rep);
  m.label = "dephasing";
  if (rep == Representation::dicke) {
    const SpinJ s = SpinJ::from_qubits(n_qubits);
    Matrix l(s.dim(), s.dim());
    // sum_i sigma_i^+ sigma_i^- = diag(4 (j + m)) on the symmetric subspace
    for (int i = 0; i < s.dim(); ++i) l(i, i) = gamma_dp * 4.0 * i;
    m.lindblad_ops.push_back(std::move(l));
  } else {
    Matrix l = spin::collective_sum(
        n_qubits,
        linalg::matmul(spin::sigma_plus2(), spin::sigma_minus2()));
    l *= gamma_dp;
    m.lindblad_ops.push_back(std::move(l));
  }
  return m;
}

LindbladModel build_thermal_model(int n_qubits, double omega, double gamma_th,
                                  double n_bar, Representation rep) {
  LindbladModel m = build_closed_model(n_qubits, omega, rep);
  m.label = "thermal";
  if (rep == Representation::dicke) {
    const auto ops = spin::build_spin_operators(SpinJ::from_qubits(n_qubits));
    // (1/2) sum_i gamma [(nbar+1) sigma_i^- - nbar sigma_i^+]
    //   = gamma [(nbar+1) J- - nbar J+] on the symmetric subspace
    Matrix l = ops.jminus;
    l *= gamma_th * (n_bar + 1.0);
    Matrix up = ops.jplus;
    up *= gamma_th * n_bar;
    l -= up;
    m.lindblad_ops.push_back(std::move(l));
  } else {
    Matrix l = spin::collective_sum(n_qubits, spin::sigma_minus2());
    l *= 0.5 * gamma_th * (n_bar + 1.0);
    Matrix up = spin::collective_sum(n_qubits, spin::sigma_plus2());
    up *= 0.5 * gamma_th * n_bar;
    l -= up;
    m.lindblad_ops.push_back(std::move(l));
  }
  return m;
}

// --- master equation -------------------------------------------------------

namespace {

struct MasterContext {
  const LindbladModel* model;
  std::vector<Matrix> ldag;
  std::vector<Matrix> ldagl;

  explicit MasterContext(const LindbladModel& m) : model(&m) {
    for (const Matrix& l : m.lindblad_ops) {
      ldag.push_back(linalg::dagger(l));
      ldagl.push_back(linalg::matmul(ldag.back(), l));
    }
  }

  Matrix rhs(const Matrix& rho) const {
    const Matrix& h = model->hamiltonian;
    Matrix out = linalg::matmul(h, rho);
    out -= linalg::matmul(rho, h);
    out *= cplx{0.0, -1.0};
    for (std::size_t k = 0; k < model->lindblad_ops.size(); ++k) {
      const Matrix& l = model->lindblad_ops[k];
      Matrix jump = linalg::matmul(l, linalg::matmul(rho, ldag[k]));
      Matrix anti = linalg::matmul(ldagl[k], rho);
      anti += linalg::matmul(rho, ldagl[k]);
      anti *= cplx{0.5, 0.0};
      jump -= anti;
      out += jump;
    }
    return out;
  }
};

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0,
                 kB4 = 125.0 / 192.0, kB5 = -2187.0 / 6784.0,
                 kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

void axpy_mat(Matrix& y, double a, const Matrix& x) {
  ker::zaxpy(y.size(), a, x.data(), y.data());
}

}  // namespace

Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho) {
  return MasterContext(model).rhs(rho);
}

EvolutionResult integrate_master(const LindbladModel& model,
                                 const Matrix& rho0,
                                 const std::vector<double>& time_grid,
                                 const IntegratorOptions& options) {
  if (time_grid.empty())
    throw std::invalid_argument("time grid must not be empty");
  for (std::size_t i = 1; i < time_grid.size(); ++i)
    if (time_grid[i] <= time_grid[i - 1])
      throw std::invalid_argument("time grid must be strictly ascending");
  if (rho0.rows() != model.dim())
    throw std::invalid_argument("initial state dimension mismatch");

  const MasterContext ctx(model);
  EvolutionResult result;
  result.diagnostics.min_eigenvalue = 1.0;

  Matrix rho = rho0;
  double t = time_grid.front();
  double h = 1e-4;
  Matrix k1 = ctx.rhs(rho);  // FSAL

  auto record = [&](double time) {
    result.times.push_back(time);
    result.states.push_back(rho);
    auto& d = result.diagnostics;
    d.max_trace_drift = std::max(
        d.max_trace_drift, std::abs(linalg::trace(rho).real() - 1.0) +
                               std::abs(linalg::trace(rho).imag()));
    d.max_hermiticity_defect =
        std::max(d.max_hermiticity_defect, linalg::hermiticity_defect(rho));
    // symmetrize before the eigensolve; the raw defect is already recorded
    Matrix sym = rho;
    sym += linalg::dagger(rho);
    sym *= cplx{0.5, 0.0};
    const double lam = linalg::min_eigval_hermitian(sym);
    d.min_eigenvalue = std::min(d.min_eigenvalue, lam);
    if (lam < options.positivity_floor)
      throw std::runtime_error(
          "positivity violated (min eigenvalue " + std::to_string(lam) +
          ") at t=" + std::to_string(time) + " after " +
          std::to_string(d.steps) + " steps");
  };

  record(t);

  for (std::size_t gi = 1; gi < time_grid.size(); ++gi) {
    const double target = time_grid[gi];
    while (t < target) {
      bool clipped = false;
      if (options.max_step > 0.0) h = std::min(h, options.max_step);
      if (t + h >= target) {
        h = target - t;
        clipped = true;
      }

      Matrix k2, k3, k4, k5, k6;
      Matrix y = rho;
      axpy_mat(y, h * kA21, k1);
      k2 = ctx.rhs(y);
      y = rho;
      axpy_mat(y, h * kA31, k1);
      axpy_mat(y, h * kA32, k2);
      k3 = ctx.rhs(y);
      y = rho;
      axpy_mat(y, h * kA41, k1);
      axpy_mat(y, h * kA42, k2);
      axpy_mat(y, h * kA43, k3);
      k4 = ctx.rhs(y);
      y = rho;
      axpy_mat(y, h * kA51, k1);
      axpy_mat(y, h * kA52, k2);
      axpy_mat(y, h * kA53, k3);
      axpy_mat(y, h * kA54, k4);
      k5 = ctx.rhs(y);
      y = rho;
      axpy_mat(y, h * kA61, k1);
      axpy_mat(y, h * kA62, k2);
      axpy_mat(y, h * kA63, k3);
      axpy_mat(y, h * kA64, k4);
      axpy_mat(y, h * kA65, k5);
      k6 = ctx.rhs(y);

      Matrix ynew = rho;
      axpy_mat(ynew, h * kB1, k1);
      axpy_mat(ynew, h * kB3, k3);
      axpy_mat(ynew, h * kB4, k4);
      axpy_mat(ynew, h * kB5, k5);
      axpy_mat(ynew, h * kB6, k6);
      const Matrix k7 = ctx.rhs(ynew);

      Matrix err(rho.rows(), rho.cols());
      axpy_mat(err, h * kE1, k1);
      axpy_mat(err, h * kE3, k3);
      axpy_mat(err, h * kE4, k4);
      axpy_mat(err, h * kE5, k5);
      axpy_mat(err, h * kE6, k6);
      axpy_mat(err, h * kE7, k7);

      double ratio = 0.0;
      for (std::size_t i = 0; i < err.size(); ++i) {
        const double scale =
            options.abs_tol +
            options.rel_tol * std::max(std::abs(rho.data()[i]),
                                       std::abs(ynew.data()[i]));
        ratio = std::max(ratio, std::abs(err.data()[i]) / scale);
      }

      if (ratio <= 1.0) {
        t = clipped ? target : t + h;
        rho = std::move(ynew);
        k1 = k7;
        ++result.diagnostics.steps;
      } else {
        ++result.diagnostics.rejected_steps;
      }
      const double factor =
          0.9 * std::pow(std::max(ratio, 1e-10), -0.2);
      h *= std::clamp(factor, 0.2, 5.0);
      if (h < 1e-14)
        throw std::runtime_error("master integrator step size underflow");
    }
    record(target);
  }
  return result;
}

// --- quantum state diffusion ----------------------------------------------

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 over the combined value
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

// deterministic standard normals from splitmix64 + Box-Muller; avoids the
// implementation-defined std::normal_distribution sequence
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : state_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double next_unit() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    // (0, 1], keeps log() finite
    return (static_cast<double>(z >> 11) + 1.0) * 0x1p-53;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct QsdContext {
  const LindbladModel* model;
  std::vector<Matrix> ldagl;
  double dt;

  QsdContext(const LindbladModel& m, const QsdOptions& options) : model(&m) {
    double max_ldagl = 0.0;
    for (const Matrix& l : m.lindblad_ops) {
      ldagl.push_back(linalg::matmul(linalg::dagger(l), l));
      const auto w = linalg::eigvals_hermitian(ldagl.back());
      max_ldagl = std::max(max_ldagl,
                           std::max(std::abs(w.front()), std::abs(w.back())));
    }
    double omega_scale = options.omega_scale;
    if (omega_scale <= 0.0) {
      const auto wh = linalg::eigvals_hermitian(m.hamiltonian);
      omega_scale = std::max(std::abs(wh.front()), std::abs(wh.back()));
    }
    dt = 0.01 / std::max(omega_scale, 1e-12);
    if (max_ldagl > 0.0) dt = std::min(dt, 0.1 / max_ldagl);
    if (options.max_step > 0.0) dt = std::min(dt, options.max_step);
  }

  // one Euler-Maruyama step with explicit renormalization
  void step(Vector& psi, double h, NormalSource& rng, Vector& scratch,
            Vector& lpsi) const {
    const std::size_t d = psi.size();
    // scratch = -i H psi * h
    ker::zgemv(d, d, cplx{0.0, -h}, model->hamiltonian.data(), psi.data(),
               0.0, scratch.data());
    const double root_h = std::sqrt(h);
    for (std::size_t k = 0; k < model->lindblad_ops.size(); ++k) {
      const Matrix& l = model->lindblad_ops[k];
      ker::zgemv(d, d, 1.0, l.data(), psi.data(), 0.0, lpsi.data());
      const cplx expect = ker::zdotc(d, psi.data(), lpsi.data());
      // drift: <L^dag> L - (1/2) L^dag L - (1/2) <L^dag><L>
      ker::zaxpy(d, h * std::conj(expect), lpsi.data(), scratch.data());
      ker::zgemv(d, d, cplx{-0.5 * h, 0.0}, ldagl[k].data(), psi.data(), 1.0,
                 scratch.data());
      ker::zaxpy(d, -0.5 * h * std::norm(expect), psi.data(), scratch.data());
      // noise: (L - <L>) dxi with complex Wiener increment
      const cplx dxi = root_h * cplx{rng(), rng()} / std::sqrt(2.0);
      ker::zaxpy(d, dxi, lpsi.data(), scratch.data());
      ker::zaxpy(d, -dxi * expect, psi.data(), scratch.data());
    }
    ker::zaxpy(d, 1.0, scratch.data(), psi.data());
    const double nrm = linalg::norm(psi);
    // per-step norm fluctuation scales like Var(L) * h, which the dt rule
    // caps near 0.1; only guard against outright blowup
    if (std::abs(nrm - 1.0) > 0.5)
      throw std::runtime_error(
          "qsd step-size instability: norm drift " + std::to_string(nrm - 1.0));
    ker::zscal(d, 1.0 / nrm, psi.data());
  }

  void run(Vector psi, const std::vector<double>& grid, NormalSource rng,
           const std::function<void(std::size_t, const Vector&)>& emit) const {
    Vector scratch(psi.size()), lpsi(psi.size());
    emit(0, psi);
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
      const double span = grid[gi] - grid[gi - 1];
      const int n = std::max(1, static_cast<int>(std::ceil(span / dt)));
      const double h = span / n;
      for (int s = 0; s < n; ++s) step(psi, h, rng, scratch, lpsi);
      emit(gi, psi);
    }
  }
};

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("time grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("time grid must be strictly ascending");
}

}  // namespace

Trajectory qsd_trajectory(const LindbladModel& model, const Vector& psi0,
                          const std::vector<double>& time_grid,
                          std::uint64_t seed, const QsdOptions& options) {
  check_grid(time_grid);
  const QsdContext ctx(model, options);
  Trajectory traj;
  traj.times = time_grid;
  traj.states.resize(time_grid.size());
  ctx.run(psi0, time_grid, NormalSource(seed),
          [&](std::size_t gi, const Vector& psi) { traj.states[gi] = psi; });
  return traj;
}

TrajectoryEnsemble ensemble_average(const LindbladModel& model,
                                    const Vector& psi0,
                                    const std::vector<double>& time_grid,
                                    std::size_t n_trajectories,
                                    std::uint64_t master_seed,
                                    const QsdOptions& options) {
  check_grid(time_grid);
  if (n_trajectories < 1)
    throw std::invalid_argument("ensemble needs at least one trajectory");
  const QsdContext ctx(model, options);
  const std::size_t d = psi0.size();
  const std::size_t nt = time_grid.size();

  const Matrix jz =
      model.rep == Representation::full
          ? spin::magnetization_operator(model.n_qubits)
          : spin::build_spin_operators(
                SpinJ(0.5 * (static_cast<double>(d) - 1.0)))
                .jz;

  // fixed-size blocks reduced in block order: the result is independent of
  // the thread count
  constexpr std::size_t kBlock = 64;
  const std::size_t n_blocks = (n_trajectories + kBlock - 1) / kBlock;
  std::vector<std::vector<Matrix>> block_sums(
      n_blocks, std::vector<Matrix>(nt, Matrix(d, d)));
  std::vector<double> mz(n_trajectories * nt, 0.0);

  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n_trajectories);
    Vector jzpsi(d);
    for (std::size_t i = lo; i < hi; ++i) {
      NormalSource rng(trajectory_seed(master_seed, i));
      ctx.run(psi0, time_grid, std::move(rng),
              [&](std::size_t gi, const Vector& psi) {
                Matrix& acc = block_sums[b][gi];
                for (std::size_t r = 0; r < d; ++r)
                  for (std::size_t c = 0; c < d; ++c)
                    acc(r, c) += psi[r] * std::conj(psi[c]);
                ker::zgemv(d, d, 1.0, jz.data(), psi.data(), 0.0,
                           jzpsi.data());
                mz[i * nt + gi] =
                    ker::zdotc(d, psi.data(), jzpsi.data()).real();
              });
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  TrajectoryEnsemble ens;
  ens.n_trajectories = n_trajectories;
  ens.master_seed = master_seed;
  ens.times = time_grid;
  ens.averaged_states.assign(nt, Matrix(d, d));
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t gi = 0; gi < nt; ++gi)
      ens.averaged_states[gi] += block_sums[b][gi];
  const cplx inv_m{1.0 / static_cast<double>(n_trajectories), 0.0};
  for (Matrix& m : ens.averaged_states) m *= inv_m;

  ens.mz_mean.assign(nt, 0.0);
  ens.mz_stderr.assign(nt, 0.0);
  for (std::size_t gi = 0; gi < nt; ++gi) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n_trajectories; ++i) mean += mz[i * nt + gi];
    mean /= static_cast<double>(n_trajectories);
    double var = 0.0;
    for (std::size_t i = 0; i < n_trajectories; ++i) {
      const double dlt = mz[i * nt + gi] - mean;
      var += dlt * dlt;
    }
    ens.mz_mean[gi] = mean;
    if (n_trajectories > 1) {
      var /= static_cast<double>(n_trajectories - 1);
      ens.mz_stderr[gi] =
          std::sqrt(var / static_cast<double>(n_trajectories));
    }
  }
  return ens;
}

// --- observables -----------------------------------------------------------

std::vector<double> default_bin_edges(const SpinJ& s) {
  // unit-width bins centered on the J_z eigenvalues
  std::vector<double> edges;
  for (int i = 0; i <= s.dim(); ++i) edges.push_back(-s.j() - 0.5 + i);
  return edges;
}

MagnetizationHistogram magnetization_distribution(
    const SpinJ& s, const Matrix& rho, const std::vector<double>& edges) {
  if (edges.size() < 2 || edges.front() > -s.j() || edges.back() < s.j())
    throw std::invalid_argument("bins must cover [-j, +j]");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] <= edges[i - 1])
      throw std::invalid_argument("bin edges must be ascending");
  MagnetizationHistogram hist{edges,
                              std::vector<double>(edges.size() - 1, 0.0)};
  for (int i = 0; i < s.dim(); ++i) {
    const double m = s.m_of(i);
    const auto it = std::upper_bound(edges.begin(), edges.end(), m);
    std::size_t bin = static_cast<std::size_t>(
        std::max<std::ptrdiff_t>(0, it - edges.begin() - 1));
    bin = std::min(bin, hist.probabilities.size() - 1);
    hist.probabilities[bin] += rho(i, i).real();
  }
  return hist;
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 2 || stop <= start)
    throw std::invalid_argument("invalid linear grid");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = start + (stop - start) * i / (points - 1);
  return g;
}

}  // namespace macrospin::dynamics

#include <cmath>

#include "doctest.h"
#include "macrospin/dynamics.hpp"

using namespace macrospin;
using namespace macrospin::dynamics;
using linalg::cplx;
using linalg::Matrix;
using linalg::Vector;
using spin::SpinJ;

namespace {

Matrix north_density(const SpinJ& s) {
  const Vector psi = spin::basis_state(s, s.j());
  return linalg::outer(psi, psi);
}

}  // namespace

TEST_CASE("toy model parameters") {
  ToyModelParams p{1.0, 0.2, 0};
  CHECK(p.c() == doctest::Approx(std::pow(std::cos(0.2), 2)).epsilon(1e-15));
  CHECK_FALSE(p.zeno_regime());
  CHECK_FALSE(p.coarse_step());
  CHECK(ToyModelParams{1.0, 0.01, 0}.zeno_regime());
  CHECK(ToyModelParams{1.0, 1.5, 0}.coarse_step());
}

TEST_CASE("one toy step from the north pole") {
  const SpinJ s(5.0);
  const ToyModel model(s, {1.0, 0.2, 1});
  const Matrix rho = model.step(north_density(s));
  const int d = s.dim();
  const double c = std::pow(std::cos(0.2), 2);
  CHECK(rho(d - 1, d - 1).real() == doctest::Approx(c).epsilon(1e-14));
  CHECK(rho(0, 0).real() == doctest::Approx(1.0 - c).epsilon(1e-14));
  CHECK(std::abs(rho(0, d - 1)) < 1e-15);
  CHECK(std::abs(rho(d - 1, 0)) < 1e-15);
  CHECK(model.last_leakage() < 1e-14);
  for (int i = 1; i + 1 < d; ++i) CHECK(std::abs(rho(i, i)) < 1e-15);
}

TEST_CASE("survival recurrence agrees with the closed form and the model") {
  const double c = std::pow(std::cos(0.2), 2);
  SUBCASE("spot values") {
    CHECK(survival_recurrence(c, 0) == 1.0);
    CHECK(survival_recurrence(c, 1) == doctest::Approx(c).epsilon(1e-15));
    // A_2 = c^2 + (1-c)^2
    CHECK(survival_recurrence(c, 2) ==
          doctest::Approx(c * c + (1 - c) * (1 - c)).epsilon(1e-15));
    CHECK(survival_closed_form(0.9, 3) ==
          doctest::Approx(0.5 * (1.0 + 0.512)).epsilon(1e-15));
  }
  SUBCASE("recurrence == closed form for many steps") {
    for (int n = 0; n <= 200; n += 7)
      CHECK(std::abs(survival_recurrence(c, n) - survival_closed_form(c, n)) <
            1e-14);
  }
  SUBCASE("density-matrix evolution reproduces the scalar recurrence") {
    const SpinJ s(5.0);
    const ToyModel model(s, {1.0, 0.2, 64});
    Matrix rho = north_density(s);
    for (int n = 1; n <= 64; ++n) {
      rho = model.step(rho);
      CHECK(std::abs(rho(s.dim() - 1, s.dim() - 1).real() -
                     survival_closed_form(c, n)) < 1e-12);
    }
  }
  SUBCASE("evolve() respects the step grid") {
    const SpinJ s(2.0);
    const ToyModel model(s, {1.0, 0.25, 8});
    const Matrix a = model.evolve(north_density(s), 0.0, 1.0);
    const Matrix b = model.state_after(4);
    CHECK(linalg::max_abs_diff(a, b) < 1e-14);
    CHECK_THROWS(model.evolve(north_density(s), 0.0, 0.3));
    CHECK_THROWS(model.evolve(north_density(s), 0.5, 0.25));
  }
}

TEST_CASE("decay-rate fit") {
  SUBCASE("exact exponential recovers the rate") {
    const double c = std::pow(std::cos(0.2), 2);
    const double nu_exact = -std::log(2.0 * c - 1.0) / 0.2;
    const SpinJ s(10.0);
    const ToyModel model(s, {1.0, 0.2, 64});
    const DecayFit fit = fit_decay_rate(toy_survival_series(model, 64));
    REQUIRE(fit.ok);
    CHECK(fit.nu == doctest::Approx(nu_exact).epsilon(1e-12));
    CHECK(fit.max_residual < 1e-10);
  }
  SUBCASE("fitted rate sits within 5% of 2 sin^2(w dt)/dt here") {
    const ToyModel model(SpinJ(10.0), {1.0, 0.2, 64});
    const DecayFit fit = fit_decay_rate(toy_survival_series(model, 64));
    REQUIRE(fit.ok);
    const double nu_small_dt = 2.0 * std::pow(std::sin(0.2), 2) / 0.2;
    CHECK(std::abs(fit.nu - nu_small_dt) / nu_small_dt < 0.05);
  }
  SUBCASE("too few points is rejected") {
    SurvivalSeries s{{0.0, 0.2, 0.4}, {1.0, 0.9, 0.8}};
    CHECK_FALSE(fit_decay_rate(s).ok);
  }
  SUBCASE("values below one half are rejected") {
    SurvivalSeries s{{0, 1, 2, 3, 4, 5}, {1.0, 0.8, 0.6, 0.4, 0.6, 0.8}};
    CHECK_FALSE(fit_decay_rate(s).ok);
  }
  SUBCASE("non-monotone series is rejected") {
    SurvivalSeries s{{0, 1, 2, 3, 4, 5}, {1.0, 0.8, 0.9, 0.8, 0.7, 0.6}};
    CHECK_FALSE(fit_decay_rate(s).ok);
  }
}

TEST_CASE("Lindblad model builders") {
  SUBCASE("single qubit dephasing operator is gamma diag(0, 4)") {
    const LindbladModel full =
        build_dephasing_model(1, 1.0, 0.7, Representation::full);
    REQUIRE(full.lindblad_ops.size() == 1);
    const Matrix& l = full.lindblad_ops[0];
    CHECK(std::abs(l(0, 0)) < 1e-15);
    CHECK(std::abs(l(1, 1) - cplx{2.8, 0.0}) < 1e-15);
    CHECK(std::abs(l(0, 1)) < 1e-15);

    const LindbladModel dicke =
        build_dephasing_model(1, 1.0, 0.7, Representation::dicke);
    CHECK(linalg::max_abs_diff(full.lindblad_ops[0],
                               dicke.lindblad_ops[0]) < 1e-15);
    CHECK(linalg::max_abs_diff(full.hamiltonian, dicke.hamiltonian) < 1e-15);
  }
  SUBCASE("single qubit thermal operator matches in both representations") {
    const LindbladModel full =
        build_thermal_model(1, 1.0, 0.3, 2.0, Representation::full);
    const LindbladModel dicke =
        build_thermal_model(1, 1.0, 0.3, 2.0, Representation::dicke);
    const Matrix& l = full.lindblad_ops[0];
    CHECK(std::abs(l(0, 1) - cplx{0.9, 0.0}) < 1e-15);   // gamma (nbar + 1)
    CHECK(std::abs(l(1, 0) - cplx{-0.6, 0.0}) < 1e-15);  // -gamma nbar
    CHECK(linalg::max_abs_diff(l, dicke.lindblad_ops[0]) < 1e-15);
  }
  SUBCASE("representation size limits") {
    CHECK_THROWS(build_closed_model(13, 1.0, Representation::full));
    CHECK_THROWS(build_closed_model(21, 1.0, Representation::dicke));
    CHECK_NOTHROW(build_closed_model(12, 1.0, Representation::full));
    CHECK_NOTHROW(build_closed_model(20, 1.0, Representation::dicke));
  }
}

TEST_CASE("master integrator: closed evolution matches the propagator") {
  const LindbladModel model = build_closed_model(4, 1.0, Representation::dicke);
  const SpinJ s = SpinJ::from_qubits(4);
  const Matrix rho0 = north_density(s);
  const std::vector<double> grid = linear_grid(0.0, 0.6, 7);
  const EvolutionResult res = integrate_master(model, rho0, grid);
  REQUIRE(res.times.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Matrix u = spin::propagator(model.hamiltonian, grid[i]);
    const Matrix expect =
        linalg::matmul(u, linalg::matmul(rho0, linalg::dagger(u)));
    CHECK(linalg::max_abs_diff(res.states[i], expect) < 1e-8);
  }
  CHECK(res.diagnostics.max_trace_drift < 1e-10);
  CHECK(res.diagnostics.min_eigenvalue > -1e-8);
}

TEST_CASE("master integrator input validation") {
  const LindbladModel model = build_closed_model(2, 1.0, Representation::dicke);
  const Matrix rho0 = north_density(SpinJ(1.0));
  CHECK_THROWS(integrate_master(model, rho0, {}));
  CHECK_THROWS(integrate_master(model, rho0, {0.0, 0.5, 0.5}));
  CHECK_THROWS(integrate_master(model, north_density(SpinJ(2.0)), {0.0, 1.0}));
}

TEST_CASE("dephasing keeps populations confined to the pole block") {
  const LindbladModel model =
      build_dephasing_model(10, 1.0, 1.0, Representation::dicke);
  const SpinJ s = SpinJ::from_qubits(10);
  const EvolutionResult res =
      integrate_master(model, north_density(s), linear_grid(0.0, 0.001, 5));
  const Matrix& last = res.states.back();
  double interior = 0.0;
  for (int i = 1; i + 1 < s.dim(); ++i) interior += last(i, i).real();
  CHECK(interior < 1e-10);
  const double survival = last(s.dim() - 1, s.dim() - 1).real();
  CHECK(survival < 1.0);
  CHECK(survival > 0.5);
  CHECK(res.diagnostics.max_trace_drift < 1e-8);
}

TEST_CASE("thermal coupling drains the north pole") {
  const LindbladModel model =
      build_thermal_model(4, 1.0, 0.5, 0.0, Representation::dicke);
  const SpinJ s = SpinJ::from_qubits(4);
  const Matrix jz = spin::build_spin_operators(s).jz;
  const EvolutionResult res =
      integrate_master(model, north_density(s), linear_grid(0.0, 0.2, 5));
  const double mz0 =
      linalg::trace(linalg::matmul(res.states.front(), jz)).real();
  const double mz1 =
      linalg::trace(linalg::matmul(res.states.back(), jz)).real();
  CHECK(mz0 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(mz1 < mz0 - 1e-3);
}

TEST_CASE("full product-space master equation matches the Dicke restriction") {
  const int n = 4;
  const SpinJ s = SpinJ::from_qubits(n);
  const std::vector<double> grid{0.0, 0.02, 0.05};
  const Matrix rho_dicke0 = north_density(s);
  const Vector full0 = spin::symmetric_embed(s, spin::basis_state(s, s.j()));
  const Matrix rho_full0 = linalg::outer(full0, full0);

  for (auto maker : {+[](Representation rep) {
                       return build_dephasing_model(4, 1.0, 1.0, rep);
                     },
                     +[](Representation rep) {
                       return build_thermal_model(4, 1.0, 0.5, 1.0, rep);
                     }}) {
    const EvolutionResult dicke =
        integrate_master(maker(Representation::dicke), rho_dicke0, grid);
    const EvolutionResult full =
        integrate_master(maker(Representation::full), rho_full0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto proj = spin::dicke_project(s, full.states[i], 1e-6);
      CHECK(proj.leakage < 1e-8);
      CHECK(linalg::max_abs_diff(proj.rho, dicke.states[i]) < 1e-6);
    }
  }
}

TEST_CASE("trajectory seeds are decorrelated across indices") {
  const std::uint64_t a = trajectory_seed(12345, 0);
  const std::uint64_t b = trajectory_seed(12345, 1);
  const std::uint64_t c = trajectory_seed(12346, 0);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(trajectory_seed(12345, 0) == a);  // pure function
}

TEST_CASE("qsd trajectory with no noise reproduces unitary evolution") {
  const LindbladModel model = build_closed_model(2, 1.0, Representation::dicke);
  const SpinJ s(1.0);
  const Vector psi0 = spin::basis_state(s, 1.0);
  const std::vector<double> grid = linear_grid(0.0, 0.5, 6);
  QsdOptions opt;
  opt.max_step = 1e-4;
  opt.omega_scale = 2.0;
  const Trajectory traj = qsd_trajectory(model, psi0, grid, 77, opt);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(linalg::norm(traj.states[i]) == doctest::Approx(1.0).epsilon(1e-12));
    const Vector expect =
        linalg::matvec(spin::propagator(model.hamiltonian, grid[i]), psi0);
    const double fidelity = std::norm(linalg::inner(expect, traj.states[i]));
    CHECK(fidelity > 1.0 - 1e-5);
  }
}

TEST_CASE("qsd trajectories are deterministic in the seed") {
  const LindbladModel model =
      build_dephasing_model(2, 1.0, 1.0, Representation::dicke);
  const SpinJ s(1.0);
  const Vector psi0 = spin::basis_state(s, 1.0);
  const std::vector<double> grid{0.0, 0.005, 0.01};
  const Trajectory a = qsd_trajectory(model, psi0, grid, 42);
  const Trajectory b = qsd_trajectory(model, psi0, grid, 42);
  const Trajectory c = qsd_trajectory(model, psi0, grid, 43);
  double same = 0.0, other = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int k = 0; k < s.dim(); ++k) {
      same = std::max(same, std::abs(a.states[i][k] - b.states[i][k]));
      other = std::max(other, std::abs(a.states[i][k] - c.states[i][k]));
    }
  CHECK(same == 0.0);  // bitwise reproducible
  CHECK(other > 1e-8);
}

TEST_CASE("ensemble average is independent of the thread count") {
  const LindbladModel model =
      build_dephasing_model(2, 1.0, 1.0, Representation::dicke);
  const Vector psi0 = spin::basis_state(SpinJ(1.0), 1.0);
  const std::vector<double> grid{0.0, 0.005, 0.01};
  QsdOptions one;
  one.threads = 1;
  QsdOptions three;
  three.threads = 3;
  const TrajectoryEnsemble a = ensemble_average(model, psi0, grid, 130, 9, one);
  const TrajectoryEnsemble b =
      ensemble_average(model, psi0, grid, 130, 9, three);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    CHECK(linalg::max_abs_diff(a.averaged_states[gi],
                               b.averaged_states[gi]) == 0.0);
    CHECK(a.mz_mean[gi] == b.mz_mean[gi]);
    CHECK(a.mz_stderr[gi] == b.mz_stderr[gi]);
  }
}

TEST_CASE("ensemble mean tracks the master equation") {
  const LindbladModel model =
      build_dephasing_model(2, 1.0, 1.0, Representation::dicke);
  const SpinJ s(1.0);
  const Vector psi0 = spin::basis_state(s, 1.0);
  const std::vector<double> grid{0.0, 0.02, 0.05};
  QsdOptions opt;
  opt.max_step = 2e-4;
  opt.omega_scale = 2.0;
  const TrajectoryEnsemble ens =
      ensemble_average(model, psi0, grid, 512, 2024, opt);
  const EvolutionResult master =
      integrate_master(model, linalg::outer(psi0, psi0), grid);
  const Matrix jz = spin::build_spin_operators(s).jz;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double mz_master =
        linalg::trace(linalg::matmul(master.states[gi], jz)).real();
    const double tol = std::max(4.0 * ens.mz_stderr[gi], 0.02);
    CHECK(std::abs(ens.mz_mean[gi] - mz_master) < tol);
    CHECK(linalg::trace(ens.averaged_states[gi]).real() ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("magnetization histogram") {
  const SpinJ s(1.0);
  SUBCASE("default bins are unit intervals centered on the eigenvalues") {
    const auto edges = default_bin_edges(s);
    REQUIRE(edges.size() == 4);
    CHECK(edges.front() == doctest::Approx(-1.5));
    CHECK(edges.back() == doctest::Approx(1.5));
  }
  SUBCASE("diagonal populations land in the right bins") {
    Matrix rho(3, 3);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.3;
    rho(2, 2) = 0.5;
    const auto hist =
        magnetization_distribution(s, rho, default_bin_edges(s));
    CHECK(hist.probabilities[0] == doctest::Approx(0.2));
    CHECK(hist.probabilities[1] == doctest::Approx(0.3));
    CHECK(hist.probabilities[2] == doctest::Approx(0.5));
  }
  SUBCASE("bins must cover the spectrum and ascend") {
    Matrix rho(3, 3);
    CHECK_THROWS(magnetization_distribution(s, rho, {-0.5, 0.5}));
    CHECK_THROWS(magnetization_distribution(s, rho, {-1.5, -1.5, 1.5}));
  }
}

TEST_CASE("linear grid endpoints and validation") {
  const auto g = linear_grid(0.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(0.5));
  CHECK_THROWS(linear_grid(0.0, 1.0, 1));
  CHECK_THROWS(linear_grid(1.0, 0.0, 5));
}

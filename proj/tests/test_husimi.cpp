#include <cmath>
#include <random>

#include "doctest.h"
#include "macrospin/husimi.hpp"

using namespace macrospin;
using husimi::CoherentBasis;
using husimi::QDistribution;
using husimi::SlotPartition;
using husimi::SphereGrid;
using linalg::cplx;
using linalg::Matrix;
using linalg::Vector;
using spin::SpinJ;

namespace {

Matrix pure_density(const Vector& psi) { return linalg::outer(psi, psi); }

// integral of Q over the polar cap theta < a for rho = |+j><+j| is
// 1 - cos^(2(2j+1))(a/2), by substituting u = cos^2(theta/2)
double cap_weight(const SpinJ& s, double a) {
  const double u = std::pow(std::cos(a / 2.0), 2);
  return 1.0 - std::pow(u, s.two_j() + 1);
}

}  // namespace

TEST_CASE("sphere quadrature") {
  const SphereGrid g = husimi::make_grid(64, 64);

  SUBCASE("weights sum to the full solid angle") {
    double s = 0.0;
    for (double w : g.weights) s += w;
    CHECK(s == doctest::Approx(4.0 * M_PI).epsilon(1e-13));
  }
  SUBCASE("integrates cos^2(theta) exactly") {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      s += std::pow(std::cos(g.nodes[i].theta), 2) * g.weights[i];
    CHECK(s == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-13));
  }
  SUBCASE("resolution rule") {
    const SphereGrid d5 = husimi::default_grid(SpinJ(5.0));
    CHECK(d5.n_theta == 88);
    CHECK(d5.n_phi == 88);
    CHECK(husimi::default_grid(SpinJ(0.5)).n_theta == 64);
  }
  SUBCASE("rejects grids too coarse to be meaningful") {
    CHECK_THROWS(husimi::make_grid(4, 64));
  }
}

TEST_CASE("coherent-state identity resolution on the grid") {
  for (double j : {0.5, 2.0, 5.0}) {
    const SpinJ s(j);
    CHECK(husimi::identity_resolution_residual(s, husimi::default_grid(s)) <
          1e-10);
  }
}

TEST_CASE("Q-distribution basics for j=5") {
  const SpinJ s(5.0);
  const SphereGrid g = husimi::default_grid(s);
  const CoherentBasis basis(s, g);
  const Matrix north = pure_density(spin::coherent_state(s, {0.0, 0.0}));

  SUBCASE("normalization") {
    const QDistribution q = husimi::q_distribution(north, basis);
    CHECK(q.integral() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Q of a coherent state is ((2j+1)/4pi) cos^(4j)(Theta/2)") {
    const QDistribution q = husimi::q_distribution(north, basis);
    const double scale = s.dim() / (4.0 * M_PI);
    for (std::size_t i = 0; i < g.size(); i += 97) {
      const double expect =
          scale * std::pow(std::cos(g.nodes[i].theta / 2.0), 4.0 * s.j());
      CHECK(std::abs(q.values[i] - expect) < 1e-12);
    }
  }
  SUBCASE("total variation vanishes on identical states, is large for poles") {
    const Matrix south = pure_density(spin::coherent_state(s, {M_PI, 0.0}));
    const QDistribution qn = husimi::q_distribution(north, basis);
    const QDistribution qs = husimi::q_distribution(south, basis);
    CHECK(qn.total_variation(qn) == doctest::Approx(0.0));
    CHECK(qn.total_variation(qs) > 0.9);
    CHECK(qn.total_variation(qs) <= 1.0 + 1e-12);
  }
}

TEST_CASE("slot partitions") {
  SUBCASE("hemispheres cover the sphere with no overlap") {
    const SlotPartition p = SlotPartition::hemispheres();
    CHECK(p.slot_of({0.3, 1.0}) == 0);
    CHECK(p.slot_of({M_PI / 2.0, 1.0}) == 1);  // boundary goes south
    CHECK(p.slot_of({M_PI, 0.0}) == 1);
    const SphereGrid g = husimi::make_grid(32, 32);
    CHECK_NOTHROW(p.assign(g));
  }
  SUBCASE("three-region labels and boundaries") {
    const SlotPartition p = SlotPartition::three_region();
    CHECK(p.labels[0] == "north");
    CHECK(p.labels[1] == "equator");
    CHECK(p.labels[2] == "south");
    CHECK(p.slot_of({M_PI / 3.0 - 1e-9, 0.0}) == 0);
    CHECK(p.slot_of({M_PI / 2.0, 3.0}) == 1);
    CHECK(p.slot_of({M_PI - 1e-9, 0.0}) == 2);
  }
  SUBCASE("coarse-graining criterion scales with sqrt(j)") {
    const SlotPartition hemi = SlotPartition::hemispheres();
    CHECK_FALSE(hemi.well_coarse_grained(SpinJ(1.0)));
    CHECK(hemi.well_coarse_grained(SpinJ(5.0)));
    CHECK(hemi.well_coarse_grained(SpinJ(10.0)));
  }
}

TEST_CASE("slot probabilities match the closed-form cap weights") {
  const SpinJ s(5.0);
  const SphereGrid g = husimi::default_grid(s);
  const CoherentBasis basis(s, g);
  const QDistribution q = husimi::q_distribution(
      pure_density(spin::coherent_state(s, {0.0, 0.0})), basis);

  // slot boundaries cut through quadrature cells, so the node-assignment
  // integral carries an O(1/n_theta) boundary error on top of the exact
  // closed forms
  SUBCASE("hemispheres") {
    const auto w = husimi::slot_probabilities(q, SlotPartition::hemispheres());
    CHECK(std::abs(w[0] - cap_weight(s, M_PI / 2.0)) < 5e-3);
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("pi/3 polar caps") {
    const auto w = husimi::slot_probabilities(q, SlotPartition::three_region());
    // 1 - (3/4)^11
    CHECK(std::abs(w[0] - (1.0 - std::pow(0.75, 11))) < 5e-3);
    CHECK(std::abs(w[1] - (std::pow(0.75, 11) - std::pow(0.25, 11))) < 5e-3);
    CHECK(w[1] < 0.05);
    CHECK(w[2] < 1e-6);
    CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("cap weight approaches the closed form as the grid refines") {
    const SphereGrid fine = husimi::make_grid(704, 64);
    const CoherentBasis fb(s, fine);
    const QDistribution fq = husimi::q_distribution(
        pure_density(spin::coherent_state(s, {0.0, 0.0})), fb);
    const auto w =
        husimi::slot_probabilities(fq, SlotPartition::three_region());
    CHECK(std::abs(w[0] - cap_weight(s, M_PI / 3.0)) < 1e-3);
  }
}

TEST_CASE("slot POVM") {
  const SpinJ s(5.0);
  const SphereGrid g = husimi::default_grid(s);
  const CoherentBasis basis(s, g);
  const auto povm = husimi::build_povm(SlotPartition::three_region(), basis);

  SUBCASE("elements are PSD, Hermitian, and sum to the identity") {
    CHECK(povm.completeness_residual < 1e-10);
    for (const Matrix& p : povm.elements) {
      CHECK(linalg::hermiticity_defect(p) < 1e-12);
      CHECK(linalg::min_eigval_hermitian(p) > -1e-12);
    }
  }
  SUBCASE("azimuthally symmetric slots give diagonal elements") {
    for (const Matrix& p : povm.elements)
      for (int r = 0; r < s.dim(); ++r)
        for (int c = 0; c < s.dim(); ++c)
          if (r != c) CHECK(std::abs(p(r, c)) < 1e-10);
  }
  SUBCASE("Kraus operators reproduce the elements: M^dag M = P") {
    for (std::size_t k = 0; k < povm.elements.size(); ++k) {
      const Matrix mm = linalg::matmul(linalg::dagger(povm.kraus[k]),
                                       povm.kraus[k]);
      CHECK(linalg::max_abs_diff(mm, povm.elements[k]) < 1e-10);
    }
  }
  SUBCASE("element expectation equals the Q slot probability") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector psi(s.dim());
    for (auto& x : psi) x = {u(rng), u(rng)};
    linalg::normalize(psi);
    const Matrix rho = pure_density(psi);
    const auto w = husimi::slot_probabilities(
        husimi::q_distribution(rho, basis), povm.partition);
    for (std::size_t k = 0; k < povm.elements.size(); ++k) {
      const double tr =
          linalg::trace(linalg::matmul(rho, povm.elements[k])).real();
      CHECK(tr == doctest::Approx(w[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("measurement reduction") {
  const SpinJ s(5.0);
  const SphereGrid g = husimi::default_grid(s);
  const CoherentBasis basis(s, g);

  SUBCASE("a single whole-sphere slot leaves the state untouched") {
    const auto povm = husimi::build_povm(SlotPartition::whole_sphere(), basis);
    const Matrix rho = pure_density(spin::coherent_state(s, {1.2, 0.4}));
    const auto red = husimi::kraus_reduce(rho, povm, 0);
    REQUIRE(red.has_value());
    CHECK(red->probability == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(linalg::max_abs_diff(red->rho, rho) < 1e-8);
  }
  SUBCASE("outcome-weighted reductions recombine into sum_k M_k rho M_k^dag") {
    const auto povm = husimi::build_povm(SlotPartition::three_region(), basis);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector psi(s.dim());
    for (auto& x : psi) x = {u(rng), u(rng)};
    linalg::normalize(psi);
    const Matrix rho = pure_density(psi);

    Matrix mix(s.dim(), s.dim());
    double total = 0.0;
    for (std::size_t k = 0; k < povm.elements.size(); ++k) {
      const auto red = husimi::kraus_reduce(rho, povm, k);
      REQUIRE(red.has_value());
      Matrix term = red->rho;
      term *= cplx{red->probability, 0.0};
      mix += term;
      total += red->probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    Matrix direct(s.dim(), s.dim());
    for (std::size_t k = 0; k < povm.kraus.size(); ++k)
      direct += linalg::matmul(
          povm.kraus[k], linalg::matmul(rho, linalg::dagger(povm.kraus[k])));
    CHECK(linalg::max_abs_diff(mix, direct) < 1e-10);
    CHECK(std::abs(linalg::trace(mix).real() - 1.0) < 1e-10);
  }
  SUBCASE("unreachable outcomes come back empty") {
    const auto povm = husimi::build_povm(SlotPartition::three_region(), basis);
    Matrix north(s.dim(), s.dim());
    north(s.dim() - 1, s.dim() - 1) = 1.0;
    // the antipodal cap weight (1/4)^11 ~ 2e-7 sits below this floor
    CHECK_FALSE(husimi::kraus_reduce(north, povm, 2, 1e-6).has_value());
  }
}

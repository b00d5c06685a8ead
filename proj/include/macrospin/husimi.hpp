#pragma once
// Husimi Q-distributions on a sphere quadrature grid, coarse-grained slot
// partitions, the coherent-state POVM they induce, and measurement
// reduction via the principal-square-root Kraus operators.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "macrospin/spin.hpp"

namespace macrospin::husimi {

using linalg::cplx;
using linalg::Matrix;
using linalg::Vector;
using spin::SphericalAngle;
using spin::SpinJ;

struct SphereGrid {
  std::vector<SphericalAngle> nodes;
  std::vector<double> weights;  // steradians, sum to 4*pi
  int n_theta = 0, n_phi = 0;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre in cos(theta) crossed with uniform phi
SphereGrid make_grid(int n_theta, int n_phi);
// resolution rule: n_theta = n_phi = max(64, 8*(2j+1))
SphereGrid default_grid(const SpinJ& s);

// residual of (2j+1)/(4pi) sum_i w_i |Omega_i><Omega_i| against identity
double identity_resolution_residual(const SpinJ& s, const SphereGrid& grid);

struct SlotRect {
  double theta_lo, theta_hi;  // [lo, hi), hi == pi inclusive
  double phi_lo, phi_hi;      // [lo, hi), hi == 2*pi inclusive
  bool contains(const SphericalAngle& a) const;
};

struct SlotPartition {
  std::vector<std::vector<SlotRect>> slots;
  std::vector<std::string> labels;
  double coarse_graining_scale = 0.0;  // smallest slot angular extent

  std::size_t n_slots() const { return slots.size(); }
  // true when coarse_graining_scale * sqrt(j) >= 3
  bool well_coarse_grained(const SpinJ& s) const;
  // index of the slot containing the angle; throws unless exactly one does
  int slot_of(const SphericalAngle& a) const;
  // per-node slot index, validated over the whole grid
  std::vector<int> assign(const SphereGrid& grid) const;

  static SlotPartition whole_sphere();
  static SlotPartition hemispheres();
  // north cap theta < cap, band, south cap theta > pi - cap
  static SlotPartition three_region(double cap = M_PI / 3.0);
};

// rows are coherent-state amplitude vectors, one per grid node
struct CoherentBasis {
  SpinJ j;
  const SphereGrid* grid;
  Matrix states;  // n_nodes x (2j+1)

  CoherentBasis(const SpinJ& s, const SphereGrid& g);
};

struct QDistribution {
  std::vector<double> values;  // 1/steradian, at the grid nodes
  const SphereGrid* grid;

  double integral() const;
  // (1/2) integral |q - other| d^2Omega
  double total_variation(const QDistribution& other) const;
};

QDistribution q_distribution(const Matrix& rho, const CoherentBasis& basis);

std::vector<double> slot_probabilities(const QDistribution& q,
                                       const std::vector<int>& node_slots,
                                       std::size_t n_slots);
std::vector<double> slot_probabilities(const QDistribution& q,
                                       const SlotPartition& partition);

struct PovmSet {
  std::vector<Matrix> elements;  // P_k
  std::vector<Matrix> kraus;     // principal square roots M_k
  SlotPartition partition;
  double completeness_residual = 0.0;
};

PovmSet build_povm(const SlotPartition& partition, const CoherentBasis& basis,
                   double completeness_tolerance = 1e-8);

struct Reduction {
  double probability;
  Matrix rho;  // normalized post-measurement state
};

// empty when the outcome probability is below prob_floor (unreachable)
std::optional<Reduction> kraus_reduce(const Matrix& rho, const PovmSet& povm,
                                      std::size_t k,
                                      double prob_floor = 1e-12);

}  // namespace macrospin::husimi

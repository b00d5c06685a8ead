#include "macrospin/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace macrospin::husimi {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double z1, pp;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::abs(z - z1) > 1e-15);
    double p1 = 1.0, p2 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    x[i - 1] = -z;
    x[n - i] = z;
    w[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - i] = w[i - 1];
  }
}

}  // namespace

SphereGrid make_grid(int n_theta, int n_phi) {
  if (n_theta < 8 || n_phi < 8)
    throw std::invalid_argument("grid resolution must be at least 8x8");
  std::vector<double> ct, wt;
  gauss_legendre(n_theta, ct, wt);
  SphereGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  g.weights.reserve(g.nodes.capacity());
  const double dphi = 2.0 * M_PI / n_phi;
  for (int it = 0; it < n_theta; ++it) {
    const double theta = std::acos(std::clamp(ct[it], -1.0, 1.0));
    for (int ip = 0; ip < n_phi; ++ip) {
      g.nodes.push_back({theta, ip * dphi});
      g.weights.push_back(wt[it] * dphi);
    }
  }
  return g;
}

SphereGrid default_grid(const SpinJ& s) {
  const int n = std::max(64, 8 * s.dim());
  return make_grid(n, n);
}

double identity_resolution_residual(const SpinJ& s, const SphereGrid& grid) {
  const int d = s.dim();
  Matrix acc(d, d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector psi = spin::coherent_state(s, grid.nodes[i]);
    const double w = grid.weights[i] * d / kFourPi;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        acc(r, c) += w * psi[r] * std::conj(psi[c]);
  }
  return linalg::max_abs_diff(acc, Matrix::identity(d));
}

bool SlotRect::contains(const SphericalAngle& a) const {
  const bool theta_in =
      a.theta >= theta_lo &&
      (a.theta < theta_hi || (theta_hi >= M_PI && a.theta <= M_PI));
  const bool phi_in =
      a.phi >= phi_lo &&
      (a.phi < phi_hi || (phi_hi >= 2.0 * M_PI && a.phi <= 2.0 * M_PI));
  return theta_in && phi_in;
}

bool SlotPartition::well_coarse_grained(const SpinJ& s) const {
  return coarse_graining_scale * std::sqrt(s.j()) >= 3.0;
}

int SlotPartition::slot_of(const SphericalAngle& a) const {
  int found = -1;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    for (const SlotRect& r : slots[k]) {
      if (r.contains(a)) {
        if (found >= 0 && found != static_cast<int>(k))
          throw std::runtime_error("slot partition overlaps at a grid node");
        found = static_cast<int>(k);
        break;
      }
    }
  }
  if (found < 0)
    throw std::runtime_error("slot partition does not cover the sphere");
  return found;
}

std::vector<int> SlotPartition::assign(const SphereGrid& grid) const {
  std::vector<int> idx(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) idx[i] = slot_of(grid.nodes[i]);
  return idx;
}

SlotPartition SlotPartition::whole_sphere() {
  SlotPartition p;
  p.slots = {{SlotRect{0.0, M_PI, 0.0, 2.0 * M_PI}}};
  p.labels = {"sphere"};
  p.coarse_graining_scale = M_PI;
  return p;
}

SlotPartition SlotPartition::hemispheres() {
  SlotPartition p;
  p.slots = {{SlotRect{0.0, M_PI / 2.0, 0.0, 2.0 * M_PI}},
             {SlotRect{M_PI / 2.0, M_PI, 0.0, 2.0 * M_PI}}};
  p.labels = {"north", "south"};
  p.coarse_graining_scale = M_PI / 2.0;
  return p;
}

SlotPartition SlotPartition::three_region(double cap) {
  if (cap <= 0.0 || cap >= M_PI / 2.0)
    throw std::invalid_argument("cap angle must lie in (0, pi/2)");
  SlotPartition p;
  p.slots = {{SlotRect{0.0, cap, 0.0, 2.0 * M_PI}},
             {SlotRect{cap, M_PI - cap, 0.0, 2.0 * M_PI}},
             {SlotRect{M_PI - cap, M_PI, 0.0, 2.0 * M_PI}}};
  p.labels = {"north", "equator", "south"};
  p.coarse_graining_scale = std::min(cap, M_PI - 2.0 * cap);
  return p;
}

CoherentBasis::CoherentBasis(const SpinJ& s, const SphereGrid& g)
    : j(s), grid(&g), states(g.size(), s.dim()) {
  const int d = s.dim();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vector psi = spin::coherent_state(s, g.nodes[i]);
    for (int c = 0; c < d; ++c) states(i, c) = psi[c];
  }
}

double QDistribution::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += values[i] * grid->weights[i];
  return s;
}

double QDistribution::total_variation(const QDistribution& other) const {
  if (grid != other.grid)
    throw std::invalid_argument("total variation requires a shared grid");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += std::abs(values[i] - other.values[i]) * grid->weights[i];
  return 0.5 * s;
}

QDistribution q_distribution(const Matrix& rho, const CoherentBasis& basis) {
  const std::size_t n = basis.grid->size();
  const int d = basis.j.dim();
  const double scale = d / kFourPi;
  QDistribution q{std::vector<double>(n), basis.grid};
  Vector tmp(d);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx* psi = basis.states.data() + i * d;
    kernels::zgemv(d, d, 1.0, rho.data(), psi, 0.0, tmp.data());
    const double val = kernels::zdotc(d, psi, tmp.data()).real();
    q.values[i] = std::max(val, 0.0) * scale;
    if (val < -1e-12)
      throw std::runtime_error("Q-distribution negative beyond tolerance");
  }
  return q;
}

std::vector<double> slot_probabilities(const QDistribution& q,
                                       const std::vector<int>& node_slots,
                                       std::size_t n_slots) {
  std::vector<double> w(n_slots, 0.0);
  for (std::size_t i = 0; i < q.values.size(); ++i)
    w[node_slots[i]] += q.values[i] * q.grid->weights[i];
  return w;
}

std::vector<double> slot_probabilities(const QDistribution& q,
                                       const SlotPartition& partition) {
  return slot_probabilities(q, partition.assign(*q.grid), partition.n_slots());
}

PovmSet build_povm(const SlotPartition& partition, const CoherentBasis& basis,
                   double completeness_tolerance) {
  const SphereGrid& grid = *basis.grid;
  const int d = basis.j.dim();
  const double scale = d / kFourPi;
  const std::vector<int> node_slots = partition.assign(grid);

  PovmSet povm;
  povm.partition = partition;
  povm.elements.assign(partition.n_slots(), Matrix(d, d));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Matrix& p = povm.elements[node_slots[i]];
    const cplx* psi = basis.states.data() + i * static_cast<std::size_t>(d);
    const double w = grid.weights[i] * scale;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        p(r, c) += w * psi[r] * std::conj(psi[c]);
  }

  Matrix sum(d, d);
  for (const Matrix& p : povm.elements) sum += p;
  povm.completeness_residual = linalg::max_abs_diff(sum, Matrix::identity(d));
  if (povm.completeness_residual > completeness_tolerance)
    throw std::runtime_error(
        "POVM completeness residual exceeds tolerance; grid too coarse");

  povm.kraus.reserve(povm.elements.size());
  for (const Matrix& p : povm.elements)
    povm.kraus.push_back(linalg::sqrtm_psd(p));
  return povm;
}

std::optional<Reduction> kraus_reduce(const Matrix& rho, const PovmSet& povm,
                                      std::size_t k, double prob_floor) {
  const Matrix& p = povm.elements.at(k);
  const double w = linalg::trace(linalg::matmul(rho, p)).real();
  if (w <= prob_floor) return std::nullopt;
  const Matrix& m = povm.kraus[k];
  Matrix reduced = linalg::matmul(m, linalg::matmul(rho, linalg::dagger(m)));
  reduced *= cplx{1.0 / w, 0.0};
  return Reduction{w, std::move(reduced)};
}

}  // namespace macrospin::husimi

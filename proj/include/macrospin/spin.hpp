#pragma once
// Collective spin-j algebra: Dicke basis, spin coherent states, ladder
// operators, the two-level "macroscopic superposition" Hamiltonian, its
// N-qubit product-space form, and the symmetric-subspace correspondence.
//
// Dicke basis indexing: index i holds the J_z eigenvalue m = -j + i, so
// index 0 is |-j> (south) and index 2j is |+j> (north). Product-space
// qubit basis: bit k of the index is the state of qubit k, 1 = up.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "macrospin/linalg.hpp"

namespace macrospin::spin {

using linalg::cplx;
using linalg::Matrix;
using linalg::Vector;

class SpinJ {
 public:
  explicit SpinJ(double j) : two_j_(static_cast<int>(std::lround(2.0 * j))) {
    if (two_j_ < 1 || std::abs(2.0 * j - two_j_) > 1e-12)
      throw std::invalid_argument("j must be a half-integer >= 1/2");
  }
  static SpinJ from_qubits(int n) { return SpinJ(0.5 * n); }

  double j() const { return 0.5 * two_j_; }
  int two_j() const { return two_j_; }
  int dim() const { return two_j_ + 1; }
  int n_qubits() const { return two_j_; }
  // basis index of the J_z eigenvalue m
  int index_of(double m) const {
    return static_cast<int>(std::lround(m + j()));
  }
  double m_of(int index) const { return -j() + index; }

 private:
  int two_j_;
};

struct SphericalAngle {
  double theta;  // [0, pi]
  double phi;    // [0, 2*pi)
};

struct SpinOperators {
  Matrix jz, jplus, jminus;
};

// Radcliffe coherent state |Omega>; amplitude at m is
// binom(2j, j+m)^(1/2) cos^(j+m)(theta/2) sin^(j-m)(theta/2) e^(-i(j-m)phi).
Vector coherent_state(const SpinJ& s, const SphericalAngle& angle);

// |cos(Theta/2)|^(4j) with Theta the angle between the two directions
double coherent_overlap_sq(const SpinJ& s, const SphericalAngle& a,
                           const SphericalAngle& b);

SpinOperators build_spin_operators(const SpinJ& s);

// H = i*omega*(|-j><+j| - |+j><-j|), zero elsewhere
Matrix build_nonclassical_hamiltonian(const SpinJ& s, double omega);

// exp(-i H t) for Hermitian H
Matrix propagator(const Matrix& hamiltonian, double t);

Vector basis_state(const SpinJ& s, double m);

// --- N-qubit product space -------------------------------------------------

// Paper convention sigma^{+-} = sigma_x +- i sigma_y (twice the
// conventional ladder operators). Basis order (down, up).
Matrix pauli_z2();       // diag(-1, +1)
Matrix sigma_plus2();    // 2 |up><down|
Matrix sigma_minus2();   // 2 |down><up|

// op acting on qubit k of N, identity elsewhere
Matrix site_operator(int n_qubits, int site, const Matrix& op2);
// sum_k op_k
Matrix collective_sum(int n_qubits, const Matrix& op2);
// op_1 op_2 ... op_N (same single-site op on every qubit)
Matrix product_chain(int n_qubits, const Matrix& op2);

// Hermitian product-space Hamiltonian whose symmetric-subspace restriction
// equals 2^(N-1) times build_nonclassical_hamiltonian(j = N/2, omega).
Matrix build_product_hamiltonian(int n_qubits, double omega);

// diag magnetization m_z = (1/2) sum_i sigma_z_i in the product basis
Matrix magnetization_operator(int n_qubits);

// Dicke m -> normalized symmetric superposition of product states with
// j + m up-spins.
Vector symmetric_embed(const SpinJ& s, const Vector& dicke_state);
Matrix symmetric_embed_matrix(const SpinJ& s);  // 2^N x (2j+1) isometry

struct DickeProjection {
  Matrix rho;      // (2j+1) x (2j+1)
  double leakage;  // probability weight outside the symmetric subspace
};
DickeProjection dicke_project(const SpinJ& s, const Matrix& full_rho,
                              double leakage_tolerance = 1e-8);

double binomial(int n, int k);

}  // namespace macrospin::spin

#include "macrospin/spin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace macrospin::spin {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Vector coherent_state(const SpinJ& s, const SphericalAngle& angle) {
  const int d = s.dim();
  const int two_j = s.two_j();
  const double c = std::cos(0.5 * angle.theta);
  const double sn = std::sin(0.5 * angle.theta);
  Vector psi(d);
  for (int i = 0; i < d; ++i) {
    const int up = i;              // j + m
    const int down = two_j - i;    // j - m
    const double mag = std::sqrt(binomial(two_j, up)) * std::pow(c, up) *
                       std::pow(sn, down);
    psi[i] = mag * std::exp(cplx{0.0, -down * angle.phi});
  }
  return psi;
}

double coherent_overlap_sq(const SpinJ& s, const SphericalAngle& a,
                           const SphericalAngle& b) {
  const double cos_big =
      std::cos(a.theta) * std::cos(b.theta) +
      std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
  const double half_sq = 0.5 * (1.0 + std::clamp(cos_big, -1.0, 1.0));
  return std::pow(half_sq, s.two_j());
}

SpinOperators build_spin_operators(const SpinJ& s) {
  const int d = s.dim();
  const double j = s.j();
  SpinOperators ops{Matrix(d, d), Matrix(d, d), Matrix(d, d)};
  for (int i = 0; i < d; ++i) {
    const double m = s.m_of(i);
    ops.jz(i, i) = m;
    if (i + 1 < d)
      ops.jplus(i + 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  ops.jminus = linalg::dagger(ops.jplus);
  return ops;
}

Matrix build_nonclassical_hamiltonian(const SpinJ& s, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  const int d = s.dim();
  Matrix h(d, d);
  h(0, d - 1) = cplx{0.0, omega};   // <-j| H |+j>
  h(d - 1, 0) = cplx{0.0, -omega};  // <+j| H |-j>
  return h;
}

Matrix propagator(const Matrix& hamiltonian, double t) {
  return linalg::expm_i_hermitian(hamiltonian, t);
}

Vector basis_state(const SpinJ& s, double m) {
  Vector v(s.dim());
  v[s.index_of(m)] = 1.0;
  return v;
}

Matrix pauli_z2() {
  Matrix m(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

Matrix sigma_plus2() {
  Matrix m(2, 2);
  m(1, 0) = 2.0;
  return m;
}

Matrix sigma_minus2() {
  Matrix m(2, 2);
  m(0, 1) = 2.0;
  return m;
}

namespace {

void check_qubits(int n) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("qubit count out of supported range [1, 12]");
}

}  // namespace

Matrix site_operator(int n_qubits, int site, const Matrix& op2) {
  check_qubits(n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  Matrix m(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    const int bit = (col >> site) & 1u;
    for (int row_bit = 0; row_bit < 2; ++row_bit) {
      const cplx v = op2(row_bit, bit);
      if (v == cplx{0.0, 0.0}) continue;
      const std::size_t row =
          (col & ~(std::size_t{1} << site)) |
          (static_cast<std::size_t>(row_bit) << site);
      m(row, col) += v;
    }
  }
  return m;
}

Matrix collective_sum(int n_qubits, const Matrix& op2) {
  check_qubits(n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  Matrix m(dim, dim);
  for (int k = 0; k < n_qubits; ++k) m += site_operator(n_qubits, k, op2);
  return m;
}

Matrix product_chain(int n_qubits, const Matrix& op2) {
  check_qubits(n_qubits);
  Matrix m = site_operator(n_qubits, 0, op2);
  for (int k = 1; k < n_qubits; ++k)
    m = linalg::matmul(site_operator(n_qubits, k, op2), m);
  return m;
}

Matrix build_product_hamiltonian(int n_qubits, double omega) {
  check_qubits(n_qubits);
  // The raising/lowering chain written with sigma^{+-} = sigma_x +- i sigma_y
  // is anti-Hermitian; the i in front restores Hermiticity and makes the
  // symmetric-subspace restriction equal 2^(N-1) times the two-level form.
  Matrix h = product_chain(n_qubits, sigma_minus2());
  h -= product_chain(n_qubits, sigma_plus2());
  h *= cplx{0.0, 0.5 * omega};
  return h;
}

Matrix magnetization_operator(int n_qubits) {
  check_qubits(n_qubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    m(i, i) = std::popcount(i) - 0.5 * n_qubits;
  return m;
}

Matrix symmetric_embed_matrix(const SpinJ& s) {
  const int n = s.n_qubits();
  check_qubits(n);
  const std::size_t dim = std::size_t{1} << n;
  Matrix e(dim, s.dim());
  for (std::size_t b = 0; b < dim; ++b) {
    const int ups = std::popcount(b);
    e(b, ups) = 1.0 / std::sqrt(binomial(n, ups));
  }
  return e;
}

Vector symmetric_embed(const SpinJ& s, const Vector& dicke_state) {
  return linalg::matvec(symmetric_embed_matrix(s), dicke_state);
}

DickeProjection dicke_project(const SpinJ& s, const Matrix& full_rho,
                              double leakage_tolerance) {
  const Matrix e = symmetric_embed_matrix(s);
  const Matrix edag = linalg::dagger(e);
  Matrix rho_d = linalg::matmul(edag, linalg::matmul(full_rho, e));
  const double inside = linalg::trace(rho_d).real();
  const double total = linalg::trace(full_rho).real();
  DickeProjection out{std::move(rho_d), total - inside};
  if (out.leakage > leakage_tolerance)
    throw std::runtime_error(
        "state leaks outside the symmetric subspace (leakage " +
        std::to_string(out.leakage) + ")");
  return out;
}

}  // namespace macrospin::spin

#include "macrospin/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace macrospin::linalg {

namespace ker = macrospin::kernels;

Matrix& Matrix::operator+=(const Matrix& o) {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  ker::zaxpy(a_.size(), 1.0, o.a_.data(), a_.data());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  ker::zaxpy(a_.size(), -1.0, o.a_.data(), a_.data());
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  ker::zscal(a_.size(), s, a_.data());
  return *this;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  ker::zgemm_acc(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
  return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
  assert(a.cols() == x.size());
  Vector y(a.rows());
  ker::zgemv(a.rows(), a.cols(), 1.0, a.data(), x.data(), 0.0, y.data());
  return y;
}

Matrix dagger(const Matrix& a) {
  Matrix d(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d(j, i) = std::conj(a(i, j));
  return d;
}

cplx trace(const Matrix& a) {
  assert(a.rows() == a.cols());
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

Matrix outer(const Vector& u, const Vector& v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

cplx inner(const Vector& x, const Vector& y) {
  assert(x.size() == y.size());
  return ker::zdotc(x.size(), x.data(), y.data());
}

double norm(const Vector& x) { return std::sqrt(inner(x, x).real()); }

void normalize(Vector& x) {
  const double n = norm(x);
  if (n <= 0.0) throw std::runtime_error("cannot normalize zero vector");
  ker::zscal(x.size(), 1.0 / n, x.data());
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i]));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double hermiticity_defect(const Matrix& a) {
  assert(a.rows() == a.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

namespace {

using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMat> emap(const Matrix& a) {
  return {a.data(), static_cast<Eigen::Index>(a.rows()),
          static_cast<Eigen::Index>(a.cols())};
}

void solve_hermitian(const Matrix& a, Eigen::SelfAdjointEigenSolver<EMat>& es) {
  assert(a.rows() == a.cols());
  es.compute(emap(a));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigendecomposition failed");
}

}  // namespace

std::vector<double> eigvals_hermitian(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<EMat> es;
  solve_hermitian(a, es);
  const auto& w = es.eigenvalues();
  return {w.data(), w.data() + w.size()};
}

void eig_hermitian(const Matrix& a, Matrix& vecs, std::vector<double>& vals) {
  Eigen::SelfAdjointEigenSolver<EMat> es;
  solve_hermitian(a, es);
  const auto& w = es.eigenvalues();
  vals.assign(w.data(), w.data() + w.size());
  const std::size_t n = a.rows();
  vecs = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      vecs(i, j) = es.eigenvectors()(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j));
}

Matrix expm_i_hermitian(const Matrix& h, double t) {
  Matrix v;
  std::vector<double> w;
  eig_hermitian(h, v, w);
  const std::size_t n = h.rows();
  // U = V exp(-i w t) V^dag
  Matrix phase(n, n);
  for (std::size_t k = 0; k < n; ++k)
    phase(k, k) = std::exp(cplx{0.0, -w[k] * t});
  return matmul(matmul(v, phase), dagger(v));
}

Matrix sqrtm_psd(const Matrix& p) {
  Matrix v;
  std::vector<double> w;
  eig_hermitian(p, v, w);
  const std::size_t n = p.rows();
  Matrix root(n, n);
  for (std::size_t k = 0; k < n; ++k)
    root(k, k) = std::sqrt(std::max(w[k], 0.0));
  return matmul(matmul(v, root), dagger(v));
}

double min_eigval_hermitian(const Matrix& a) {
  const auto w = eigvals_hermitian(a);
  return w.front();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Matrix d = a;
  d -= b;
  double s = 0.0;
  for (double w : eigvals_hermitian(d)) s += std::abs(w);
  return 0.5 * s;
}

}  // namespace macrospin::linalg

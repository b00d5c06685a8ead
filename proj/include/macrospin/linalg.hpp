#pragma once
// Small dense complex matrices in row-major storage. Products run through
// the runtime-dispatched kernels; spectral decompositions are delegated to
// Eigen (all matrices here are at most a few thousand entries).

#include <complex>
#include <cstddef>
#include <vector>

#include "macrospin/kernels/kernels.hpp"

namespace macrospin::linalg {

using cplx = std::complex<double>;
using Vector = std::vector<cplx>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  std::size_t size() const { return a_.size(); }

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(cplx s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vector a_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix dagger(const Matrix& a);
cplx trace(const Matrix& a);
Matrix outer(const Vector& u, const Vector& v);  // |u><v|

cplx inner(const Vector& x, const Vector& y);  // <x|y>
double norm(const Vector& x);
void normalize(Vector& x);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double hermiticity_defect(const Matrix& a);  // max |a - a^dag| entry

// Eigen-backed; require a Hermitian (or PSD) input within roundoff.
std::vector<double> eigvals_hermitian(const Matrix& a);
// V and ascending eigenvalues with A = V diag(w) V^dag
void eig_hermitian(const Matrix& a, Matrix& vecs, std::vector<double>& vals);
Matrix expm_i_hermitian(const Matrix& h, double t);  // exp(-i H t)
Matrix sqrtm_psd(const Matrix& p);  // principal root, tiny negatives clamped
double min_eigval_hermitian(const Matrix& a);
double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace macrospin::linalg

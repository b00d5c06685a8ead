#include "macrospin/kernels/kernels.hpp"

namespace macrospin::kernels {
namespace {

void zaxpy_scalar(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void zscal_scalar(std::size_t n, cplx alpha, cplx* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

cplx zdotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx p = std::conj(x[i]) * y[i];
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

void zgemv_scalar(std::size_t m, std::size_t n, cplx alpha, const cplx* a,
                  const cplx* x, cplx beta, cplx* y) {
  for (std::size_t i = 0; i < m; ++i) {
    const cplx* row = a + i * n;
    cplx acc{0.0, 0.0};
    for (std::size_t jj = 0; jj < n; ++jj) acc += row[jj] * x[jj];
    y[i] = (beta == cplx{0.0, 0.0}) ? alpha * acc : alpha * acc + beta * y[i];
  }
}

void zgemm_acc_scalar(std::size_t m, std::size_t k, std::size_t n,
                      const cplx* a, const cplx* b, cplx* c) {
  for (std::size_t i = 0; i < m; ++i) {
    cplx* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a[i * k + l];
      if (ail == cplx{0.0, 0.0}) continue;
      const cplx* brow = b + l * n;
      for (std::size_t jj = 0; jj < n; ++jj) crow[jj] += ail * brow[jj];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{zaxpy_scalar, zscal_scalar, zdotc_scalar,
                             zgemv_scalar, zgemm_acc_scalar, "scalar"};
  return t;
}

}  // namespace macrospin::kernels

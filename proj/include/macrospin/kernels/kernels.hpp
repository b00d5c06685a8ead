#pragma once
// Complex double-precision arithmetic kernels used by the hot loops
// (density-matrix products, trajectory stepping, Q-function batch
// evaluation). A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. The two are
// equivalence-tested against each other.

#include <complex>
#include <cstddef>
#include <string_view>

namespace macrospin::kernels {

using cplx = std::complex<double>;

// y += alpha * x
using zaxpy_fn = void (*)(std::size_t n, cplx alpha, const cplx* x, cplx* y);
// x *= alpha
using zscal_fn = void (*)(std::size_t n, cplx alpha, cplx* x);
// sum_i conj(x_i) * y_i
using zdotc_fn = cplx (*)(std::size_t n, const cplx* x, const cplx* y);
// y = alpha * A x + beta * y, A row-major m x n
using zgemv_fn = void (*)(std::size_t m, std::size_t n, cplx alpha,
                          const cplx* a, const cplx* x, cplx beta, cplx* y);
// C += A B, all row-major, A m x k, B k x n, C m x n
using zgemm_acc_fn = void (*)(std::size_t m, std::size_t k, std::size_t n,
                              const cplx* a, const cplx* b, cplx* c);

struct KernelTable {
  zaxpy_fn zaxpy;
  zscal_fn zscal;
  zdotc_fn zdotc;
  zgemv_fn zgemv;
  zgemm_acc_fn zgemm_acc;
  std::string_view name;
};

const KernelTable& scalar_table();
bool avx2_supported();
const KernelTable* avx2_table();  // nullptr when unsupported

// Active table: AVX2 when available unless overridden via
// MACROSPIN_KERNELS=scalar|avx2 or set_active().
const KernelTable& active();
void set_active(const KernelTable& table);

inline void zaxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  active().zaxpy(n, alpha, x, y);
}
inline void zscal(std::size_t n, cplx alpha, cplx* x) {
  active().zscal(n, alpha, x);
}
inline cplx zdotc(std::size_t n, const cplx* x, const cplx* y) {
  return active().zdotc(n, x, y);
}
inline void zgemv(std::size_t m, std::size_t n, cplx alpha, const cplx* a,
                  const cplx* x, cplx beta, cplx* y) {
  active().zgemv(m, n, alpha, a, x, beta, y);
}
inline void zgemm_acc(std::size_t m, std::size_t k, std::size_t n,
                      const cplx* a, const cplx* b, cplx* c) {
  active().zgemm_acc(m, k, n, a, b, c);
}

}  // namespace macrospin::kernels

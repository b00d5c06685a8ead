// AVX2+FMA variants. Packed layout: one __m256d holds two complex doubles
// as [re0, im0, re1, im1]. Compiled with per-function target attributes so
// the rest of the project needs no special flags; callers go through the
// runtime-dispatched table and never reach this code on older CPUs.

#include "macrospin/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MACROSPIN_X86 1
#include <immintrin.h>
#else
#define MACROSPIN_X86 0
#endif

namespace macrospin::kernels {

#if MACROSPIN_X86

#define MS_AVX2 __attribute__((target("avx2,fma")))

namespace {

// [re, im] pairs swapped within each complex: [im0, re0, im1, re1]
MS_AVX2 inline __m256d swap_pairs(__m256d v) {
  return _mm256_permute_pd(v, 0b0101);
}

MS_AVX2 void zaxpy_avx2(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    const __m256d t = _mm256_mul_pd(ai, swap_pairs(v));
    const __m256d prod = _mm256_fmaddsub_pd(ar, v, t);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

MS_AVX2 void zscal_avx2(std::size_t n, cplx alpha, cplx* x) {
  double* xd = reinterpret_cast<double*>(x);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(xd + 2 * i);
    const __m256d t = _mm256_mul_pd(ai, swap_pairs(v));
    _mm256_storeu_pd(xd + 2 * i, _mm256_fmaddsub_pd(ar, v, t));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

// Reduce the two accumulators of a complex dot: acc1 carries products of
// matching components, acc2 products against the swapped partner.
// sign=-1 gives conjugated-x semantics for the real part pairing.
MS_AVX2 inline cplx reduce_nonconj(__m256d acc1, __m256d acc2) {
  alignas(32) double a1[4], a2[4];
  _mm256_store_pd(a1, acc1);
  _mm256_store_pd(a2, acc2);
  const double re = (a1[0] - a1[1]) + (a1[2] - a1[3]);
  const double im = (a2[0] + a2[1]) + (a2[2] + a2[3]);
  return {re, im};
}

MS_AVX2 cplx zdotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  // conj(x)*y: re = xr*yr + xi*yi, im = xr*yi - xi*yr
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d u = _mm256_loadu_pd(xd + 2 * i);
    const __m256d v = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(u, v, acc_re);
    acc_im = _mm256_fmadd_pd(u, swap_pairs(v), acc_im);
  }
  alignas(32) double a1[4], a2[4];
  _mm256_store_pd(a1, acc_re);
  _mm256_store_pd(a2, acc_im);
  double re = (a1[0] + a1[1]) + (a1[2] + a1[3]);
  double im = (a2[0] - a2[1]) + (a2[2] - a2[3]);
  for (; i < n; ++i) {
    const cplx p = std::conj(x[i]) * y[i];
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

MS_AVX2 void zgemv_avx2(std::size_t m, std::size_t n, cplx alpha,
                        const cplx* a, const cplx* x, cplx beta, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = reinterpret_cast<const double*>(a + i * n);
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    std::size_t jj = 0;
    for (; jj + 2 <= n; jj += 2) {
      const __m256d u = _mm256_loadu_pd(row + 2 * jj);
      const __m256d v = _mm256_loadu_pd(xd + 2 * jj);
      acc1 = _mm256_fmadd_pd(u, v, acc1);
      acc2 = _mm256_fmadd_pd(u, swap_pairs(v), acc2);
    }
    cplx acc = reduce_nonconj(acc1, acc2);
    for (; jj < n; ++jj) acc += a[i * n + jj] * x[jj];
    y[i] = (beta == cplx{0.0, 0.0}) ? alpha * acc : alpha * acc + beta * y[i];
  }
}

MS_AVX2 void zgemm_acc_avx2(std::size_t m, std::size_t k, std::size_t n,
                            const cplx* a, const cplx* b, cplx* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = reinterpret_cast<double*>(c + i * n);
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a[i * k + l];
      if (ail == cplx{0.0, 0.0}) continue;
      const double* brow = reinterpret_cast<const double*>(b + l * n);
      const __m256d ar = _mm256_set1_pd(ail.real());
      const __m256d ai = _mm256_set1_pd(ail.imag());
      std::size_t jj = 0;
      for (; jj + 2 <= n; jj += 2) {
        const __m256d v = _mm256_loadu_pd(brow + 2 * jj);
        const __m256d cv = _mm256_loadu_pd(crow + 2 * jj);
        const __m256d t = _mm256_mul_pd(ai, swap_pairs(v));
        const __m256d prod = _mm256_fmaddsub_pd(ar, v, t);
        _mm256_storeu_pd(crow + 2 * jj, _mm256_add_pd(cv, prod));
      }
      for (; jj < n; ++jj) c[i * n + jj] += ail * b[l * n + jj];
    }
  }
}

}  // namespace

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable* avx2_table() {
  if (!avx2_supported()) return nullptr;
  static const KernelTable t{zaxpy_avx2, zscal_avx2, zdotc_avx2, zgemv_avx2,
                             zgemm_acc_avx2, "avx2"};
  return &t;
}

#else  // !MACROSPIN_X86

bool avx2_supported() { return false; }
const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace macrospin::kernels

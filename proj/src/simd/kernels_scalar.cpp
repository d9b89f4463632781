// Scalar reference kernels. These define the semantics every SIMD variant is
// tested against.

#include <vector>

#include "floqflow/simd/kernels.hpp"

namespace floqflow::simd::detail {
namespace {

void dgemm_ref(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
               const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
               double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * ldc;
    if (beta == 0.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] *= beta;
    }
    if (alpha == 0.0) continue;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = alpha * (ta == Trans::no ? a[i * lda + p] : a[p * lda + i]);
      if (tb == Trans::no) {
        const double* brow = b + p * ldb;
        for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
      } else {
        for (std::size_t j = 0; j < n; ++j) crow[j] += aip * b[j * ldb + p];
      }
    }
  }
}

void axpy_ref(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_ref(std::size_t n, double alpha, const double* x, double beta, const double* y,
               double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

double sum_squares_ref(std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void rotate_pair_ref(std::size_t n, double c, double s, double* re0, double* im0, double* re1,
                     double* im1) {
  for (std::size_t j = 0; j < n; ++j) {
    const double r0 = re0[j], i0 = im0[j], r1 = re1[j], i1 = im1[j];
    re0[j] = c * r0 + s * i1;
    im0[j] = c * i0 - s * r1;
    re1[j] = c * r1 + s * i0;
    im1[j] = c * i1 - s * r0;
  }
}

void phase_row_ref(std::size_t n, double c, double s, double* re, double* im) {
  for (std::size_t j = 0; j < n; ++j) {
    const double r = re[j], i = im[j];
    re[j] = c * r + s * i;
    im[j] = c * i - s * r;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,     dgemm_ref,       axpy_ref,     axpby_ref,
                                 sum_squares_ref, rotate_pair_ref, phase_row_ref};
  return table;
}

}  // namespace floqflow::simd::detail

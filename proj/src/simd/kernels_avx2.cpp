// AVX2 + FMA variants. Compiled with -mavx2 -mfma.

#include <immintrin.h>

#include "gemm_driver.hpp"

namespace floqflow::simd::detail {
namespace {

struct Micro6x8 {
  static constexpr std::size_t mr = 6;
  static constexpr std::size_t nr = 8;
  static constexpr std::size_t mc = 96;
  static constexpr std::size_t kc = 256;
  static constexpr std::size_t nc = 1024;

  static void run(std::size_t kc_len, const double* ap, const double* bp, double* c,
                  std::size_t ldc) {
    __m256d acc[mr][2];
    for (std::size_t r = 0; r < mr; ++r) {
      acc[r][0] = _mm256_setzero_pd();
      acc[r][1] = _mm256_setzero_pd();
    }
    for (std::size_t p = 0; p < kc_len; ++p) {
      const __m256d b0 = _mm256_load_pd(bp + p * nr);
      const __m256d b1 = _mm256_load_pd(bp + p * nr + 4);
      const double* arow = ap + p * mr;
      for (std::size_t r = 0; r < mr; ++r) {
        const __m256d av = _mm256_broadcast_sd(arow + r);
        acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
        acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
      }
    }
    for (std::size_t r = 0; r < mr; ++r) {
      double* crow = c + r * ldc;
      _mm256_storeu_pd(crow, _mm256_add_pd(_mm256_loadu_pd(crow), acc[r][0]));
      _mm256_storeu_pd(crow + 4, _mm256_add_pd(_mm256_loadu_pd(crow + 4), acc[r][1]));
    }
  }
};

void dgemm_avx2(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
                const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
                double* c, std::size_t ldc) {
  packed_dgemm<Micro6x8>(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_avx2(std::size_t n, double alpha, const double* x, double beta, const double* y,
                double* out) {
  const __m256d av = _mm256_set1_pd(alpha);
  const __m256d bv = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

double sum_squares_avx2(std::size_t n, const double* x) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + i);
    const __m256d v1 = _mm256_loadu_pd(x + i + 4);
    s0 = _mm256_fmadd_pd(v0, v0, s0);
    s1 = _mm256_fmadd_pd(v1, v1, s1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void rotate_pair_avx2(std::size_t n, double c, double s, double* re0, double* im0, double* re1,
                      double* im1) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d r0 = _mm256_loadu_pd(re0 + j);
    const __m256d i0 = _mm256_loadu_pd(im0 + j);
    const __m256d r1 = _mm256_loadu_pd(re1 + j);
    const __m256d i1 = _mm256_loadu_pd(im1 + j);
    _mm256_storeu_pd(re0 + j, _mm256_fmadd_pd(sv, i1, _mm256_mul_pd(cv, r0)));
    _mm256_storeu_pd(im0 + j, _mm256_fnmadd_pd(sv, r1, _mm256_mul_pd(cv, i0)));
    _mm256_storeu_pd(re1 + j, _mm256_fmadd_pd(sv, i0, _mm256_mul_pd(cv, r1)));
    _mm256_storeu_pd(im1 + j, _mm256_fnmadd_pd(sv, r0, _mm256_mul_pd(cv, i1)));
  }
  for (; j < n; ++j) {
    const double r0 = re0[j], i0 = im0[j], r1 = re1[j], i1 = im1[j];
    re0[j] = c * r0 + s * i1;
    im0[j] = c * i0 - s * r1;
    re1[j] = c * r1 + s * i0;
    im1[j] = c * i1 - s * r0;
  }
}

void phase_row_avx2(std::size_t n, double c, double s, double* re, double* im) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d r = _mm256_loadu_pd(re + j);
    const __m256d i = _mm256_loadu_pd(im + j);
    _mm256_storeu_pd(re + j, _mm256_fmadd_pd(sv, i, _mm256_mul_pd(cv, r)));
    _mm256_storeu_pd(im + j, _mm256_fnmadd_pd(sv, r, _mm256_mul_pd(cv, i)));
  }
  for (; j < n; ++j) {
    const double r = re[j], i = im[j];
    re[j] = c * r + s * i;
    im[j] = c * i - s * r;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2,       dgemm_avx2,       axpy_avx2,
                                 axpby_avx2,      sum_squares_avx2, rotate_pair_avx2,
                                 phase_row_avx2};
  return table;
}

}  // namespace floqflow::simd::detail

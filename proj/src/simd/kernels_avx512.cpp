// AVX-512F variants. Compiled with -mavx512f -mavx512dq -mfma; only reached
// through the dispatch table after a CPU check.

#include <immintrin.h>

#include "gemm_driver.hpp"

namespace floqflow::simd::detail {
namespace {

struct Micro8x16 {
  static constexpr std::size_t mr = 8;
  static constexpr std::size_t nr = 16;
  static constexpr std::size_t mc = 128;
  static constexpr std::size_t kc = 256;
  static constexpr std::size_t nc = 1024;

  static void run(std::size_t kc_len, const double* ap, const double* bp, double* c,
                  std::size_t ldc) {
    __m512d acc[mr][2];
    for (std::size_t r = 0; r < mr; ++r) {
      acc[r][0] = _mm512_setzero_pd();
      acc[r][1] = _mm512_setzero_pd();
    }
    for (std::size_t p = 0; p < kc_len; ++p) {
      const __m512d b0 = _mm512_load_pd(bp + p * nr);
      const __m512d b1 = _mm512_load_pd(bp + p * nr + 8);
      const double* arow = ap + p * mr;
      for (std::size_t r = 0; r < mr; ++r) {
        const __m512d av = _mm512_set1_pd(arow[r]);
        acc[r][0] = _mm512_fmadd_pd(av, b0, acc[r][0]);
        acc[r][1] = _mm512_fmadd_pd(av, b1, acc[r][1]);
      }
    }
    for (std::size_t r = 0; r < mr; ++r) {
      double* crow = c + r * ldc;
      _mm512_storeu_pd(crow, _mm512_add_pd(_mm512_loadu_pd(crow), acc[r][0]));
      _mm512_storeu_pd(crow + 8, _mm512_add_pd(_mm512_loadu_pd(crow + 8), acc[r][1]));
    }
  }
};

void dgemm_avx512(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
                  double* c, std::size_t ldc) {
  packed_dgemm<Micro8x16>(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void axpy_avx512(std::size_t n, double alpha, const double* x, double* y) {
  const __m512d av = _mm512_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm512_storeu_pd(y + i, _mm512_fmadd_pd(av, _mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_avx512(std::size_t n, double alpha, const double* x, double beta, const double* y,
                  double* out) {
  const __m512d av = _mm512_set1_pd(alpha);
  const __m512d bv = _mm512_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d t = _mm512_mul_pd(bv, _mm512_loadu_pd(y + i));
    _mm512_storeu_pd(out + i, _mm512_fmadd_pd(av, _mm512_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

double sum_squares_avx512(std::size_t n, const double* x) {
  __m512d s0 = _mm512_setzero_pd();
  __m512d s1 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m512d v0 = _mm512_loadu_pd(x + i);
    const __m512d v1 = _mm512_loadu_pd(x + i + 8);
    s0 = _mm512_fmadd_pd(v0, v0, s0);
    s1 = _mm512_fmadd_pd(v1, v1, s1);
  }
  double s = _mm512_reduce_add_pd(_mm512_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void rotate_pair_avx512(std::size_t n, double c, double s, double* re0, double* im0, double* re1,
                        double* im1) {
  const __m512d cv = _mm512_set1_pd(c);
  const __m512d sv = _mm512_set1_pd(s);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m512d r0 = _mm512_loadu_pd(re0 + j);
    const __m512d i0 = _mm512_loadu_pd(im0 + j);
    const __m512d r1 = _mm512_loadu_pd(re1 + j);
    const __m512d i1 = _mm512_loadu_pd(im1 + j);
    _mm512_storeu_pd(re0 + j, _mm512_fmadd_pd(sv, i1, _mm512_mul_pd(cv, r0)));
    _mm512_storeu_pd(im0 + j, _mm512_fnmadd_pd(sv, r1, _mm512_mul_pd(cv, i0)));
    _mm512_storeu_pd(re1 + j, _mm512_fmadd_pd(sv, i0, _mm512_mul_pd(cv, r1)));
    _mm512_storeu_pd(im1 + j, _mm512_fnmadd_pd(sv, r0, _mm512_mul_pd(cv, i1)));
  }
  for (; j < n; ++j) {
    const double r0 = re0[j], i0 = im0[j], r1 = re1[j], i1 = im1[j];
    re0[j] = c * r0 + s * i1;
    im0[j] = c * i0 - s * r1;
    re1[j] = c * r1 + s * i0;
    im1[j] = c * i1 - s * r0;
  }
}

void phase_row_avx512(std::size_t n, double c, double s, double* re, double* im) {
  const __m512d cv = _mm512_set1_pd(c);
  const __m512d sv = _mm512_set1_pd(s);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m512d r = _mm512_loadu_pd(re + j);
    const __m512d i = _mm512_loadu_pd(im + j);
    _mm512_storeu_pd(re + j, _mm512_fmadd_pd(sv, i, _mm512_mul_pd(cv, r)));
    _mm512_storeu_pd(im + j, _mm512_fnmadd_pd(sv, r, _mm512_mul_pd(cv, i)));
  }
  for (; j < n; ++j) {
    const double r = re[j], i = im[j];
    re[j] = c * r + s * i;
    im[j] = c * i - s * r;
  }
}

}  // namespace

const KernelTable& avx512_table() {
  static const KernelTable table{Isa::avx512,       dgemm_avx512,       axpy_avx512,
                                 axpby_avx512,      sum_squares_avx512, rotate_pair_avx512,
                                 phase_row_avx512};
  return table;
}

}  // namespace floqflow::simd::detail

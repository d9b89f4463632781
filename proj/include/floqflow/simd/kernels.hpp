#pragma once

#include <cstddef>

#include "floqflow/simd/isa.hpp"

namespace floqflow::simd {

enum class Trans : unsigned char { no, yes };

// Row-major C(m x n) = alpha * op(A) * op(B) + beta * C, op(A) is m x k.
using DgemmFn = void (*)(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k,
                         double alpha, const double* a, std::size_t lda, const double* b,
                         std::size_t ldb, double beta, double* c, std::size_t ldc);

// y += alpha * x
using AxpyFn = void (*)(std::size_t n, double alpha, const double* x, double* y);

// out = alpha * x + beta * y (out may alias x or y)
using AxpbyFn = void (*)(std::size_t n, double alpha, const double* x, double beta,
                         const double* y, double* out);

using SumSquaresFn = double (*)(std::size_t n, const double* x);

// Complex rows stored as split planes. Applies cos(t) - i sin(t) sigma^x to the
// row pair (u0, u1):  u0' = c u0 - i s u1,  u1' = c u1 - i s u0.
using RotatePairFn = void (*)(std::size_t n, double c, double s, double* re0, double* im0,
                              double* re1, double* im1);

// Multiplies a complex row by (c - i s).
using PhaseRowFn = void (*)(std::size_t n, double c, double s, double* re, double* im);

struct KernelTable {
  Isa isa;
  DgemmFn dgemm;
  AxpyFn axpy;
  AxpbyFn axpby;
  SumSquaresFn sum_squares;
  RotatePairFn rotate_pair;
  PhaseRowFn phase_row;
};

const KernelTable& kernels(Isa isa);

// Table for active_isa().
const KernelTable& kernels();

namespace detail {
const KernelTable& scalar_table();
#if FLOQFLOW_HAVE_AVX2
const KernelTable& avx2_table();
#endif
#if FLOQFLOW_HAVE_AVX512
const KernelTable& avx512_table();
#endif
}  // namespace detail

}  // namespace floqflow::simd

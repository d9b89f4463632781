#pragma once

// Cache-blocked, packed GEMM driver shared by the SIMD variants. The micro-kernel
// type supplies the register tile (mr x nr) and computes C_tile += Ap * Bp over a
// packed k-slice. Edge tiles go through a zero-padded scratch tile.

#include <algorithm>
#include <cstddef>

#include "floqflow/aligned.hpp"
#include "floqflow/simd/kernels.hpp"

namespace floqflow::simd::detail {

template <class Micro>
void packed_dgemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, double alpha,
                  const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
                  double* c, std::size_t ldc) {
  constexpr std::size_t MR = Micro::mr;
  constexpr std::size_t NR = Micro::nr;
  constexpr std::size_t MC = Micro::mc;
  constexpr std::size_t KC = Micro::kc;
  constexpr std::size_t NC = Micro::nc;
  static_assert(MC % MR == 0 && NC % NR == 0);

  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * ldc;
    if (beta == 0.0) {
      std::fill(crow, crow + n, 0.0);
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] *= beta;
    }
  }
  if (alpha == 0.0 || k == 0) return;

  thread_local AlignedDoubles apack;
  thread_local AlignedDoubles bpack;
  apack.resize(MC * KC);
  bpack.resize(KC * NC);
  alignas(64) double edge[MR * NR];

  for (std::size_t jc = 0; jc < n; jc += NC) {
    const std::size_t nc = std::min(NC, n - jc);
    for (std::size_t pc = 0; pc < k; pc += KC) {
      const std::size_t kc = std::min(KC, k - pc);

      // B block -> NR-wide panels, k-major inside each panel.
      for (std::size_t jr = 0; jr < nc; jr += NR) {
        double* panel = bpack.data() + jr * kc;
        const std::size_t w = std::min(NR, nc - jr);
        for (std::size_t p = 0; p < kc; ++p) {
          double* dst = panel + p * NR;
          if (tb == Trans::no) {
            const double* src = b + (pc + p) * ldb + jc + jr;
            for (std::size_t q = 0; q < w; ++q) dst[q] = src[q];
          } else {
            for (std::size_t q = 0; q < w; ++q) dst[q] = b[(jc + jr + q) * ldb + pc + p];
          }
          for (std::size_t q = w; q < NR; ++q) dst[q] = 0.0;
        }
      }

      for (std::size_t ic = 0; ic < m; ic += MC) {
        const std::size_t mc = std::min(MC, m - ic);

        // A block -> MR-tall panels with alpha folded in.
        for (std::size_t ir = 0; ir < mc; ir += MR) {
          double* panel = apack.data() + ir * kc;
          const std::size_t h = std::min(MR, mc - ir);
          for (std::size_t p = 0; p < kc; ++p) {
            double* dst = panel + p * MR;
            if (ta == Trans::no) {
              for (std::size_t r = 0; r < h; ++r) dst[r] = alpha * a[(ic + ir + r) * lda + pc + p];
            } else {
              const double* src = a + (pc + p) * lda + ic + ir;
              for (std::size_t r = 0; r < h; ++r) dst[r] = alpha * src[r];
            }
            for (std::size_t r = h; r < MR; ++r) dst[r] = 0.0;
          }
        }

        for (std::size_t jr = 0; jr < nc; jr += NR) {
          const std::size_t w = std::min(NR, nc - jr);
          const double* bp = bpack.data() + jr * kc;
          for (std::size_t ir = 0; ir < mc; ir += MR) {
            const std::size_t h = std::min(MR, mc - ir);
            const double* ap = apack.data() + ir * kc;
            double* ctile = c + (ic + ir) * ldc + jc + jr;
            if (h == MR && w == NR) {
              Micro::run(kc, ap, bp, ctile, ldc);
            } else {
              std::fill(edge, edge + MR * NR, 0.0);
              Micro::run(kc, ap, bp, edge, NR);
              for (std::size_t r = 0; r < h; ++r) {
                for (std::size_t q = 0; q < w; ++q) ctile[r * ldc + q] += edge[r * NR + q];
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace floqflow::simd::detail

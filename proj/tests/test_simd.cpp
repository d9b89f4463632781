#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "floqflow/aligned.hpp"
#include "floqflow/opkernel.hpp"
#include "floqflow/simd/isa.hpp"
#include "floqflow/simd/kernels.hpp"

using namespace floqflow;
using namespace floqflow::simd;

namespace {

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa i : {Isa::scalar, Isa::avx2, Isa::avx512})
    if (isa_available(i)) out.push_back(i);
  return out;
}

std::vector<double> randv(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar variant is always available") {
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_available(active_isa()));
  CHECK(parse_isa(isa_name(Isa::avx2)) == Isa::avx2);
  CHECK_FALSE(parse_isa("neon").has_value());
}

TEST_CASE("dgemm variants agree with the scalar reference") {
  std::mt19937 rng(1);
  const auto& ref = kernels(Isa::scalar);
  // Shapes straddle the vector widths and the blocking sizes.
  const std::size_t sizes[][3] = {{1, 1, 1},  {3, 5, 7},    {8, 8, 8},     {9, 17, 4},
                                  {16, 64, 32}, {33, 31, 65}, {128, 96, 130}, {256, 256, 256}};
  for (Isa isa : available()) {
    const auto& t = kernels(isa);
    CAPTURE(isa_name(isa));
    for (const auto& s : sizes) {
      const std::size_t m = s[0], n = s[1], k = s[2];
      for (Trans ta : {Trans::no, Trans::yes}) {
        for (Trans tb : {Trans::no, Trans::yes}) {
          const std::size_t lda = ta == Trans::no ? k : m;
          const std::size_t ldb = tb == Trans::no ? n : k;
          const auto a = randv(m * k, rng), b = randv(k * n, rng), c0 = randv(m * n, rng);
          auto c_ref = c0, c_isa = c0;
          ref.dgemm(ta, tb, m, n, k, 1.5, a.data(), lda, b.data(), ldb, -0.25, c_ref.data(), n);
          t.dgemm(ta, tb, m, n, k, 1.5, a.data(), lda, b.data(), ldb, -0.25, c_isa.data(), n);
          CHECK(max_rel(c_isa, c_ref) <= 1e-13);
          auto z_ref = c0, z_isa = c0;
          ref.dgemm(ta, tb, m, n, k, 1.0, a.data(), lda, b.data(), ldb, 0.0, z_ref.data(), n);
          t.dgemm(ta, tb, m, n, k, 1.0, a.data(), lda, b.data(), ldb, 0.0, z_isa.data(), n);
          CHECK(max_rel(z_isa, z_ref) <= 1e-13);
        }
      }
    }
  }
}

TEST_CASE("dgemm scalar reference matches a triple loop") {
  std::mt19937 rng(2);
  const std::size_t m = 13, n = 11, k = 9;
  const auto a = randv(m * k, rng), b = randv(k * n, rng);
  std::vector<double> c(m * n, 0.0);
  kernels(Isa::scalar).dgemm(Trans::no, Trans::no, m, n, k, 1.0, a.data(), k, b.data(), n, 0.0,
                             c.data(), n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += a[i * k + l] * b[l * n + j];
      CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-13));
    }
}

TEST_CASE("vector kernels agree across variants") {
  std::mt19937 rng(4);
  const auto& ref = kernels(Isa::scalar);
  for (Isa isa : available()) {
    const auto& t = kernels(isa);
    CAPTURE(isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 33u, 1000u}) {
      const auto x = randv(n, rng), y = randv(n, rng);
      auto y1 = y, y2 = y;
      ref.axpy(n, 0.3, x.data(), y1.data());
      t.axpy(n, 0.3, x.data(), y2.data());
      CHECK(max_rel(y2, y1) <= 1e-15);

      std::vector<double> o1(n), o2(n);
      ref.axpby(n, 0.3, x.data(), -1.1, y.data(), o1.data());
      t.axpby(n, 0.3, x.data(), -1.1, y.data(), o2.data());
      CHECK(max_rel(o2, o1) <= 1e-15);

      const double s1 = ref.sum_squares(n, x.data()), s2 = t.sum_squares(n, x.data());
      CHECK(std::abs(s1 - s2) <= 1e-13 * (1.0 + s1));

      auto r0 = x, i0 = y, r1 = randv(n, rng), i1 = randv(n, rng);
      auto R0 = r0, I0 = i0, R1 = r1, I1 = i1;
      ref.rotate_pair(n, 0.6, 0.8, r0.data(), i0.data(), r1.data(), i1.data());
      t.rotate_pair(n, 0.6, 0.8, R0.data(), I0.data(), R1.data(), I1.data());
      CHECK(max_rel(R0, r0) <= 1e-15);
      CHECK(max_rel(I1, i1) <= 1e-15);

      auto pr = x, pi = y, PR = x, PI = y;
      ref.phase_row(n, 0.28, 0.96, pr.data(), pi.data());
      t.phase_row(n, 0.28, 0.96, PR.data(), PI.data());
      CHECK(max_rel(PR, pr) <= 1e-15);
      CHECK(max_rel(PI, pi) <= 1e-15);
    }
  }
}

TEST_CASE("rotate_pair and phase_row implement their formulas") {
  std::vector<double> re0{1.0}, im0{2.0}, re1{3.0}, im1{-1.0};
  const double c = 0.6, s = 0.8;
  kernels(Isa::scalar).rotate_pair(1, c, s, re0.data(), im0.data(), re1.data(), im1.data());
  const cplx u0(1, 2), u1(3, -1), I(0, 1);
  const cplx e0 = c * u0 - I * s * u1, e1 = c * u1 - I * s * u0;
  CHECK(re0[0] == doctest::Approx(e0.real()));
  CHECK(im0[0] == doctest::Approx(e0.imag()));
  CHECK(re1[0] == doctest::Approx(e1.real()));
  CHECK(im1[0] == doctest::Approx(e1.imag()));
  std::vector<double> pr{1.0}, pi{2.0};
  kernels(Isa::scalar).phase_row(1, c, s, pr.data(), pi.data());
  const cplx p = cplx(c, -s) * u0;
  CHECK(pr[0] == doctest::Approx(p.real()));
  CHECK(pi[0] == doctest::Approx(p.imag()));
}

TEST_CASE("operator algebra gives the same answer on every variant") {
  std::mt19937 rng(8);
  std::normal_distribution<double> g;
  OperatorMatrix a(64), b(64);
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) {
      a.set(i, j, cplx(g(rng), g(rng)));
      b.set(i, j, cplx(g(rng), 0.0));
    }
  OperatorMatrix ref;
  {
    ScopedIsa scope(Isa::scalar);
    ref = commutator(a, b);
  }
  for (Isa isa : available()) {
    ScopedIsa scope(isa);
    const OperatorMatrix c = commutator(a, b);
    CHECK(frobenius_distance(c, ref) <= 1e-13 * frobenius_norm(ref));
  }
}

}  // TEST_SUITE

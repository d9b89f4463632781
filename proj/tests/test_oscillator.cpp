#include <cmath>

#include "doctest.h"
#include "floqflow/errors.hpp"
#include "floqflow/oscillator.hpp"

using namespace floqflow;

namespace {

OscillatorParams params(double w0, double w1, double ratio, double omega) {
  OscillatorParams p;
  p.omega0 = w0;
  p.omega1 = w1;
  p.Omega = omega;
  p.A = ratio * omega;
  return p;
}

FlowConfig cfg(double omega, double step_omega, double omega_lambda, int stride = 1) {
  FlowConfig c;
  c.omega = omega;
  c.step = step_omega / omega;
  c.lambda_max = omega_lambda / omega;
  c.record_stride = stride;
  return c;
}

// Limit value omega1 J0(A/Omega), with the standard library as the Bessel oracle.
double frozen_b0(const OscillatorParams& p) { return p.omega1 * std::cyl_bessel_j(0.0, p.A / p.Omega); }

}  // namespace

TEST_SUITE("oscillator") {

TEST_CASE("rhs examples") {
  auto p = params(0.3, 1.0, 0.0, 1.0);
  const auto d0 = oscillator_rhs(oscillator_initial(p), p);
  CHECK(d0.A0 == 0.0);
  CHECK(d0.A1 == 0.0);
  CHECK(d0.B0 == cplx(0.0));
  CHECK(d0.B1 == cplx(0.0));
  CHECK(d0.C1 == cplx(0.0));

  p = params(0.4, 0.7, 1.3, 2.0);
  const auto s = oscillator_initial(p);
  CHECK(s.A1 == doctest::Approx(p.A / 2));
  const auto d = oscillator_rhs(s, p);
  // B1 = C1 = 0 initially, so dB1 + dC1 = -Omega(B1+C1) - A0(B1-C1) = 0
  CHECK(std::abs(d.B1 + d.C1) <= 1e-15);
  CHECK(d.A1 == doctest::Approx(-p.Omega * s.A1));
}

TEST_CASE("decoupled coefficients follow their closed forms") {
  const auto p = params(0.5, 1.0, 1.7, 2.0);
  const auto traj = run_oscillator(p, cfg(p.Omega, 1e-2, 20.0));
  for (const auto& s : traj) {
    CHECK(std::abs(s.A0 - p.omega0) <= 1e-12);
    const double exact = 0.5 * p.A * std::exp(-p.Omega * s.lambda);
    CHECK(std::abs(s.A1 / exact - 1.0) <= 1e-8);
  }
}

TEST_CASE("zero linear coupling keeps the B sector at zero") {
  const auto p = params(0.2, 0.0, 2.0, 1.0);
  for (const auto& s : run_oscillator(p, cfg(1.0, 1e-2, 10.0, 50))) {
    CHECK(s.B0 == cplx(0.0));
    CHECK(s.B1 == cplx(0.0));
    CHECK(s.C1 == cplx(0.0));
  }
}

TEST_CASE("frozen limit of B0") {
  for (double ratio : {1.0, 2.404826}) {
    const auto p = params(0.0, 1.0, ratio, 1.0);
    const auto traj = run_oscillator(p, cfg(1.0, 1e-2, 20.0));
    CHECK(std::abs(traj.back().B0 - frozen_b0(p)) <= 1e-7);
  }
  const auto p = params(0.0, 1.0, 1.0, 1.0);
  CHECK(frozen_b0(p) == doctest::Approx(0.76520).epsilon(1e-5));
  CHECK(std::abs(run_oscillator(params(0.0, 1.0, 2.404826, 1.0), cfg(1.0, 1e-2, 20.0)).back().B0) <=
        1e-3);
  CHECK_THROWS_AS(run_oscillator(p, cfg(1.0, 0.2, 1.0)), PreconditionError);
}

TEST_CASE("analytic B0") {
  for (double ratio : {0.5, 2.0, 5.0}) {
    const auto p = params(0.0, 1.3, ratio, 2.0);
    CHECK(analytic_B0(p, 0.0).real() == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(std::abs(analytic_B0(p, 30.0 / p.Omega) - frozen_b0(p)) <= 1e-10);
  }
  CHECK(analytic_B0(params(0.0, 0.8, 0.0, 1.0), 3.0) == cplx(0.8));
}

TEST_CASE("integrated B0 matches the analytic solution") {
  for (double ratio : {0.5, 2.4048}) {
    const auto p = params(0.0, 1.0, ratio, 1.0);
    double worst = 0.0;
    for (const auto& s : run_oscillator(p, cfg(1.0, 1e-2, 10.0)))
      worst = std::max(worst, std::abs(s.B0 - analytic_B0(p, s.lambda)) / p.omega1);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("freezing points sit at the zeros of J0") {
  std::vector<double> grid;
  for (int i = 1; i <= 200; ++i) grid.push_back(0.05 * i);
  const auto scan = find_freezing_points(params(0.0, 1.0, 0.0, 1.0), grid);
  REQUIRE(scan.minima.size() >= 3);
  const double zeros[] = {2.404826, 5.520078, 8.653728};
  for (int k = 0; k < 3; ++k) CHECK(std::abs(scan.minima[k].ratio - zeros[k]) <= 1e-3);

  const auto shifted = find_freezing_points(params(0.5, 1.0, 0.0, 1.0), grid);
  REQUIRE_FALSE(shifted.minima.empty());
  CHECK(std::abs(shifted.minima.front().ratio - zeros[0]) > 1e-2);

  const auto flat = find_freezing_points(params(0.0, 0.0, 0.0, 1.0), {1.0, 2.0, 3.0});
  CHECK(flat.degenerate);
  for (const auto& g : flat.grid) CHECK(g.residual == 0.0);

  CHECK_THROWS_AS(find_freezing_points(params(0, 1, 0, 1), {}), PreconditionError);
  CHECK_THROWS_AS(find_freezing_points(params(0, 1, 0, 1), {2.0, 1.0}), PreconditionError);
}

TEST_CASE("B0 crosses zero n-1 times at the n-th freezing point") {
  const double zeros[] = {2.404826, 5.520078, 8.653728};
  for (int n = 1; n <= 3; ++n) {
    const auto p = params(0.0, 1.0, zeros[n - 1], 1.0);
    CHECK(count_b0_sign_changes(run_oscillator(p, cfg(1.0, 1e-2, 20.0))) == n - 1);
  }
}

TEST_CASE("reduced flow equals the Fock-space matrix flow") {
  const auto p = params(0.3, 0.05, 0.8, 1.0);
  const auto emb = embed_oscillator(p, 40);
  const auto init = extract_oscillator(emb.h0, emb.h1, 0.0);
  const auto s0 = oscillator_initial(p);
  CHECK(init.A0 == doctest::Approx(s0.A0));
  CHECK(init.A1 == doctest::Approx(s0.A1));
  CHECK(init.B0 == s0.B0);

  auto fc = cfg(1.0, 1e-2, 5.0, 50);
  fc.store_matrices = true;
  const auto matrix = run_flow(emb.h0, emb.h1, fc);
  const auto reduced = run_oscillator(p, fc);
  REQUIRE(matrix.samples.size() == reduced.size());
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    const auto m = extract_oscillator(matrix.samples[i].h0, matrix.samples[i].h1,
                                      matrix.samples[i].lambda);
    const auto& r = reduced[i];
    const double scale = std::abs(r.B0) + std::abs(r.B1) + std::abs(r.C1) + std::abs(r.A1) +
                         std::abs(r.A0);
    CHECK(std::abs(m.A0 - r.A0) <= 1e-6 * scale);
    CHECK(std::abs(m.A1 - r.A1) <= 1e-6 * scale);
    CHECK(std::abs(m.B0 - r.B0) <= 1e-6 * scale);
    CHECK(std::abs(m.B1 - r.B1) <= 1e-6 * scale);
    CHECK(std::abs(m.C1 - r.C1) <= 1e-6 * scale);
  }
}

}  // TEST_SUITE

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "floqflow/analytics.hpp"
#include "floqflow/errors.hpp"
#include "floqflow/special.hpp"
#include "oracle.hpp"

using namespace floqflow;

namespace {

SpinChainParams chain(int L, double J2, double ratio, double omega,
                      Boundary b = Boundary::periodic) {
  SpinChainParams p;
  p.L = L;
  p.J = 1.0;
  p.J2 = J2;
  p.Omega = omega;
  p.A = ratio * omega;
  p.boundary = b;
  return p;
}

// Kernel straight from the standard library Bessel functions.
double kernel_oracle(double z, double lambda, double omega) {
  const double u = z * std::exp(-omega * lambda);
  return std::numbers::pi / 2 * u *
         (std::cyl_bessel_j(1.0, u) * std::cyl_neumann(0.0, z) -
          std::cyl_neumann(1.0, u) * std::cyl_bessel_j(0.0, z));
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double x = lo; x <= hi + 1e-12; x += step) g.push_back(x);
  return g;
}

}  // namespace

TEST_SUITE("analytics") {

TEST_CASE("Bessel functions agree with the standard library") {
  for (int n : {0, 1, 2, 5}) {
    for (double x : {0.1, 1.0, 2.404826, 7.3, 15.0}) {
      CHECK(bessel_j(n, x) == doctest::Approx(std::cyl_bessel_j(double(n), x)).epsilon(1e-12));
      CHECK(bessel_y(n, x) == doctest::Approx(std::cyl_neumann(double(n), x)).epsilon(1e-12));
    }
  }
  // J_{-n}(x) = (-1)^n J_n(x), J_n(-x) = (-1)^n J_n(x)
  CHECK(bessel_j(-3, 2.0) == doctest::Approx(-std::cyl_bessel_j(3.0, 2.0)));
  CHECK(bessel_j(3, -2.0) == doctest::Approx(-std::cyl_bessel_j(3.0, 2.0)));
  CHECK(bessel_j(2, -2.0) == doctest::Approx(std::cyl_bessel_j(2.0, 2.0)));
  for (double z : kBesselJ0Zeros) CHECK(std::abs(bessel_j(0, z)) <= 1e-6);
}

TEST_CASE("flow kernel") {
  for (double z : {0.5, 2.0, 7.3}) {
    CHECK(std::abs(flow_kernel_f(z, 0.0, 10.0) - 1.0) <= 1e-10);
    CHECK(std::abs(flow_kernel_f(-z, 0.0, 10.0) - 1.0) <= 1e-10);
  }
  CHECK(std::abs(flow_kernel_f(2.4048, 30.0 / 10.0, 10.0) - std::cyl_bessel_j(0.0, 2.4048)) <= 1e-8);
  for (double l : {0.0, 0.3, 5.0}) CHECK(flow_kernel_f(0.0, l, 2.0) == 1.0);
  for (double z : {0.3, 1.7, 4.0})
    for (double l : {0.01, 0.1, 0.5})
      CHECK(flow_kernel_f(z, l, 4.0) == doctest::Approx(kernel_oracle(z, l, 4.0)).epsilon(1e-11));
}

TEST_CASE("early-time solution") {
  const auto p = chain(5, 0.2, 0.601, 10.0);
  const auto h0 = build_static(p), h1 = build_drive(p);
  const auto b = adjoint_basis(h0, h1, p.Omega);
  for (std::size_t m = 0; m < b.dim(); ++m)
    for (std::size_t n = 0; n < b.dim(); ++n) CHECK(b.zgrid(m, n) == -b.zgrid(n, m));

  CHECK(frobenius_distance(early_time_h0(b, 0.0), h0) <= 1e-10 * frobenius_norm(h0));
  const auto mid = early_time_h0(b, 0.2);
  CHECK(hermiticity_defect(mid) <= 1e-10);

  const auto still = chain(5, 0.2, 0.0, 10.0);
  CHECK(frobenius_distance(early_time_h0(h0, build_drive(still), 10.0, 0.5), h0) <= 1e-12);
  // commuting data is left alone
  const OperatorMatrix q = build_charge(5);
  const OperatorMatrix xx = build_drive(p) + 0.5 * q;
  CHECK(frobenius_distance(early_time_h0(q, xx, 10.0, 0.7), q) <= 1e-10 * frobenius_norm(q));
}

TEST_CASE("early-time solution tracks the flow with a 1/Omega^2 error") {
  double prev = 0.0;
  for (double omega : {10.0, 20.0}) {
    const auto p = chain(6, 0.2, 0.601, omega);
    const auto h0 = build_static(p), h1 = build_drive(p);
    const auto b = adjoint_basis(h0, h1, omega);
    FlowConfig cfg;
    cfg.omega = omega;
    cfg.step = 0.02 / omega;
    cfg.lambda_max = 1.0;
    cfg.record_stride = 5;
    cfg.store_matrices = true;
    const auto traj = run_flow(h0, h1, cfg);
    double worst = 0.0;
    for (const auto& s : traj.samples)
      worst = std::max(worst, frobenius_distance(early_time_h0(b, s.lambda), s.h0));
    worst /= frobenius_norm(h0);
    if (prev > 0.0) CHECK(prev / worst == doctest::Approx(4.0).epsilon(0.2));
    prev = worst;
  }
}

TEST_CASE("leading Magnus Hamiltonian") {
  const double ratio = kBesselJ0Zeros[0] / 4.0;
  for (Boundary bc : {Boundary::periodic, Boundary::open}) {
    const auto p = chain(6, 0.2, ratio, 10.0, bc);
    CHECK(frobenius_norm(commutator(magnus_leading(p), build_charge(6))) <= 1e-12);
    const auto s = chain(6, 0.2, 0.0, 10.0, bc);
    CHECK(frobenius_distance(magnus_leading(s), build_static(s)) <= 1e-15);
  }
  // direct construction: -sum_d (J_d/2) [YY (1 - J0) + ZZ (1 + J0)]
  const auto p = chain(5, 0.3, 0.45, 10.0);
  const double j0 = std::cyl_bessel_j(0.0, 4 * 0.45);
  oracle::Dense ref(32);
  for (int d = 1; d <= 2; ++d) {
    const double c = d == 1 ? 1.0 : 0.3;
    for (int i = 0; i < 5; ++i) {
      using namespace oracle;
      const Dense yy = mul(site_op(5, i, sy()), site_op(5, (i + d) % 5, sy()));
      const Dense zz = mul(site_op(5, i, sz()), site_op(5, (i + d) % 5, sz()));
      ref = add(ref, yy, -c / 2 * (1 - j0));
      ref = add(ref, zz, -c / 2 * (1 + j0));
    }
  }
  CHECK(oracle::dist(oracle::from(magnus_leading(p)), ref) <= 1e-13);
  auto bx = p;
  bx.Bx = 0.1;
  CHECK_THROWS_AS(magnus_leading(bx), UnsupportedConfiguration);
}

TEST_CASE("Fourier components of the co-moving Hamiltonian") {
  const auto p = chain(4, 0.0, 0.8, 10.0, Boundary::open);
  CHECK(frobenius_distance(magnus_fourier_h(0, p), magnus_leading(p)) == 0.0);
  for (int m : {1, 2})
    CHECK(frobenius_norm(commutator(magnus_fourier_h(m, p), magnus_fourier_h(-m, p))) <= 1e-13);

  // sum_m h_m e^{i m Omega t} = e^{i phi X} H0 e^{-i phi X}, phi = (alpha/2) sin(Omega t)
  const auto q = chain(5, 0.3, 0.7, 10.0);
  const auto h0 = build_static(q);
  const auto x = build_charge(5);
  const double alpha = magnus_alpha(q);
  for (double t : {0.0, 0.05, 0.2, 0.51}) {
    OperatorMatrix sum(32);
    for (int m = -20; m <= 20; ++m) {
      OperatorMatrix hm = magnus_fourier_h(m, q);
      hm *= std::polar(1.0, m * q.Omega * t);
      sum += hm;
    }
    const double phi = alpha / 2 * std::sin(q.Omega * t);
    const auto r = expm_hermitian(x, cplx(0, phi));
    CHECK(frobenius_distance(sum, conjugate(r, h0)) <= 1e-8 * frobenius_norm(h0));
  }
}

TEST_CASE("first-order Magnus term") {
  CHECK(frobenius_norm(magnus_first_order(chain(4, 0, 0.0, 10.0, Boundary::open), 8)) == 0.0);
  const auto p = chain(4, 0.0, 0.9, 10.0, Boundary::open);
  const auto h1 = magnus_first_order(p, 8);
  CHECK(frobenius_norm(h1) > 0.0);
  CHECK(hermiticity_defect(h1) <= 1e-10);
  // fixed alpha: doubling Omega halves the norm
  const auto q = chain(4, 0.0, 0.9, 20.0, Boundary::open);
  CHECK(frobenius_norm(h1) / frobenius_norm(magnus_first_order(q, 8)) ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("instanton reduced flow") {
  InstantonTriple still{0.3, -0.2, 0.0};
  const auto s = instanton_reduced_step(still, 1.0, 0.1);
  CHECK(s.Em == 0.3);
  CHECK(s.En == -0.2);
  CHECK(s.t == cplx(0.0));

  const double omega = 1.0, wt = 0.6, lt = 0.0, h = 1e-3;
  double lambda = lt - 10.0 / wt;
  auto c = instanton_closed_form(omega, wt, lt, lambda);
  InstantonTriple tr{-c.gap / 2, c.gap / 2, cplx(c.amp, 0.0)};
  const double sum0 = tr.Em + tr.En;
  double worst = 0.0, drift = 0.0;
  while (lambda < lt + 10.0 / wt) {
    tr = instanton_reduced_step(tr, omega, h);
    lambda += h;
    c = instanton_closed_form(omega, wt, lt, lambda);
    worst = std::max({worst, std::abs((tr.En - tr.Em) - c.gap), std::abs(std::abs(tr.t) - c.amp)});
    drift = std::max(drift, std::abs(tr.Em + tr.En - sum0));
  }
  CHECK(worst <= 1e-6);
  CHECK(drift <= 1e-10 * (20.0 / wt));
}

TEST_CASE("instanton closed form") {
  const auto at = instanton_closed_form(1.0, 0.6, 5.0, 5.0);
  CHECK(at.amp == doctest::Approx(0.3));
  CHECK(at.gap == doctest::Approx(1.0));
  const auto lo = instanton_closed_form(1.0, 0.6, 5.0, -200.0);
  const auto hi = instanton_closed_form(1.0, 0.6, 5.0, 200.0);
  CHECK(lo.gap == doctest::Approx(1.6));
  CHECK(hi.gap == doctest::Approx(0.4));
  CHECK(hi.amp <= 1e-30);
  CHECK(hi.gap - lo.gap == doctest::Approx(-2 * 0.6));
  CHECK(sech_profile(1.7, 120.0, 120.0) == doctest::Approx(0.85));
}

TEST_CASE("sech fit recovers synthetic peaks") {
  std::mt19937 rng(17);
  std::normal_distribution<double> noise;
  const double a = 1.7, b = 120.0;
  std::vector<double> lam = grid(110.0, 130.0, 0.05), y;
  for (double l : lam) y.push_back(sech_profile(a, b, l) * (1.0 + 1e-4 * noise(rng)));
  const auto f = fit_sech(lam, y, 110.0, 130.0, 2.0, 119.5);
  CHECK(f.omega_tilde == doctest::Approx(a).epsilon(0.01));
  CHECK(f.lambda_tilde == doctest::Approx(b).epsilon(0.01));
  CHECK(f.relative_rms <= 1e-3);
  CHECK(f.lambda_tilde >= f.window_lo);
  CHECK(f.lambda_tilde <= f.window_hi);

  // covariance under lambda -> lambda + c
  const double c = 37.5;
  std::vector<double> lam2;
  for (double l : lam) lam2.push_back(l + c);
  const auto g = fit_sech(lam2, y, 110.0 + c, 130.0 + c, 2.0, 119.5 + c);
  CHECK(g.omega_tilde == doctest::Approx(f.omega_tilde).epsilon(1e-6));
  CHECK(g.lambda_tilde == doctest::Approx(f.lambda_tilde + c).epsilon(1e-8));

  CHECK_THROWS_AS(fit_sech(lam, y, 200.0, 210.0, 1.0, 205.0), FitError);
}

TEST_CASE("instanton detection on a synthetic trajectory") {
  FlowTrajectory traj;
  traj.omega = 1.0;
  traj.step = 0.1;
  const double peaks[][2] = {{0.4, 125.0}, {0.3, 380.0}};
  for (double l : grid(0.0, 450.0, 0.1)) {
    FlowSample s;
    s.lambda = l;
    s.norm_h1 = 1e-6 * std::exp(-0.01 * l);
    s.norm_h0 = 5.0;
    for (const auto& pk : peaks) {
      s.norm_h1 += sech_profile(pk[0], pk[1], l);
      s.norm_h0 -= 0.2 * std::tanh(pk[0] * (l - pk[1]));
    }
    traj.samples.push_back(s);
  }
  const auto found = detect_peaks(traj.norm_h1(), traj.lambdas());
  REQUIRE(found.size() == 2);
  CHECK(found[0].lambda == doctest::Approx(125.0));
  CHECK(found[1].lambda == doctest::Approx(380.0));

  const auto fits = fit_all_instantons(traj, 0.0);
  REQUIRE(fits.size() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(fits[k].omega_tilde == doctest::Approx(peaks[k][0]).epsilon(0.01));
    CHECK(fits[k].lambda_tilde == doctest::Approx(peaks[k][1]).epsilon(1e-3));
    CHECK(fits[k].relative_rms <= 0.05);
    CHECK(fits[k].concurrent_h0_step);
  }
  CHECK_THROWS_AS(fit_instanton(traj, 0.0, 450.0), FitError);  // two peaks
  CHECK_THROWS_AS(fit_instanton(traj, 200.0, 300.0), FitError);  // none
}

TEST_CASE("timescale estimates") {
  const auto e = estimate_timescales(std::numbers::e * 0.5, 0.5, {1, 2, 10});
  CHECK(e.lambda_min_est == doctest::Approx(2.0));
  const auto t = estimate_timescales(2.0, 0.47, {2, 4, 5, 8, 1000000});
  CHECK(t.lambda_min_est == doctest::Approx(3.08).epsilon(0.01));
  CHECK(std::isinf(t.lambda_th.at(2)));
  CHECK(std::isinf(t.lambda_th.at(4)));
  CHECK(std::isfinite(t.lambda_th.at(5)));
  const double l8 = (8 * std::log(8.0) + 8 * std::log(2.0 / 0.47)) / (8 * 0.47 - 2.0);
  CHECK(t.lambda_th.at(8) == doctest::Approx(l8));
  // large l: grows only logarithmically, lambda_th ~ ln(l) / Jeff
  CHECK(t.lambda_th.at(1000000) == doctest::Approx(std::log(1e6 * 2.0 / 0.47) / 0.47).epsilon(0.01));
  CHECK_THROWS_AS(estimate_timescales(0.4, 0.47, {}), PreconditionError);
}

}  // TEST_SUITE

#include "floqflow/analytics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "floqflow/errors.hpp"
#include "floqflow/special.hpp"

namespace floqflow {

AdjointSpectralBasis adjoint_basis(const OperatorMatrix& h0_init, const OperatorMatrix& h1_init,
                                   double omega) {
  if (!(omega > 0.0)) throw PreconditionError("adjoint_basis: omega must be positive");
  if (h0_init.dim() != h1_init.dim()) throw ContractViolation("adjoint_basis: dimension mismatch");
  AdjointSpectralBasis b;
  b.omega = omega;
  b.basis = eigh(h1_init);
  const OperatorMatrix& v = b.basis.eigenvectors;
  b.h0_rotated = multiply(multiply(v, h0_init, Op::adjoint, Op::none), v);
  const std::size_t n = b.basis.dim();
  b.z.resize(n * n);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      b.z[m * n + k] = 2.0 * (b.basis.eigenvalues[m] - b.basis.eigenvalues[k]) / omega;
  return b;
}

OperatorMatrix early_time_h0(const AdjointSpectralBasis& b, double lambda) {
  const std::size_t n = b.dim();
  OperatorMatrix m = b.h0_rotated;
  double* re = m.re();
  double* im = m.is_real() ? nullptr : m.im_mut();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double f = flow_kernel_f(b.z[i * n + k], lambda, b.omega);
      re[i * n + k] *= f;
      if (im) im[i * n + k] *= f;
    }
  }
  const OperatorMatrix& v = b.basis.eigenvectors;
  return multiply(multiply(v, m), v, Op::none, Op::adjoint);
}

OperatorMatrix early_time_h0(const OperatorMatrix& h0_init, const OperatorMatrix& h1_init,
                             double omega, double lambda) {
  return early_time_h0(adjoint_basis(h0_init, h1_init, omega), lambda);
}

double magnus_alpha(const SpinChainParams& p) { return 4.0 * p.A / p.Omega; }

OperatorMatrix magnus_fourier_h(int m, const SpinChainParams& p) {
  p.validate();
  if (p.Bx != 0.0)
    throw UnsupportedConfiguration("Magnus expansion is implemented for Bx = 0 only");
  const double alpha = magnus_alpha(p);
  const double jm = bessel_j(m, alpha);
  const bool even = (m % 2) == 0;
  const double delta = m == 0 ? 1.0 : 0.0;
  OperatorMatrix h(p.dim());
  const double couplings[2] = {p.J, p.J2};
  for (int d = 1; d <= 2; ++d) {
    const double jd = couplings[d - 1];
    if (jd == 0.0) continue;
    const double pre = -0.5 * jd;
    const double cyy = pre * (delta - (even ? jm : 0.0));
    const double czz = pre * (delta + (even ? jm : 0.0));
    // (1 - (-1)^m) / (2i) J_m = -i J_m for odd m
    const cplx cyz = even ? cplx(0.0, 0.0) : pre * cplx(0.0, -jm);
    for (auto [i, j] : bonds(p.L, d, p.boundary)) {
      if (cyy != 0.0) add_spin_product(h, p.L, cyy, {{i, Axis::y}, {j, Axis::y}});
      if (czz != 0.0) add_spin_product(h, p.L, czz, {{i, Axis::z}, {j, Axis::z}});
      if (cyz != 0.0) {
        add_spin_product(h, p.L, cyz, {{i, Axis::y}, {j, Axis::z}});
        add_spin_product(h, p.L, cyz, {{i, Axis::z}, {j, Axis::y}});
      }
    }
  }
  return h;
}

OperatorMatrix magnus_leading(const SpinChainParams& p) { return magnus_fourier_h(0, p); }

OperatorMatrix magnus_first_order(const SpinChainParams& p, int m_max) {
  if (m_max < 1) throw PreconditionError("magnus_first_order: m_max must be >= 1");
  const OperatorMatrix h0 = magnus_leading(p);
  OperatorMatrix out(h0.dim());
  for (int m = 1; m <= m_max; ++m) {
    const double w = -1.0 / (m * p.Omega);
    out.axpy(w, commutator(magnus_fourier_h(m, p), h0));
    out.axpy(-w, commutator(magnus_fourier_h(-m, p), h0));
  }
  return out;
}

TimescaleEstimate estimate_timescales(double omega, double jeff, const std::vector<int>& lengths) {
  if (!(jeff > 0.0) || !(omega > jeff)) {
    std::ostringstream msg;
    msg << "estimate_timescales: need Omega > Jeff > 0 (Omega=" << omega << ", Jeff=" << jeff
        << ")";
    throw PreconditionError(msg.str());
  }
  TimescaleEstimate t;
  t.Jeff = jeff;
  const double log_ratio = std::log(omega / jeff);
  t.lambda_min_est = log_ratio / jeff;
  for (int l : lengths) {
    if (l < 1) throw PreconditionError("estimate_timescales: flip lengths must be >= 1");
    const double denom = l * jeff - omega;
    t.lambda_th[l] = denom > 0.0 ? (l * std::log(double(l)) + l * log_ratio) / denom
                                 : std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace floqflow

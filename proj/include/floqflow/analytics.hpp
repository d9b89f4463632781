#pragma once

// Analytic references for the flow: early-time Bessel-kernel solution, the
// Floquet-Magnus expansion of the driven chain, the two-level instanton and
// thermalization timescale estimates.

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "floqflow/flow.hpp"
#include "floqflow/hilbert.hpp"
#include "floqflow/opkernel.hpp"

namespace floqflow {

// H0(0) expressed in the eigenbasis of the Hermitian H1(0), with the scaled
// adjoint eigenvalues z_mn = 2 (e_m - e_n) / Omega.
struct AdjointSpectralBasis {
  EigenDecomposition basis;
  OperatorMatrix h0_rotated;
  std::vector<double> z;  // row-major dim x dim
  double omega = 0.0;

  std::size_t dim() const { return basis.dim(); }
  double zgrid(std::size_t m, std::size_t n) const { return z[m * dim() + n]; }
};

AdjointSpectralBasis adjoint_basis(const OperatorMatrix& h0_init, const OperatorMatrix& h1_init,
                                   double omega);

// Leading early-time solution: element (m, n) of H0(0) in the H1(0) eigenbasis
// multiplied by f(z_mn, lambda).
OperatorMatrix early_time_h0(const AdjointSpectralBasis& b, double lambda);
OperatorMatrix early_time_h0(const OperatorMatrix& h0_init, const OperatorMatrix& h1_init,
                             double omega, double lambda);

// alpha = 4 A / Omega
double magnus_alpha(const SpinChainParams& p);

// Fourier component h_m of the co-moving Hamiltonian (Bx must be 0).
OperatorMatrix magnus_fourier_h(int m, const SpinChainParams& p);

// h_0: ZZ and YY bonds weighted by 1 +/- J0(alpha).
OperatorMatrix magnus_leading(const SpinChainParams& p);

// -sum_{0<|m|<=m_max} [h_m, h_0] / (m Omega)
OperatorMatrix magnus_first_order(const SpinChainParams& p, int m_max);

struct InstantonTriple {
  double Em = 0.0;
  double En = 0.0;
  cplx t{0.0, 0.0};
};

// RK4 step of Em' = 2|t|^2, En' = -2|t|^2, t' = (-Omega - Em + En) t.
InstantonTriple instanton_reduced_step(const InstantonTriple& s, double omega, double step);

struct InstantonProfile {
  double gap;  // En - Em
  double amp;  // |t|
};

InstantonProfile instanton_closed_form(double omega, double omega_tilde, double lambda_tilde,
                                       double lambda);

// (a/2) sech(a (lambda - b))
double sech_profile(double a, double b, double lambda);

struct InstantonFit {
  double omega_tilde = 0.0;
  double lambda_tilde = 0.0;
  double rss = 0.0;
  double relative_rms = 0.0;  // sqrt(rss / sum y^2) over the window
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
  bool concurrent_h0_step = false;
  double h0_step = 0.0;         // |change of ||H0||| across the window
  double neighbor_drift = 0.0;  // largest change over adjacent equal-length windows
};

// Least-squares fit of sech_profile to (lambda, y) restricted to [lo, hi],
// started from (a0, b0). Throws FitError.
InstantonFit fit_sech(const std::vector<double>& lambda, const std::vector<double>& y, double lo,
                      double hi, double a0, double b0);

struct Peak {
  std::size_t index;
  double lambda;
  double height;
  double prominence_ratio;  // height / higher of the two bases
};

inline constexpr double kPeakIsolation = 10.0;

// Local maxima whose height exceeds kPeakIsolation times the higher of their
// two bases (lowest point between the peak and the nearest higher sample on each
// side, or the series end).
std::vector<Peak> detect_peaks(const std::vector<double>& y, const std::vector<double>& lambda,
                               double isolation = kPeakIsolation);

inline constexpr double kFitHalfWidths = 5.0;
inline constexpr double kStepContrast = 10.0;

// Fits the single detected ||H1|| peak inside [lo, hi]. Initial guess a = 2 *
// height, b = peak location; the fit window is b +/- kFitHalfWidths / a, clipped
// to [lo, hi]. Also evaluates the concurrent ||H0|| step. Throws FitError when
// the window holds no peak or more than one.
InstantonFit fit_instanton(const FlowTrajectory& traj, double lo, double hi);

// Fits every isolated ||H1|| peak after `after`.
std::vector<InstantonFit> fit_all_instantons(const FlowTrajectory& traj, double after);

struct TimescaleEstimate {
  double Jeff = 0.0;
  double lambda_min_est = 0.0;
  std::map<int, double> lambda_th;  // +infinity where l * Jeff <= Omega
};

// lambda_min ~ ln(Omega/Jeff) / Jeff; lambda_th(l) = (l ln l + l ln(Omega/Jeff)) / (l Jeff - Omega).
TimescaleEstimate estimate_timescales(double omega, double jeff, const std::vector<int>& lengths);

}  // namespace floqflow

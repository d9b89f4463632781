#pragma once

// Driven harmonic oscillator H(t) = w0 n + w1 (a + a^dagger) + A n cos(Omega t).
// The flow closes on five coefficients:
//   H0 = A0 n + B0 a^dagger + B0^* a,   H1 = A1 n + B1 a^dagger + C1^* a.

#include <complex>
#include <cstddef>
#include <vector>

#include "floqflow/flow.hpp"
#include "floqflow/opkernel.hpp"

namespace floqflow {

struct OscillatorParams {
  double omega0 = 0.0;
  double omega1 = 1.0;
  double A = 1.0;
  double Omega = 1.0;

  void validate() const;
};

struct OscillatorState {
  double lambda = 0.0;
  double A0 = 0.0;
  double A1 = 0.0;
  cplx B0{0.0, 0.0};
  cplx B1{0.0, 0.0};
  cplx C1{0.0, 0.0};
};

OscillatorState oscillator_initial(const OscillatorParams& p);

// Derivative of every coefficient (the lambda field of the result is 1).
OscillatorState oscillator_rhs(const OscillatorState& s, const OscillatorParams& p);

OscillatorState oscillator_rk4_step(const OscillatorState& s, const OscillatorParams& p, double h);

// Uses cfg.step, cfg.lambda_max and cfg.record_stride; cfg.omega is ignored in
// favour of p.Omega. Requires step * Omega <= kMaxStepOmega.
std::vector<OscillatorState> run_oscillator(const OscillatorParams& p, const FlowConfig& cfg);

// Closed-form B0(lambda), exact for omega0 = 0; equals omega1 at A = 0.
cplx analytic_B0(const OscillatorParams& p, double lambda);

// Omega * lambda_end used as the lambda -> infinity proxy.
inline constexpr double kOscillatorEndOmegaLambda = 20.0;
// Default RK4 step as a fraction of 1/Omega.
inline constexpr double kOscillatorStepOmega = 1e-2;

// |B0(lambda_end)| at A = ratio * Omega, other parameters from p.
double freezing_residual(const OscillatorParams& p, double ratio,
                         double step_omega = kOscillatorStepOmega);

struct FreezingPoint {
  double ratio;
  double residual;
};

struct FreezingScan {
  std::vector<FreezingPoint> grid;
  std::vector<FreezingPoint> minima;  // refined to kFreezingRatioTolerance
  bool degenerate = false;            // omega1 = 0: residual vanishes identically
};

inline constexpr double kFreezingRatioTolerance = 1e-4;

// Throws PreconditionError for an empty or unsorted grid.
FreezingScan find_freezing_points(const OscillatorParams& p, const std::vector<double>& ratio_grid,
                                  double step_omega = kOscillatorStepOmega);

inline constexpr double kSignChangeFloor = 1e-3;

// Number of sign changes of Re B0 along a trajectory. Samples with |Re B0| below
// kSignChangeFloor times its maximum are skipped.
int count_b0_sign_changes(const std::vector<OscillatorState>& traj);

// Truncated Fock-space embedding, basis |0>, ..., |N-1>.
struct FockEmbedding {
  OperatorMatrix h0;
  OperatorMatrix h1;
};

FockEmbedding embed_oscillator(const OscillatorParams& p, std::size_t levels);

// Reads (A0, A1, B0, B1, C1) back from matrix elements between |0> and |1>.
OscillatorState extract_oscillator(const OperatorMatrix& h0, const OperatorMatrix& h1,
                                   double lambda);

}  // namespace floqflow

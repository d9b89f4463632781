#pragma once

// Fixed-step RK4 integration of the Floquet flow
//   dH0/dl = 2 [H1, H1^dagger]
//   dH1/dl = -Omega H1 - [H0, H1]
// together with the diagnostics evaluated along it.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "floqflow/opkernel.hpp"

namespace floqflow {

struct FlowState {
  double lambda = 0.0;
  OperatorMatrix h0;
  OperatorMatrix h1;
};

struct FlowConfig {
  double omega = 10.0;
  double step = 1e-3;
  double lambda_max = 1.0;
  int record_stride = 1;
  bool store_matrices = false;
  bool store_spectrum = false;

  // Throws PreconditionError; enforces step * omega <= kMaxStepOmega.
  void validate() const;
  std::size_t step_count() const;
};

inline constexpr double kMaxStepOmega = 0.1;

struct FlowSample {
  double lambda = 0.0;
  double norm_h0 = 0.0;
  double norm_h1 = 0.0;
  double P = std::numeric_limits<double>::quiet_NaN();
  double Q = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> spectrum;  // eigenvalues of h0 when requested
  OperatorMatrix h0;             // set when store_matrices
  OperatorMatrix h1;
};

struct FlowTrajectory {
  double omega = 0.0;
  double step = 0.0;
  int record_stride = 1;
  std::vector<FlowSample> samples;
  FlowState final_state;
  bool stopped_early = false;

  std::vector<double> lambdas() const;
  std::vector<double> norm_h0() const;
  std::vector<double> norm_h1() const;
  std::vector<double> P() const;
  std::vector<double> Q() const;
};

struct FlowDerivative {
  OperatorMatrix dh0;
  OperatorMatrix dh1;
};

FlowDerivative flow_rhs(const FlowState& s, double omega);
void flow_rhs_into(const OperatorMatrix& h0, const OperatorMatrix& h1, double omega,
                   OperatorMatrix& dh0, OperatorMatrix& dh1);

// Scratch matrices reused across RK4 steps.
class Rk4Workspace {
 public:
  void step(FlowState& s, double omega, double h);

 private:
  OperatorMatrix k0_, k1_, acc0_, acc1_, y0_, y1_;
};

// Throws IntegrationFailure (carrying the last good lambda) on non-finite output.
FlowState rk4_step(const FlowState& s, double omega, double h);

// Called on every recorded sample; returning false ends the run after that sample.
using FlowObserver = std::function<bool(const FlowState&, const FlowSample&)>;

// P is evaluated against `charge` when provided, otherwise left NaN.
FlowTrajectory run_flow(const OperatorMatrix& h0_init, const OperatorMatrix& h1_init,
                        const FlowConfig& cfg, const OperatorMatrix* charge = nullptr,
                        const FlowObserver& observer = {});

// ||[h0, charge]|| / ||h0||; throws UndefinedDiagnostic when h0 = 0.
double diag_P(const OperatorMatrix& h0, const OperatorMatrix& charge);
// ||h1|| / ||h0||; throws UndefinedDiagnostic when h0 = 0.
double diag_Q(const OperatorMatrix& h0, const OperatorMatrix& h1);
// sqrt(dim) / ||h1||; +infinity when h1 = 0.
double t_eff(const OperatorMatrix& h1);

inline constexpr double kMinimumProminence = 1e3;
inline constexpr double kFloatingPointFloor = 1e-13;

struct LambdaMinimum {
  double lambda_min;
  double norm_min;
  std::size_t index;
};

// First strict local minimum of ||H1|| whose subsequent rise reaches
// `prominence` times the minimum. Throws NoMinimumError; PreconditionError for
// prominence <= 1.
LambdaMinimum detect_lambda_min(const FlowTrajectory& traj,
                                double prominence = kMinimumProminence);
LambdaMinimum detect_lambda_min(const std::vector<double>& lambda,
                                const std::vector<double>& norm_h1,
                                double prominence = kMinimumProminence);

// max_i |dE/dl + 4 Omega ||H1||^2| / (Omega E(0)) with E = ||H0||^2 + 2 ||H1||^2,
// derivatives by centered differences on the recorded samples.
double norm_balance_residual(const FlowTrajectory& traj);

}  // namespace floqflow

#pragma once

// Real-time checks: one-period Floquet unitary of the driven chain
//   H(t) = H0(0) + 2 A cos(Omega t) sum_i S^x_i,
// quasienergies, effective evolution under a flowed H0 and half-chain entropy.

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "floqflow/hilbert.hpp"
#include "floqflow/opkernel.hpp"

namespace floqflow {

// midpoint: product of exact exponentials exp(-i H(t_mid) dt) (second order, dense
// eigendecomposition per substep). split4: fourth-order composition of symmetric
// ZZ / transverse-field splittings, applied with row kernels.
enum class PropagatorScheme { midpoint, split4 };

std::string_view scheme_name(PropagatorScheme s);
std::optional<PropagatorScheme> parse_scheme(std::string_view name);

inline constexpr int kMinSubsteps = 100;

// Substep count whose self-convergence error (change on doubling, Frobenius) is
// below 1e-9 for the given parameters.
int default_substeps(const SpinChainParams& p, PropagatorScheme scheme);

// U(t0 + T, t0) with T = 2 pi / Omega. Throws PreconditionError for substeps < kMinSubsteps.
OperatorMatrix floquet_unitary(const SpinChainParams& p, double t0, int substeps,
                               PropagatorScheme scheme = PropagatorScheme::split4);

// ||U^dagger U - 1||_F / sqrt(dim)
double unitarity_defect(const OperatorMatrix& u);

// Maps e into (-Omega/2, Omega/2].
double fold_quasienergy(double e, double omega);

// Eigenphases theta of U mapped to -theta / T, folded, ascending. Throws
// PreconditionError when U is not unitary to 1e-8.
std::vector<double> quasienergies(const OperatorMatrix& u, double omega);

inline constexpr int kHistogramBins = 40;
inline constexpr double kHistogramLo = -12.0;
inline constexpr double kHistogramHi = 0.0;
inline constexpr double kNearZeroQuasienergy = 1e-8;  // relative to Omega
inline constexpr double kUnconvergedQ = 1e-2;

struct QuasienergyReport {
  double omega = 0.0;
  std::vector<double> eps_exact;
  std::vector<double> eps_flow;
  std::vector<double> delta;          // NaN where excluded
  std::vector<std::size_t> excluded;  // |eps_exact| < kNearZeroQuasienergy * Omega
  std::array<int, kHistogramBins> histogram{};
  int fold_events = 0;  // flow eigenvalues moved by zone folding
  int zone_shift = 0;   // cyclic index offset used for pairing
  double median_delta = 0.0;
  double q_at_lambda_c = 0.0;
  bool unconverged = false;  // Q(lambda_c) > kUnconvergedQ

  static double bin_center(int bin);
  int mode_bin() const;
};

// Pairs folded eigenvalues of h0 (the flowed static part at lambda_c) with eps_exact.
QuasienergyReport compare_quasienergies(const std::vector<double>& eps_exact,
                                        const std::vector<double>& h0_eigenvalues, double omega,
                                        double q_at_lambda_c);

// Runs the flow to lambda_c with the given step and compares against the exact
// quasienergies of U(T, 0).
QuasienergyReport quasienergy_error(const SpinChainParams& p, double lambda_c, double step,
                                    int substeps,
                                    PropagatorScheme scheme = PropagatorScheme::split4);

// exp(-i h0 t) psi
StateVector evolve_effective(const OperatorMatrix& h0, const StateVector& psi, double t);
StateVector evolve_effective(const EigenDecomposition& h0, const StateVector& psi, double t);

// Half-chain entanglement entropy density S / (L/2) in nats. Throws for odd L.
double half_chain_entropy(const StateVector& psi, int L);

struct EntropySample {
  int n;
  double t;
  double s_exact;
  double s_eff;
};

// Evolves the x-polarized state stroboscopically with `u` (one period) and with
// exp(-i h0 n T); records both entropy densities for the first n_periods
// periods, n = 0..n_periods-1 (empty for n_periods = 0).
std::vector<EntropySample> stroboscopic_series(const SpinChainParams& p, const OperatorMatrix& u,
                                               const OperatorMatrix& h0, int n_periods);

}  // namespace floqflow

#pragma once

// Batch experiments behind the CLI subcommands. Each cmd_* writes its data files
// plus manifest.json and config.json into the output directory and returns the
// results summary that goes into the manifest.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "floqflow/config.hpp"
#include "floqflow/flow.hpp"
#include "floqflow/hilbert.hpp"

namespace floqflow {

struct RunContext {
  std::filesystem::path out_dir;
  int threads = 1;
  std::ostream* log = nullptr;  // progress lines; silent when null
};

// Evaluates f(0..n-1) on up to `threads` workers. Results come back in index
// order; if several calls throw, the exception of the lowest index is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, std::max(1, threads));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Flow of the driven chain at A = ratio * Omega up to lambda_c with P evaluated
// against the total S^x. record_stride 0 keeps only the two end samples.
struct ChainFlowPoint {
  double ratio = 0.0;
  double P0 = 0.0;
  double P = 0.0;  // at lambda_c
  double Q = 0.0;  // at lambda_c
  FlowTrajectory trajectory;
};

ChainFlowPoint flow_chain_point(SpinChainParams p, double ratio, double step, double lambda_c,
                                int record_stride = 0, bool keep_final_matrices = false);

// Ratios where P(lambda_c) over the grid has an interior local minimum at
// least kFreezingContrast times below both neighbouring maxima.
inline constexpr double kFreezingContrast = 3.0;
std::vector<std::size_t> freezing_minima(const std::vector<double>& P_at_lambda_c);

// Dips of P(lambda) before lambda_c that are kDipDepth times below the
// surrounding values (see find_dips).
inline constexpr double kDipDepth = 2.0;
int count_P_dips(const FlowTrajectory& traj, double depth = kDipDepth);

// ||H0(lambda) - h0|| / ||H0(0)|| with h0 the leading Magnus Hamiltonian.
double magnus_distance(const SpinChainParams& p, const OperatorMatrix& h0_flowed);

Json cmd_oscillator(const ExperimentConfig& cfg, const RunContext& ctx);
Json cmd_scan_freezing(const ExperimentConfig& cfg, const RunContext& ctx);
Json cmd_frequency_scaling(const ExperimentConfig& cfg, const RunContext& ctx);
Json cmd_thermalize(const ExperimentConfig& cfg, const RunContext& ctx);
Json cmd_dynamics(const ExperimentConfig& cfg, const RunContext& ctx);

// Creates the output directory, writes config.json, runs the command and writes
// manifest.json. Returns the manifest.
Json run_command(const ExperimentConfig& cfg, const RunContext& ctx);

}  // namespace floqflow

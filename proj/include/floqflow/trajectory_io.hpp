#pragma once

#include <filesystem>
#include <vector>

#include "floqflow/analytics.hpp"
#include "floqflow/config.hpp"
#include "floqflow/dynamics.hpp"
#include "floqflow/flow.hpp"
#include "floqflow/oscillator.hpp"

namespace floqflow {

// lambda, normH0, normH1, P, Q
void write_flow_csv(const std::filesystem::path& path, const FlowTrajectory& traj);

// Trajectory summary with the config echo and provenance (version, git hash, step).
Json flow_to_json(const FlowTrajectory& traj, const Json& config_echo);

// lambda, A0, A1, ReB0, ImB0, ReB1, ImB1, ReC1, ImC1
void write_oscillator_csv(const std::filesystem::path& path,
                          const std::vector<OscillatorState>& traj);

// ratio, residual
void write_scan_csv(const std::filesystem::path& path, const std::vector<FreezingPoint>& points);

// n, t, s_exact, s_eff
void write_series_csv(const std::filesystem::path& path, const std::vector<EntropySample>& series);

// log10_delta_bin, count (bin centres)
void write_histogram_csv(const std::filesystem::path& path, const QuasienergyReport& report);

// {omega_tilde, lambda_tilde, rss, window, concurrent_h0_step, ...}
Json fit_to_json(const InstantonFit& fit);

Json provenance();

// Writes JSON with a trailing newline, failing loudly.
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace floqflow

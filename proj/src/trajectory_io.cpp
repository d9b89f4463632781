#include "floqflow/trajectory_io.hpp"

#include <fstream>

#include "floqflow/csv.hpp"
#include "floqflow/errors.hpp"

namespace floqflow {

void write_flow_csv(const std::filesystem::path& path, const FlowTrajectory& traj) {
  CsvWriter w(path, {"lambda", "normH0", "normH1", "P", "Q"});
  for (const auto& s : traj.samples) w.row({s.lambda, s.norm_h0, s.norm_h1, s.P, s.Q});
  w.close();
}

namespace {

// JSON has no NaN/Inf; those become null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json flow_to_json(const FlowTrajectory& traj, const Json& config_echo) {
  Json samples = Json::array();
  for (const auto& s : traj.samples) {
    samples.push_back({{"lambda", s.lambda},
                       {"normH0", s.norm_h0},
                       {"normH1", s.norm_h1},
                       {"P", number_or_null(s.P)},
                       {"Q", number_or_null(s.Q)}});
  }
  return {{"provenance", provenance()},
          {"config", config_echo},
          {"omega", traj.omega},
          {"step", traj.step},
          {"record_stride", traj.record_stride},
          {"stopped_early", traj.stopped_early},
          {"samples", samples}};
}

void write_oscillator_csv(const std::filesystem::path& path,
                          const std::vector<OscillatorState>& traj) {
  CsvWriter w(path, {"lambda", "A0", "A1", "ReB0", "ImB0", "ReB1", "ImB1", "ReC1", "ImC1"});
  for (const auto& s : traj)
    w.row({s.lambda, s.A0, s.A1, s.B0.real(), s.B0.imag(), s.B1.real(), s.B1.imag(), s.C1.real(),
           s.C1.imag()});
  w.close();
}

void write_scan_csv(const std::filesystem::path& path, const std::vector<FreezingPoint>& points) {
  CsvWriter w(path, {"ratio", "residual"});
  for (const auto& p : points) w.row({p.ratio, p.residual});
  w.close();
}

void write_series_csv(const std::filesystem::path& path, const std::vector<EntropySample>& series) {
  CsvWriter w(path, {"n", "t", "s_exact", "s_eff"});
  for (const auto& s : series) w.row({static_cast<double>(s.n), s.t, s.s_exact, s.s_eff});
  w.close();
}

void write_histogram_csv(const std::filesystem::path& path, const QuasienergyReport& report) {
  CsvWriter w(path, {"log10_delta_bin", "count"});
  for (int b = 0; b < kHistogramBins; ++b)
    w.row({QuasienergyReport::bin_center(b), static_cast<double>(report.histogram[b])});
  w.close();
}

Json fit_to_json(const InstantonFit& fit) {
  return {{"omega_tilde", fit.omega_tilde},
          {"lambda_tilde", fit.lambda_tilde},
          {"rss", fit.rss},
          {"relative_rms", fit.relative_rms},
          {"window", {fit.window_lo, fit.window_hi}},
          {"points", fit.points},
          {"concurrent_h0_step", fit.concurrent_h0_step},
          {"h0_step", fit.h0_step},
          {"neighbor_drift", fit.neighbor_drift}};
}

Json provenance() {
  return {{"tool", "floqflow"}, {"version", std::string(version())}, {"git_hash", std::string(git_hash())}};
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  out.close();
  if (out.fail()) throw Error("failed writing " + path.string());
}

}  // namespace floqflow

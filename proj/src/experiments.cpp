#include "floqflow/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

#include "floqflow/analytics.hpp"
#include "floqflow/csv.hpp"
#include "floqflow/dynamics.hpp"
#include "floqflow/errors.hpp"
#include "floqflow/numerics.hpp"
#include "floqflow/oscillator.hpp"
#include "floqflow/trajectory_io.hpp"

namespace floqflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem, i, ext);
  return buf;
}

class Progress {
 public:
  explicit Progress(const RunContext& ctx) : out_(ctx.log) {}
  void line(const std::string& s) {
    if (!out_) return;
    std::lock_guard lock(mu_);
    *out_ << s << '\n' << std::flush;
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

std::string fmt(double v) { return format_double(v); }

}  // namespace

ChainFlowPoint flow_chain_point(SpinChainParams p, double ratio, double step, double lambda_c,
                                int record_stride, bool keep_final_matrices) {
  p.A = ratio * p.Omega;
  p.validate();
  FlowConfig fc;
  fc.omega = p.Omega;
  fc.step = step;
  fc.lambda_max = lambda_c;
  fc.record_stride = record_stride > 0 ? record_stride : static_cast<int>(fc.step_count());
  fc.validate();
  const OperatorMatrix charge = build_charge(p.L);
  ChainFlowPoint out;
  out.ratio = ratio;
  out.trajectory = run_flow(build_static(p), build_drive(p), fc, &charge);
  const auto& samples = out.trajectory.samples;
  out.P0 = samples.front().P;
  out.P = samples.back().P;
  out.Q = samples.back().Q;
  if (!keep_final_matrices) out.trajectory.final_state = FlowState{};
  return out;
}

std::vector<std::size_t> freezing_minima(const std::vector<double>& P) {
  return find_dips(P, kFreezingContrast);
}

int count_P_dips(const FlowTrajectory& traj, double depth) {
  return static_cast<int>(find_dips(traj.P(), depth).size());
}

double magnus_distance(const SpinChainParams& p, const OperatorMatrix& h0_flowed) {
  const OperatorMatrix ref = magnus_leading(p);
  return frobenius_distance(h0_flowed, ref) / frobenius_norm(build_static(p));
}

// ---------------------------------------------------------------------------

Json cmd_oscillator(const ExperimentConfig& cfg, const RunContext& ctx) {
  Progress log(ctx);
  OscillatorParams p = cfg.oscillator();
  const double step_omega = cfg.number("oscillator.step_omega");
  const std::vector<double> grid = cfg.grid("scan.ratios");
  const std::vector<double> traj_ratios = cfg.numbers("scan.trajectory_ratios");
  const int stride = cfg.integer("scan.trajectory_stride");
  if (stride < 1) throw ConfigError("scan.trajectory_stride must be >= 1");

  log.line("oscillator: scanning " + std::to_string(grid.size()) + " ratios");
  const FreezingScan scan = find_freezing_points(p, grid, step_omega);
  write_scan_csv(ctx.out_dir / "freezing_scan.csv", scan.grid);
  write_scan_csv(ctx.out_dir / "freezing_minima.csv", scan.minima);

  Json trajectories = Json::array();
  for (std::size_t k = 0; k < traj_ratios.size(); ++k) {
    OscillatorParams q = p;
    q.A = traj_ratios[k] * p.Omega;
    FlowConfig fc;
    fc.omega = p.Omega;
    fc.step = step_omega / p.Omega;
    fc.lambda_max = kOscillatorEndOmegaLambda / p.Omega;
    fc.record_stride = stride;
    const auto traj = run_oscillator(q, fc);
    const std::string file = indexed("trajectory", k, ".csv");
    write_oscillator_csv(ctx.out_dir / file, traj);
    trajectories.push_back({{"ratio", traj_ratios[k]},
                            {"file", file},
                            {"B0_end", {traj.back().B0.real(), traj.back().B0.imag()}},
                            {"B0_sign_changes", count_b0_sign_changes(traj)}});
  }

  Json minima = Json::array();
  for (const auto& m : scan.minima) minima.push_back({{"ratio", m.ratio}, {"residual", m.residual}});
  return {{"minima", minima},
          {"degenerate", scan.degenerate},
          {"trajectories", trajectories},
          {"outputs", {"freezing_scan.csv", "freezing_minima.csv"}}};
}

// ---------------------------------------------------------------------------

Json cmd_scan_freezing(const ExperimentConfig& cfg, const RunContext& ctx) {
  Progress log(ctx);
  const SpinChainParams base = cfg.chain();
  const double step = cfg.number("flow.step");
  const double lambda_c = cfg.number("flow.lambda_c");
  const std::vector<double> ratios = cfg.grid("scan.ratios");
  const bool refine = cfg.boolean("scan.refine");
  const double tol = cfg.number("scan.refine_tolerance");
  const bool save = cfg.boolean("scan.save_trajectories");
  std::vector<double> bx_values = cfg.numbers("scan.Bx_values");
  if (bx_values.empty()) bx_values.push_back(base.Bx);
  if (refine && !(tol > 0.0)) throw ConfigError("scan.refine_tolerance must be positive");

  Json per_bx = Json::array();
  for (std::size_t b = 0; b < bx_values.size(); ++b) {
    SpinChainParams p = base;
    p.Bx = bx_values[b];
    const std::string tag = bx_values.size() > 1 ? indexed("_bx", b, "") : std::string();

    auto points = parallel_map<ChainFlowPoint>(ratios.size(), ctx.threads, [&](std::size_t i) {
      auto pt = flow_chain_point(p, ratios[i], step, lambda_c, 1);
      log.line("scan-freezing: Bx=" + fmt(p.Bx) + " ratio=" + fmt(ratios[i]) +
               " P=" + fmt(pt.P));
      return pt;
    });

    {
      CsvWriter w(ctx.out_dir / ("scan" + tag + ".csv"), {"ratio", "P0", "P", "Q"});
      for (const auto& pt : points) w.row({pt.ratio, pt.P0, pt.P, pt.Q});
      w.close();
    }
    if (save) {
      std::filesystem::create_directories(ctx.out_dir / ("trajectories" + tag));
      for (std::size_t i = 0; i < points.size(); ++i)
        write_flow_csv(ctx.out_dir / ("trajectories" + tag) / indexed("flow", i, ".csv"),
                       points[i].trajectory);
    }

    std::vector<double> P;
    for (const auto& pt : points) P.push_back(pt.P);
    const auto idx = freezing_minima(P);

    // Each minimum is refined between its grid neighbours; the refined
    // trajectory carries the dip count.
    auto refined = parallel_map<Json>(idx.size(), ctx.threads, [&](std::size_t k) {
      const std::size_t i = idx[k];
      double r = ratios[i];
      double Pmin = P[i];
      int evals = 0;
      if (refine) {
        const auto g = golden_section(
            [&](double x) { return flow_chain_point(p, x, step, lambda_c).P; }, ratios[i - 1],
            ratios[i + 1], tol);
        if (g.fx < Pmin) {
          r = g.x;
          Pmin = g.fx;
        }
        evals = g.evaluations;
      }
      const auto pt = flow_chain_point(p, r, step, lambda_c, 1);
      const std::string file = "minimum" + tag + indexed("", k, ".csv");
      write_flow_csv(ctx.out_dir / file, pt.trajectory);
      log.line("scan-freezing: minimum near " + fmt(r));
      return Json{{"grid_ratio", ratios[i]},
                  {"ratio", r},
                  {"P", pt.P},
                  {"P0", pt.P0},
                  {"Q", pt.Q},
                  {"suppression", pt.P0 / pt.P},
                  {"dips", count_P_dips(pt.trajectory)},
                  {"evaluations", evals},
                  {"trajectory", file}};
    });
    per_bx.push_back({{"Bx", p.Bx}, {"minima", refined}, {"scan", "scan" + tag + ".csv"}});
  }
  return {{"lambda_c", lambda_c}, {"step", step}, {"scans", per_bx}};
}

// ---------------------------------------------------------------------------

Json cmd_frequency_scaling(const ExperimentConfig& cfg, const RunContext& ctx) {
  Progress log(ctx);
  const SpinChainParams base = cfg.chain();
  const double step_omega = cfg.number("flow.step_omega");
  const double lambda_c = cfg.number("flow.lambda_c");
  const std::vector<double> omegas = cfg.grid("scan.omegas");
  const double lo = cfg.number("scan.ratio_lo");
  const double hi = cfg.number("scan.ratio_hi");
  const double tol = cfg.number("scan.refine_tolerance");
  if (omegas.size() < 2) throw ConfigError("frequency-scaling needs at least two frequencies");
  if (!(hi > lo)) throw ConfigError("scan.ratio_hi must exceed scan.ratio_lo");

  struct Row {
    double omega, ratio, P, Q, magnus;
  };
  auto rows = parallel_map<Row>(omegas.size(), ctx.threads, [&](std::size_t i) {
    SpinChainParams p = base;
    p.Omega = omegas[i];
    const double step = step_omega / p.Omega;
    const auto g = golden_section(
        [&](double x) { return flow_chain_point(p, x, step, lambda_c).P; }, lo, hi, tol);
    const auto pt = flow_chain_point(p, g.x, step, lambda_c, 0, true);
    p.A = g.x * p.Omega;
    const double d = magnus_distance(p, pt.trajectory.final_state.h0);
    log.line("frequency-scaling: Omega=" + fmt(p.Omega) + " ratio=" + fmt(g.x) +
             " P=" + fmt(pt.P));
    return Row{p.Omega, g.x, pt.P, pt.Q, d};
  });

  CsvWriter w(ctx.out_dir / "frequency_scaling.csv",
              {"Omega", "ratio", "P", "Q", "magnus_distance"});
  std::vector<double> logw, logP, logD, W, logQ;
  for (const auto& r : rows) {
    w.row({r.omega, r.ratio, r.P, r.Q, r.magnus});
    logw.push_back(std::log(r.omega));
    logP.push_back(std::log(r.P));
    logD.push_back(std::log(r.magnus));
    W.push_back(r.omega);
    logQ.push_back(std::log(r.Q));
  }
  w.close();
  const LineFit fp = fit_line(logw, logP);
  const LineFit fd = fit_line(logw, logD);
  const LineFit fq = fit_line(W, logQ);
  return {{"P_loglog_slope", fp.slope},
          {"P_loglog_r2", fp.r2},
          {"magnus_loglog_slope", fd.slope},
          {"magnus_loglog_r2", fd.r2},
          {"logQ_vs_Omega_slope", fq.slope},
          {"logQ_vs_Omega_r2", fq.r2},
          {"outputs", {"frequency_scaling.csv"}}};
}

// ---------------------------------------------------------------------------

namespace {

// Stops once ||H1|| has risen `prominence` times above its running minimum and
// post_lambda has elapsed since, or once it falls below the floating-point floor.
FlowObserver minimum_stopper(double post_lambda, double prominence) {
  struct S {
    double first = -1.0, min = std::numeric_limits<double>::infinity(), at = 0.0;
    bool confirmed = false;
  };
  auto st = std::make_shared<S>();
  return [st, post_lambda, prominence](const FlowState&, const FlowSample& s) {
    if (st->first < 0.0) st->first = s.norm_h1;
    if (s.norm_h1 < kFloatingPointFloor * st->first) return false;
    if (!st->confirmed && s.norm_h1 < st->min) {
      st->min = s.norm_h1;
      st->at = s.lambda;
    }
    if (!st->confirmed && s.norm_h1 >= prominence * st->min) {
      st->confirmed = true;
      st->at = s.lambda;
    }
    return !(st->confirmed && s.lambda - st->at >= post_lambda);
  };
}

}  // namespace

Json cmd_thermalize(const ExperimentConfig& cfg, const RunContext& ctx) {
  Progress log(ctx);
  const SpinChainParams base = cfg.chain();
  FlowConfig fc;
  fc.omega = base.Omega;
  fc.step = cfg.number("flow.step");
  fc.lambda_max = cfg.number("flow.lambda_max");
  fc.record_stride = cfg.integer("flow.record_stride");
  fc.validate();
  const std::vector<double> j2s = cfg.numbers("thermalize.J2_values");
  const std::vector<double> ratios = cfg.numbers("thermalize.ratios");
  const bool stop_early = cfg.boolean("thermalize.stop_after_minimum");
  const double post = cfg.number("thermalize.post_minimum_lambda");
  const bool fit = cfg.boolean("thermalize.fit_instantons");
  const double prominence = cfg.number("thermalize.minimum_prominence");
  if (!(prominence > 1.0)) throw ConfigError("thermalize.minimum_prominence must exceed 1");
  if (j2s.empty() || ratios.empty())
    throw ConfigError("thermalize needs non-empty J2_values and ratios");

  const std::size_t n = j2s.size() * ratios.size();
  auto runs = parallel_map<Json>(n, ctx.threads, [&](std::size_t k) {
    SpinChainParams p = base;
    p.J2 = j2s[k / ratios.size()];
    const double ratio = ratios[k % ratios.size()];
    p.A = ratio * p.Omega;
    p.validate();
    const OperatorMatrix charge = build_charge(p.L);
    const auto traj = run_flow(build_static(p), build_drive(p), fc, &charge,
                               stop_early ? minimum_stopper(post, prominence) : FlowObserver{});
    const std::string file = indexed("flow", k, ".csv");
    write_flow_csv(ctx.out_dir / file, traj);

    Json r{{"J2", p.J2}, {"ratio", ratio}, {"trajectory", file},
           {"lambda_end", traj.samples.back().lambda}, {"stopped_early", traj.stopped_early}};
    double after = 0.0;
    try {
      const auto m = detect_lambda_min(traj, prominence);
      r["lambda_min"] = m.lambda_min;
      r["normH1_min"] = m.norm_min;
      r["status"] = "minimum";
      after = m.lambda_min;
    } catch (const NoMinimumError& e) {
      r["lambda_min"] = nullptr;
      r["normH1_min"] = nullptr;
      r["status"] = e.reason() == NoMinimumError::Reason::floating_point_floor
                        ? "floating_point_floor"
                        : "no_minimum";
      r["last_valid_lambda"] = e.last_valid_lambda();
    }
    if (fit) {
      Json fits = Json::array();
      try {
        for (const auto& f : fit_all_instantons(traj, after)) fits.push_back(fit_to_json(f));
        r["instantons"] = fits;
      } catch (const FitError& e) {
        r["instantons"] = fits;
        r["fit_error"] = e.what();
      }
      const auto peaks = detect_peaks(traj.norm_h1(), traj.lambdas());
      Json pk = Json::array();
      for (const auto& q : peaks)
        pk.push_back({{"lambda", q.lambda}, {"height", q.height},
                      {"prominence_ratio", q.prominence_ratio}});
      r["peaks"] = pk;
    }
    log.line("thermalize: J2=" + fmt(p.J2) + " ratio=" + fmt(ratio) + " " +
             r["status"].get<std::string>());
    return r;
  });

  CsvWriter w(ctx.out_dir / "lambda_min.csv", {"J2", "ratio", "lambda_min", "normH1_min"});
  for (const auto& r : runs)
    w.row({r["J2"].get<double>(), r["ratio"].get<double>(),
           r["lambda_min"].is_null() ? kNaN : r["lambda_min"].get<double>(),
           r["normH1_min"].is_null() ? kNaN : r["normH1_min"].get<double>()});
  w.close();
  return {{"runs", runs}, {"outputs", {"lambda_min.csv"}}};
}

// ---------------------------------------------------------------------------

Json cmd_dynamics(const ExperimentConfig& cfg, const RunContext& ctx) {
  Progress log(ctx);
  const SpinChainParams base = cfg.chain();
  const double step = cfg.number("flow.step");
  const double lambda_c = cfg.number("flow.lambda_c");
  const std::vector<double> ratios = cfg.numbers("dynamics.ratios");
  const int n_periods = cfg.integer("dynamics.n_periods");
  const int substeps_cfg = cfg.integer("dynamics.substeps");
  const auto scheme = parse_scheme(cfg.string("dynamics.scheme"));
  const bool histogram = cfg.boolean("dynamics.histogram");
  const bool series = cfg.boolean("dynamics.series");
  if (!scheme) throw ConfigError("dynamics.scheme must be 'split4' or 'midpoint'");
  if (n_periods < 0) throw ConfigError("dynamics.n_periods must be >= 0");
  if (ratios.empty()) throw ConfigError("dynamics.ratios must be non-empty");

  auto results = parallel_map<Json>(ratios.size(), ctx.threads, [&](std::size_t k) {
    SpinChainParams p = base;
    p.A = ratios[k] * p.Omega;
    p.validate();
    const int substeps = substeps_cfg > 0 ? substeps_cfg : default_substeps(p, *scheme);
    const auto pt = flow_chain_point(base, ratios[k], step, lambda_c, 0, true);
    const OperatorMatrix& h0 = pt.trajectory.final_state.h0;
    const OperatorMatrix u = floquet_unitary(p, 0.0, substeps, *scheme);
    Json r{{"ratio", ratios[k]},
           {"substeps", substeps},
           {"unitarity_defect", unitarity_defect(u)},
           {"Q_lambda_c", pt.Q},
           {"P_lambda_c", pt.P}};
    if (series) {
      const auto s = stroboscopic_series(p, u, h0, n_periods);
      const std::string file = indexed("series", k, ".csv");
      write_series_csv(ctx.out_dir / file, s);
      double max_diff = 0.0, integrated = 0.0;
      for (const auto& e : s) {
        max_diff = std::max(max_diff, std::abs(e.s_exact - e.s_eff));
        integrated += e.s_exact;
      }
      r["series"] = file;
      r["max_entropy_difference"] = max_diff;
      r["integrated_entropy"] = integrated;
    }
    if (histogram) {
      const auto rep = compare_quasienergies(quasienergies(u, p.Omega), eigh(h0).eigenvalues,
                                             p.Omega, pt.Q);
      const std::string file = indexed("histogram", k, ".csv");
      write_histogram_csv(ctx.out_dir / file, rep);
      r["histogram"] = file;
      r["median_delta"] = finite_or_null(rep.median_delta);
      r["mode_log10_delta"] = QuasienergyReport::bin_center(rep.mode_bin());
      r["excluded"] = rep.excluded.size();
      r["fold_events"] = rep.fold_events;
      r["zone_shift"] = rep.zone_shift;
      r["unconverged"] = rep.unconverged;
    }
    log.line("dynamics: ratio=" + fmt(ratios[k]) + " done");
    return r;
  });
  return {{"runs", results}};
}

// ---------------------------------------------------------------------------

Json run_command(const ExperimentConfig& cfg, const RunContext& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + ctx.out_dir.string());
  write_json(ctx.out_dir / "config.json", cfg.json());

  const std::string& c = cfg.command();
  Json results;
  if (c == "oscillator") results = cmd_oscillator(cfg, ctx);
  else if (c == "scan-freezing") results = cmd_scan_freezing(cfg, ctx);
  else if (c == "frequency-scaling") results = cmd_frequency_scaling(cfg, ctx);
  else if (c == "thermalize") results = cmd_thermalize(cfg, ctx);
  else if (c == "dynamics") results = cmd_dynamics(cfg, ctx);
  else throw ConfigError("unknown command '" + c + "'");

  Json manifest{{"command", c},
                {"provenance", provenance()},
                {"config", cfg.json()},
                {"results", results}};
  write_json(ctx.out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace floqflow

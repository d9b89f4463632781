#include "floqflow/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floqflow/errors.hpp"
#include "floqflow/numerics.hpp"
#include "floqflow/special.hpp"

namespace floqflow {

void OscillatorParams::validate() const {
  if (!(Omega > 0.0) || !std::isfinite(Omega))
    throw PreconditionError("oscillator: Omega must be positive");
  if (!std::isfinite(omega0) || !std::isfinite(omega1) || !std::isfinite(A))
    throw PreconditionError("oscillator: parameters must be finite");
}

OscillatorState oscillator_initial(const OscillatorParams& p) {
  OscillatorState s;
  s.A0 = p.omega0;
  s.A1 = 0.5 * p.A;
  s.B0 = p.omega1;
  return s;
}

OscillatorState oscillator_rhs(const OscillatorState& s, const OscillatorParams& p) {
  OscillatorState d;
  d.lambda = 1.0;
  d.A0 = 0.0;
  d.A1 = -p.Omega * s.A1;
  d.B0 = 2.0 * s.A1 * (s.C1 - s.B1);
  d.B1 = -p.Omega * s.B1 - s.A0 * s.B1 + s.A1 * s.B0;
  d.C1 = -p.Omega * s.C1 + s.A0 * s.C1 - s.A1 * s.B0;
  return d;
}

namespace {

OscillatorState shifted(const OscillatorState& s, double h, const OscillatorState& d) {
  OscillatorState o;
  o.lambda = s.lambda + h * d.lambda;
  o.A0 = s.A0 + h * d.A0;
  o.A1 = s.A1 + h * d.A1;
  o.B0 = s.B0 + h * d.B0;
  o.B1 = s.B1 + h * d.B1;
  o.C1 = s.C1 + h * d.C1;
  return o;
}

}  // namespace

OscillatorState oscillator_rk4_step(const OscillatorState& s, const OscillatorParams& p, double h) {
  const OscillatorState k1 = oscillator_rhs(s, p);
  const OscillatorState k2 = oscillator_rhs(shifted(s, 0.5 * h, k1), p);
  const OscillatorState k3 = oscillator_rhs(shifted(s, 0.5 * h, k2), p);
  const OscillatorState k4 = oscillator_rhs(shifted(s, h, k3), p);
  OscillatorState o = s;
  o = shifted(o, h / 6.0, k1);
  o = shifted(o, h / 3.0, k2);
  o = shifted(o, h / 3.0, k3);
  o = shifted(o, h / 6.0, k4);
  o.lambda = s.lambda + h;
  const bool finite = std::isfinite(o.A1) && std::isfinite(std::abs(o.B0)) &&
                      std::isfinite(std::abs(o.B1)) && std::isfinite(std::abs(o.C1));
  if (!finite) throw IntegrationFailure("oscillator: non-finite coefficients", s.lambda);
  return o;
}

std::vector<OscillatorState> run_oscillator(const OscillatorParams& p, const FlowConfig& cfg) {
  p.validate();
  FlowConfig c = cfg;
  c.omega = p.Omega;
  c.validate();
  const std::size_t n = c.step_count();
  std::vector<OscillatorState> out;
  out.reserve(n / static_cast<std::size_t>(c.record_stride) + 2);
  OscillatorState s = oscillator_initial(p);
  out.push_back(s);
  for (std::size_t i = 1; i <= n; ++i) {
    s = oscillator_rk4_step(s, p, c.step);
    s.lambda = static_cast<double>(i) * c.step;
    if (i % static_cast<std::size_t>(c.record_stride) == 0 || i == n) out.push_back(s);
  }
  return out;
}

cplx analytic_B0(const OscillatorParams& p, double lambda) {
  p.validate();
  return p.omega1 * flow_kernel_f(p.A / p.Omega, lambda, p.Omega);
}

double freezing_residual(const OscillatorParams& p, double ratio, double step_omega) {
  OscillatorParams q = p;
  q.A = ratio * p.Omega;
  q.validate();
  const double h = step_omega / p.Omega;
  const auto steps = static_cast<std::size_t>(std::ceil(kOscillatorEndOmegaLambda / step_omega));
  OscillatorState s = oscillator_initial(q);
  for (std::size_t i = 0; i < steps; ++i) s = oscillator_rk4_step(s, q, h);
  return std::abs(s.B0);
}

FreezingScan find_freezing_points(const OscillatorParams& p, const std::vector<double>& ratio_grid,
                                  double step_omega) {
  if (ratio_grid.empty()) throw PreconditionError("find_freezing_points: empty ratio grid");
  if (!std::is_sorted(ratio_grid.begin(), ratio_grid.end()) ||
      std::adjacent_find(ratio_grid.begin(), ratio_grid.end()) != ratio_grid.end())
    throw PreconditionError("find_freezing_points: ratio grid must be strictly increasing");

  FreezingScan scan;
  for (double r : ratio_grid) scan.grid.push_back({r, freezing_residual(p, r, step_omega)});
  if (p.omega1 == 0.0) {
    scan.degenerate = true;
    return scan;
  }

  auto residual = [&](double r) { return freezing_residual(p, r, step_omega); };
  const auto& g = scan.grid;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    if (!(g[i].residual < g[i - 1].residual && g[i].residual <= g[i + 1].residual)) continue;
    const auto best = golden_section(residual, g[i - 1].ratio, g[i + 1].ratio,
                                     kFreezingRatioTolerance);
    const double r = best.x;
    scan.minima.push_back({r, residual(r)});
  }
  return scan;
}

int count_b0_sign_changes(const std::vector<OscillatorState>& traj) {
  double scale = 0.0;
  for (const auto& s : traj) scale = std::max(scale, std::abs(s.B0.real()));
  // Residual wiggles around a vanishing plateau are not crossings.
  const double floor = kSignChangeFloor * scale;
  int changes = 0;
  double prev = 0.0;
  for (const auto& s : traj) {
    const double v = s.B0.real();
    if (std::abs(v) <= floor) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
    prev = v;
  }
  return changes;
}

FockEmbedding embed_oscillator(const OscillatorParams& p, std::size_t levels) {
  p.validate();
  if (levels < 2) throw PreconditionError("embed_oscillator: need at least two levels");
  FockEmbedding e{OperatorMatrix(levels), OperatorMatrix(levels)};
  for (std::size_t n = 0; n < levels; ++n) {
    e.h0.set(n, n, p.omega0 * static_cast<double>(n));
    e.h1.set(n, n, 0.5 * p.A * static_cast<double>(n));
    if (n + 1 < levels) {
      const double amp = std::sqrt(static_cast<double>(n + 1));
      e.h0.set(n + 1, n, p.omega1 * amp);
      e.h0.set(n, n + 1, p.omega1 * amp);
    }
  }
  return e;
}

OscillatorState extract_oscillator(const OperatorMatrix& h0, const OperatorMatrix& h1,
                                   double lambda) {
  if (h0.dim() < 2 || h1.dim() != h0.dim())
    throw ContractViolation("extract_oscillator: need matching matrices of dimension >= 2");
  OscillatorState s;
  s.lambda = lambda;
  s.A0 = (h0(1, 1) - h0(0, 0)).real();
  s.A1 = (h1(1, 1) - h1(0, 0)).real();
  s.B0 = h0(1, 0);
  s.B1 = h1(1, 0);
  s.C1 = std::conj(h1(0, 1));
  return s;
}

}  // namespace floqflow

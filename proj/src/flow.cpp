#include "floqflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floqflow/errors.hpp"

namespace floqflow {

void FlowConfig::validate() const {
  std::ostringstream msg;
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    msg << "flow: omega must be positive (got " << omega << ")";
  } else if (!(step > 0.0) || !std::isfinite(step)) {
    msg << "flow: step must be positive (got " << step << ")";
  } else if (step * omega > kMaxStepOmega * (1.0 + 1e-12)) {
    msg << "flow: step*omega = " << step * omega << " exceeds stability guard " << kMaxStepOmega;
  } else if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max)) {
    msg << "flow: lambda_max must be non-negative (got " << lambda_max << ")";
  } else if (record_stride < 1) {
    msg << "flow: record_stride must be >= 1 (got " << record_stride << ")";
  } else {
    return;
  }
  throw PreconditionError(msg.str());
}

std::size_t FlowConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(std::ceil(lambda_max / step - 1e-9)));
}

namespace {

template <class F>
std::vector<double> column(const std::vector<FlowSample>& samples, F f) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(f(s));
  return out;
}

}  // namespace

std::vector<double> FlowTrajectory::lambdas() const {
  return column(samples, [](const FlowSample& s) { return s.lambda; });
}
std::vector<double> FlowTrajectory::norm_h0() const {
  return column(samples, [](const FlowSample& s) { return s.norm_h0; });
}
std::vector<double> FlowTrajectory::norm_h1() const {
  return column(samples, [](const FlowSample& s) { return s.norm_h1; });
}
std::vector<double> FlowTrajectory::P() const {
  return column(samples, [](const FlowSample& s) { return s.P; });
}
std::vector<double> FlowTrajectory::Q() const {
  return column(samples, [](const FlowSample& s) { return s.Q; });
}

void flow_rhs_into(const OperatorMatrix& h0, const OperatorMatrix& h1, double omega,
                   OperatorMatrix& dh0, OperatorMatrix& dh1) {
  if (h0.dim() != h1.dim()) throw ContractViolation("flow_rhs: dimension mismatch");
  commutator_into(h1, Op::none, h1, Op::adjoint, 2.0, dh0);
  gemm(-1.0, h0, Op::none, h1, Op::none, 0.0, dh1);
  gemm(1.0, h1, Op::none, h0, Op::none, 1.0, dh1);
  dh1.axpy(-omega, h1);
}

FlowDerivative flow_rhs(const FlowState& s, double omega) {
  FlowDerivative d;
  flow_rhs_into(s.h0, s.h1, omega, d.dh0, d.dh1);
  return d;
}

void Rk4Workspace::step(FlowState& s, double omega, double h) {
  if (!(h > 0.0)) throw PreconditionError("rk4_step: step must be positive");
  flow_rhs_into(s.h0, s.h1, omega, k0_, k1_);
  acc0_.assign_combination(1.0, s.h0, h / 6.0, k0_);
  acc1_.assign_combination(1.0, s.h1, h / 6.0, k1_);

  const double mid[3] = {0.5 * h, 0.5 * h, h};
  const double weight[3] = {h / 3.0, h / 3.0, h / 6.0};
  for (int stage = 0; stage < 3; ++stage) {
    y0_.assign_combination(1.0, s.h0, mid[stage], k0_);
    y1_.assign_combination(1.0, s.h1, mid[stage], k1_);
    flow_rhs_into(y0_, y1_, omega, k0_, k1_);
    acc0_.axpy(weight[stage], k0_);
    acc1_.axpy(weight[stage], k1_);
  }

  if (!acc0_.all_finite() || !acc1_.all_finite()) {
    std::ostringstream msg;
    msg << "rk4_step: non-finite entries after step from lambda=" << s.lambda;
    throw IntegrationFailure(msg.str(), s.lambda);
  }
  std::swap(s.h0, acc0_);
  std::swap(s.h1, acc1_);
  s.lambda += h;
}

FlowState rk4_step(const FlowState& s, double omega, double h) {
  FlowState out = s;
  Rk4Workspace ws;
  ws.step(out, omega, h);
  return out;
}

double diag_P(const OperatorMatrix& h0, const OperatorMatrix& charge) {
  const double n0 = frobenius_norm(h0);
  if (n0 == 0.0) throw UndefinedDiagnostic("P: ||H0|| = 0");
  return frobenius_norm(commutator(h0, charge)) / n0;
}

double diag_Q(const OperatorMatrix& h0, const OperatorMatrix& h1) {
  const double n0 = frobenius_norm(h0);
  if (n0 == 0.0) throw UndefinedDiagnostic("Q: ||H0|| = 0");
  return frobenius_norm(h1) / n0;
}

double t_eff(const OperatorMatrix& h1) {
  const double n1 = frobenius_norm(h1);
  if (n1 == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(static_cast<double>(h1.dim())) / n1;
}

namespace {

FlowSample make_sample(const FlowState& s, const FlowConfig& cfg, const OperatorMatrix* charge,
                       OperatorMatrix& scratch) {
  FlowSample out;
  out.lambda = s.lambda;
  out.norm_h0 = frobenius_norm(s.h0);
  out.norm_h1 = frobenius_norm(s.h1);
  if (out.norm_h0 > 0.0) {
    out.Q = out.norm_h1 / out.norm_h0;
    if (charge) {
      commutator_into(s.h0, Op::none, *charge, Op::none, 1.0, scratch);
      out.P = frobenius_norm(scratch) / out.norm_h0;
    }
  }
  if (cfg.store_spectrum) out.spectrum = eigh(s.h0).eigenvalues;
  if (cfg.store_matrices) {
    out.h0 = s.h0;
    out.h1 = s.h1;
  }
  return out;
}

}  // namespace

FlowTrajectory run_flow(const OperatorMatrix& h0_init, const OperatorMatrix& h1_init,
                        const FlowConfig& cfg, const OperatorMatrix* charge,
                        const FlowObserver& observer) {
  cfg.validate();
  if (h0_init.dim() != h1_init.dim()) throw ContractViolation("run_flow: dimension mismatch");
  if (charge && charge->dim() != h0_init.dim())
    throw ContractViolation("run_flow: charge dimension mismatch");
  if (hermiticity_defect(h0_init) > kHermitianTolerance ||
      hermiticity_defect(h1_init) > kHermitianTolerance)
    throw PreconditionError("run_flow: initial H0 and H1 must be Hermitian");

  FlowTrajectory traj;
  traj.omega = cfg.omega;
  traj.step = cfg.step;
  traj.record_stride = cfg.record_stride;

  FlowState state{0.0, h0_init, h1_init};
  OperatorMatrix scratch;
  Rk4Workspace ws;

  auto record = [&]() {
    traj.samples.push_back(make_sample(state, cfg, charge, scratch));
    return !observer || observer(state, traj.samples.back());
  };

  const std::size_t n = cfg.step_count();
  bool keep_going = record();
  for (std::size_t i = 1; i <= n && keep_going; ++i) {
    ws.step(state, cfg.omega, cfg.step);
    state.lambda = static_cast<double>(i) * cfg.step;
    if (i % static_cast<std::size_t>(cfg.record_stride) == 0 || i == n) keep_going = record();
  }
  traj.stopped_early = !keep_going;
  traj.final_state = std::move(state);
  return traj;
}

LambdaMinimum detect_lambda_min(const std::vector<double>& lambda,
                                const std::vector<double>& norm_h1, double prominence) {
  if (!(prominence > 1.0)) throw PreconditionError("detect_lambda_min: prominence must exceed 1");
  const std::size_t n = norm_h1.size();
  if (lambda.size() != n) throw ContractViolation("detect_lambda_min: length mismatch");
  if (n == 0) throw NoMinimumError("detect_lambda_min: empty trajectory",
                                   NoMinimumError::Reason::monotone, 0.0);
  const double floor = kFloatingPointFloor * norm_h1.front();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (norm_h1[i] < floor) {
      std::ostringstream msg;
      msg << "detect_lambda_min: ||H1|| fell below the floating-point floor at lambda="
          << lambda[i];
      throw NoMinimumError(msg.str(), NoMinimumError::Reason::floating_point_floor,
                           lambda[i - 1]);
    }
    if (!(norm_h1[i] < norm_h1[i - 1] && norm_h1[i] < norm_h1[i + 1])) continue;
    double peak = norm_h1[i];
    for (std::size_t j = i + 1; j < n && norm_h1[j] >= norm_h1[i]; ++j)
      peak = std::max(peak, norm_h1[j]);
    if (peak >= prominence * norm_h1[i]) return {lambda[i], norm_h1[i], i};
  }
  if (n >= 1 && norm_h1.back() < floor) {
    throw NoMinimumError("detect_lambda_min: ||H1|| fell below the floating-point floor",
                         NoMinimumError::Reason::floating_point_floor,
                         n >= 2 ? lambda[n - 2] : lambda[0]);
  }
  throw NoMinimumError("detect_lambda_min: no prominent minimum of ||H1||",
                       NoMinimumError::Reason::monotone, lambda.back());
}

LambdaMinimum detect_lambda_min(const FlowTrajectory& traj, double prominence) {
  return detect_lambda_min(traj.lambdas(), traj.norm_h1(), prominence);
}

double norm_balance_residual(const FlowTrajectory& traj) {
  const auto& s = traj.samples;
  const std::size_t n = s.size();
  if (n < 3) throw PreconditionError("norm_balance_residual: needs at least 3 samples");
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i)
    e[i] = s[i].norm_h0 * s[i].norm_h0 + 2.0 * s[i].norm_h1 * s[i].norm_h1;
  const double dl = s[1].lambda - s[0].lambda;
  auto uniform = [&](std::size_t i) {
    return std::abs((s[i].lambda - s[i - 1].lambda) - dl) <= 1e-9 * std::max(1.0, dl);
  };
  // A final partial stride breaks uniform spacing; that tail sample is ignored.
  const std::size_t last = uniform(n - 1) ? n : n - 1;
  for (std::size_t i = 2; i < last; ++i) {
    if (!uniform(i))
      throw PreconditionError("norm_balance_residual: samples are not uniformly spaced");
  }
  if (last < 3) throw PreconditionError("norm_balance_residual: needs at least 3 samples");
  const double scale = traj.omega * e[0];
  if (scale == 0.0) return 0.0;

  const bool five_point = last >= 5;
  const std::size_t lo = five_point ? 2 : 1;
  double worst = 0.0;
  for (std::size_t i = lo; i + lo < last; ++i) {
    double de;
    if (five_point) {
      de = (-e[i + 2] + 8.0 * e[i + 1] - 8.0 * e[i - 1] + e[i - 2]) / (12.0 * dl);
    } else {
      de = (e[i + 1] - e[i - 1]) / (2.0 * dl);
    }
    const double n1 = s[i].norm_h1;
    worst = std::max(worst, std::abs(de + 4.0 * traj.omega * n1 * n1) / scale);
  }
  return worst;
}

}  // namespace floqflow

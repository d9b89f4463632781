#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "floqflow/analytics.hpp"
#include "floqflow/errors.hpp"

namespace floqflow {

namespace {

struct TripleRate {
  double dEm, dEn;
  cplx dt;
};

TripleRate instanton_rate(const InstantonTriple& s, double omega) {
  const double t2 = std::norm(s.t);
  return {2.0 * t2, -2.0 * t2, (-omega - s.Em + s.En) * s.t};
}

InstantonTriple advance(const InstantonTriple& s, double h, const TripleRate& r) {
  return {s.Em + h * r.dEm, s.En + h * r.dEn, s.t + h * r.dt};
}

}  // namespace

InstantonTriple instanton_reduced_step(const InstantonTriple& s, double omega, double step) {
  if (!(step > 0.0)) throw PreconditionError("instanton_reduced_step: step must be positive");
  const TripleRate k1 = instanton_rate(s, omega);
  const TripleRate k2 = instanton_rate(advance(s, 0.5 * step, k1), omega);
  const TripleRate k3 = instanton_rate(advance(s, 0.5 * step, k2), omega);
  const TripleRate k4 = instanton_rate(advance(s, step, k3), omega);
  InstantonTriple out;
  out.Em = s.Em + step / 6.0 * (k1.dEm + 2.0 * k2.dEm + 2.0 * k3.dEm + k4.dEm);
  out.En = s.En + step / 6.0 * (k1.dEn + 2.0 * k2.dEn + 2.0 * k3.dEn + k4.dEn);
  out.t = s.t + step / 6.0 * (k1.dt + 2.0 * k2.dt + 2.0 * k3.dt + k4.dt);
  return out;
}

InstantonProfile instanton_closed_form(double omega, double omega_tilde, double lambda_tilde,
                                       double lambda) {
  if (!(omega_tilde > 0.0)) throw PreconditionError("instanton_closed_form: omega_tilde must be > 0");
  const double x = omega_tilde * (lambda - lambda_tilde);
  return {omega - omega_tilde * std::tanh(x), omega_tilde / (2.0 * std::cosh(x))};
}

double sech_profile(double a, double b, double lambda) {
  return 0.5 * a / std::cosh(a * (lambda - b));
}

namespace {

struct FitData {
  std::vector<double> x;
  std::vector<double> y;
};

double fit_rss(const gsl_vector* v, void* params) {
  const auto* d = static_cast<const FitData*>(params);
  const double a = gsl_vector_get(v, 0);
  const double b = gsl_vector_get(v, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < d->x.size(); ++i) {
    const double r = sech_profile(a, b, d->x[i]) - d->y[i];
    s += r * r;
  }
  return std::isfinite(s) ? s : GSL_POSINF;
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

double value_at(const std::vector<double>& lambda, const std::vector<double>& y, double at) {
  auto it = std::lower_bound(lambda.begin(), lambda.end(), at);
  if (it == lambda.end()) return y.back();
  if (it == lambda.begin()) return y.front();
  const std::size_t k = static_cast<std::size_t>(it - lambda.begin());
  const double w = (at - lambda[k - 1]) / (lambda[k] - lambda[k - 1]);
  return (1.0 - w) * y[k - 1] + w * y[k];
}

}  // namespace

InstantonFit fit_sech(const std::vector<double>& lambda, const std::vector<double>& y, double lo,
                      double hi, double a0, double b0) {
  if (lambda.size() != y.size()) throw ContractViolation("fit_sech: length mismatch");
  if (!(a0 > 0.0)) throw FitError("fit_sech: initial width parameter must be positive");
  FitData data;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] >= lo && lambda[i] <= hi) {
      data.x.push_back(lambda[i]);
      data.y.push_back(y[i]);
    }
  }
  if (data.x.size() < 4) throw FitError("fit_sech: fewer than 4 samples in the fit window");

  gsl_set_error_handler_off();
  gsl_multimin_function fn{&fit_rss, 2, &data};
  std::unique_ptr<gsl_vector, VectorDeleter> x0(gsl_vector_alloc(2));
  std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(2));
  gsl_vector_set(x0.get(), 0, a0);
  gsl_vector_set(x0.get(), 1, b0);
  gsl_vector_set(steps.get(), 0, 0.2 * a0);
  gsl_vector_set(steps.get(), 1, 0.5 / a0);
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
  gsl_multimin_fminimizer_set(m.get(), &fn, x0.get(), steps.get());

  double prev = m->fval;
  int stalled = 0;
  for (int iter = 0; iter < 20000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    const double f = m->fval;
    const double size = gsl_multimin_fminimizer_size(m.get());
    stalled = (std::abs(prev - f) <= 1e-8 * f) ? stalled + 1 : 0;
    prev = f;
    if (stalled >= 20 && size < 1e-8 * (1.0 + std::abs(gsl_vector_get(m->x, 1)))) break;
  }

  InstantonFit fit;
  fit.omega_tilde = gsl_vector_get(m->x, 0);
  fit.lambda_tilde = gsl_vector_get(m->x, 1);
  fit.rss = m->fval;
  fit.window_lo = data.x.front();
  fit.window_hi = data.x.back();
  fit.points = data.x.size();
  if (!std::isfinite(fit.rss) || !(fit.omega_tilde > 0.0) || fit.lambda_tilde < lo ||
      fit.lambda_tilde > hi) {
    std::ostringstream msg;
    msg << "fit_sech: fit diverged (a=" << fit.omega_tilde << ", b=" << fit.lambda_tilde << ")";
    throw FitError(msg.str());
  }
  double sy2 = 0.0;
  for (double v : data.y) sy2 += v * v;
  fit.relative_rms = sy2 > 0.0 ? std::sqrt(fit.rss / sy2) : 0.0;
  return fit;
}

std::vector<Peak> detect_peaks(const std::vector<double>& y, const std::vector<double>& lambda,
                               double isolation) {
  if (y.size() != lambda.size()) throw ContractViolation("detect_peaks: length mismatch");
  std::vector<Peak> peaks;
  const std::size_t n = y.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    double left = y[i];
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) break;
      left = std::min(left, y[j]);
    }
    double right = y[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] > y[i]) break;
      right = std::min(right, y[j]);
    }
    const double base = std::max(left, right);
    const double ratio = base > 0.0 ? y[i] / base : std::numeric_limits<double>::infinity();
    if (ratio >= isolation) peaks.push_back({i, lambda[i], y[i], ratio});
  }
  return peaks;
}

InstantonFit fit_instanton(const FlowTrajectory& traj, double lo, double hi) {
  const std::vector<double> lambda = traj.lambdas();
  const std::vector<double> n1 = traj.norm_h1();
  const std::vector<double> n0 = traj.norm_h0();
  std::vector<Peak> inside;
  for (const Peak& p : detect_peaks(n1, lambda))
    if (p.lambda >= lo && p.lambda <= hi) inside.push_back(p);
  if (inside.size() != 1) {
    std::ostringstream msg;
    msg << "fit_instanton: window [" << lo << ", " << hi << "] holds " << inside.size()
        << " isolated peaks, expected 1";
    throw FitError(msg.str());
  }
  const Peak& peak = inside.front();
  const double a0 = 2.0 * peak.height;
  const double w_lo = std::max(lo, peak.lambda - kFitHalfWidths / a0);
  const double w_hi = std::min(hi, peak.lambda + kFitHalfWidths / a0);
  InstantonFit fit = fit_sech(lambda, n1, w_lo, w_hi, a0, peak.lambda);

  const double width = fit.window_hi - fit.window_lo;
  fit.h0_step = std::abs(value_at(lambda, n0, fit.window_hi) - value_at(lambda, n0, fit.window_lo));
  double drift = 0.0;
  const double first = lambda.front(), last = lambda.back();
  if (fit.window_lo > first) {
    const double a = std::max(first, fit.window_lo - width);
    drift = std::max(drift, std::abs(value_at(lambda, n0, fit.window_lo) - value_at(lambda, n0, a)));
  }
  if (fit.window_hi < last) {
    const double b = std::min(last, fit.window_hi + width);
    drift = std::max(drift, std::abs(value_at(lambda, n0, b) - value_at(lambda, n0, fit.window_hi)));
  }
  fit.neighbor_drift = drift;
  fit.concurrent_h0_step = fit.h0_step >= kStepContrast * drift && fit.h0_step > 0.0;
  return fit;
}

std::vector<InstantonFit> fit_all_instantons(const FlowTrajectory& traj, double after) {
  const std::vector<double> lambda = traj.lambdas();
  std::vector<Peak> peaks;
  for (const Peak& p : detect_peaks(traj.norm_h1(), lambda))
    if (p.lambda > after) peaks.push_back(p);
  std::vector<InstantonFit> fits;
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const double lo = k == 0 ? after : 0.5 * (peaks[k - 1].lambda + peaks[k].lambda);
    const double hi =
        k + 1 == peaks.size() ? lambda.back() : 0.5 * (peaks[k].lambda + peaks[k + 1].lambda);
    fits.push_back(fit_instanton(traj, lo, hi));
  }
  return fits;
}

}  // namespace floqflow

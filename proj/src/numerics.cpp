#include "floqflow/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "floqflow/errors.hpp"

namespace floqflow {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw ContractViolation("fit_line: length mismatch");
  if (n < 2) throw PreconditionError("fit_line: needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_line: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  if (!(hi > lo)) throw PreconditionError("golden_section: empty bracket");
  if (!(tol > 0.0)) throw PreconditionError("golden_section: tolerance must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc < fd ? GoldenResult{c, fc, evals} : GoldenResult{d, fd, evals};
}

std::vector<std::size_t> find_dips(const std::vector<double>& v, double depth) {
  std::vector<std::size_t> dips;
  const std::size_t n = v.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;
    double left = v[i];
    for (std::size_t j = i; j-- > 0;) {
      if (v[j] < v[i]) break;
      left = std::max(left, v[j]);
    }
    double right = v[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[j] < v[i]) break;
      right = std::max(right, v[j]);
    }
    if (std::min(left, right) >= depth * v[i]) dips.push_back(i);
  }
  return dips;
}

}  // namespace floqflow

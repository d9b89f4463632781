#pragma once

#include <functional>
#include <vector>

namespace floqflow {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = slope * x + intercept. Needs two distinct x values.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct GoldenResult {
  double x;
  double fx;
  int evaluations;
};

// Minimizes a unimodal f on [lo, hi] until the bracket is narrower than tol.
GoldenResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                            double tol);

// Interior local minima whose shallower side rises at least `depth` times above
// the minimum. Each side's rise is the largest value reached before the series
// drops below the minimum again (or ends).
std::vector<std::size_t> find_dips(const std::vector<double>& values, double depth);

}  // namespace floqflow

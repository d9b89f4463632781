#include "floqflow/special.hpp"

#include <cmath>
#include <numbers>

#include "floqflow/errors.hpp"

namespace floqflow {

double bessel_j(int n, double x) {
  const int order = std::abs(n);
  double v = std::cyl_bessel_j(static_cast<double>(order), std::abs(x));
  if (x < 0.0 && (order % 2 == 1)) v = -v;
  if (n < 0 && (order % 2 == 1)) v = -v;
  return v;
}

double bessel_y(int n, double x) {
  if (!(x > 0.0)) throw PreconditionError("bessel_y: argument must be positive");
  const int order = std::abs(n);
  double v = std::cyl_neumann(static_cast<double>(order), x);
  if (n < 0 && (order % 2 == 1)) v = -v;
  return v;
}

double flow_kernel_f(double z, double lambda, double omega) {
  const double az = std::abs(z);
  if (az <= kKernelSmallZ) return 1.0;
  const double u = az * std::exp(-omega * lambda);
  const double j0z = std::cyl_bessel_j(0.0, az);
  // u J1(u) and the correction to u Y1(u) -> -2/pi are O(u^2 ln u) here.
  if (u < 1e-10) return j0z;
  const double y0z = std::cyl_neumann(0.0, az);
  return 0.5 * std::numbers::pi * u *
         (std::cyl_bessel_j(1.0, u) * y0z - std::cyl_neumann(1.0, u) * j0z);
}

}  // namespace floqflow

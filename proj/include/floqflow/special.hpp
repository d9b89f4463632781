#pragma once

#include <array>

namespace floqflow {

// Integer-order Bessel functions of the first and second kind for real x
// (J_n extended to x < 0 by parity; Y_n requires x > 0).
double bessel_j(int n, double x);
double bessel_y(int n, double x);

// First zeros of J0.
inline constexpr std::array<double, 5> kBesselJ0Zeros = {
    2.404825557695773, 5.520078110286311, 8.653727912911013, 11.79153443901428,
    14.93091770848779};

// First zeros of J1 (excluding the origin).
inline constexpr std::array<double, 3> kBesselJ1Zeros = {3.831705970207512, 7.015586669815619,
                                                         10.17346813506272};

inline constexpr double kKernelSmallZ = 1e-6;

// Early-time flow kernel
//   f(z, l) = (pi/2) u [J1(u) Y0(z) - Y1(u) J0(z)],  u = z exp(-Omega l).
// f(z, 0) = 1 and f(z, l -> inf) = J0(z). Even in z; f = 1 for |z| <= kKernelSmallZ.
double flow_kernel_f(double z, double lambda, double omega);

}  // namespace floqflow

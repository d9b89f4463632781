#pragma once

// Dense complex operator algebra on the many-body Hilbert space.
//
// Storage is split into row-major real and imaginary planes. The imaginary plane
// is omitted while an operator is purely real (every spin-chain flow in the
// sigma^z basis stays real), which turns complex products into single real GEMMs.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "floqflow/aligned.hpp"

namespace floqflow {

using cplx = std::complex<double>;

enum class Op { none, transpose, adjoint };

class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(std::size_t dim);

  static OperatorMatrix identity(std::size_t dim);
  static OperatorMatrix diagonal(std::span<const double> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ * dim_; }
  bool is_real() const noexcept { return im_.empty(); }

  cplx operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, cplx value);
  void add(std::size_t i, std::size_t j, cplx value);

  const double* re() const noexcept { return re_.data(); }
  double* re() noexcept { return re_.data(); }
  // nullptr while the operator is real.
  const double* im() const noexcept { return im_.empty() ? nullptr : im_.data(); }
  // Materializes a zero imaginary plane if needed.
  double* im_mut();
  void drop_imag();

  OperatorMatrix adjoint() const;
  cplx trace() const;
  bool all_finite() const;

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(double s);
  OperatorMatrix& operator*=(cplx s);

  // this += alpha * x
  void axpy(double alpha, const OperatorMatrix& x);
  // this = alpha * x + beta * y
  void assign_combination(double alpha, const OperatorMatrix& x, double beta,
                          const OperatorMatrix& y);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
  friend OperatorMatrix operator*(double s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }

 private:
  void require_same_dim(const OperatorMatrix& other, const char* what) const;

  std::size_t dim_ = 0;
  AlignedDoubles re_;
  AlignedDoubles im_;
};

// c = alpha * op(a) * op(b) + beta * c. Resizes c when beta == 0.
void gemm(double alpha, const OperatorMatrix& a, Op opa, const OperatorMatrix& b, Op opb,
          double beta, OperatorMatrix& c);

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b, Op opa = Op::none,
                        Op opb = Op::none);

// ab - ba
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

// out = scale * (op(a) op(b) - op(b) op(a)), reusing out's storage.
void commutator_into(const OperatorMatrix& a, Op opa, const OperatorMatrix& b, Op opb,
                     double scale, OperatorMatrix& out);

double frobenius_norm(const OperatorMatrix& m);
double frobenius_distance(const OperatorMatrix& a, const OperatorMatrix& b);

// ||m - m^dagger|| / ||m||, zero for the zero matrix.
double hermiticity_defect(const OperatorMatrix& m);

// U m U^dagger
OperatorMatrix conjugate(const OperatorMatrix& u, const OperatorMatrix& m);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  OperatorMatrix eigenvectors;      // columns

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  OperatorMatrix reconstruct() const;
};

inline constexpr double kHermitianTolerance = 1e-8;

// Throws PreconditionError when the relative anti-Hermitian part exceeds
// kHermitianTolerance. The Hermitian part is what gets diagonalized.
EigenDecomposition eigh(const OperatorMatrix& m);

// V f(Lambda) V^dagger
OperatorMatrix spectral_apply(const EigenDecomposition& eig,
                              const std::function<cplx(double)>& f);

// exp(scale * m) for Hermitian m.
OperatorMatrix expm_hermitian(const OperatorMatrix& m, cplx scale);
OperatorMatrix expm_hermitian(const EigenDecomposition& eig, cplx scale);

}  // namespace floqflow

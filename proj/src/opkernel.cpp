#include "floqflow/opkernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "floqflow/errors.hpp"
#include "floqflow/simd/kernels.hpp"

namespace floqflow {

namespace {

using RowMajorXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorXcd = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

simd::Trans trans_of(Op op) { return op == Op::none ? simd::Trans::no : simd::Trans::yes; }

double imag_sign(Op op) { return op == Op::adjoint ? -1.0 : 1.0; }

}  // namespace

OperatorMatrix::OperatorMatrix(std::size_t dim) : dim_(dim), re_(dim * dim, 0.0) {}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  OperatorMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.re_[i * dim + i] = 1.0;
  return m;
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const double> entries) {
  OperatorMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m.re_[i * m.dim_ + i] = entries[i];
  return m;
}

cplx OperatorMatrix::operator()(std::size_t i, std::size_t j) const {
  const std::size_t k = i * dim_ + j;
  return {re_[k], im_.empty() ? 0.0 : im_[k]};
}

void OperatorMatrix::set(std::size_t i, std::size_t j, cplx value) {
  const std::size_t k = i * dim_ + j;
  re_[k] = value.real();
  if (value.imag() != 0.0) {
    im_mut()[k] = value.imag();
  } else if (!im_.empty()) {
    im_[k] = 0.0;
  }
}

void OperatorMatrix::add(std::size_t i, std::size_t j, cplx value) {
  const std::size_t k = i * dim_ + j;
  re_[k] += value.real();
  if (value.imag() != 0.0) im_mut()[k] += value.imag();
}

double* OperatorMatrix::im_mut() {
  if (im_.empty()) im_.assign(size(), 0.0);
  return im_.data();
}

void OperatorMatrix::drop_imag() {
  im_.clear();
  im_.shrink_to_fit();
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out.re_[j * dim_ + i] = re_[i * dim_ + j];
  if (!im_.empty()) {
    out.im_.assign(size(), 0.0);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out.im_[j * dim_ + i] = -im_[i * dim_ + j];
  }
  return out;
}

cplx OperatorMatrix::trace() const {
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool OperatorMatrix::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(re_.begin(), re_.end(), finite) &&
         std::all_of(im_.begin(), im_.end(), finite);
}

void OperatorMatrix::require_same_dim(const OperatorMatrix& other, const char* what) const {
  if (other.dim_ != dim_) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch " << dim_ << " vs " << other.dim_;
    throw ContractViolation(msg.str());
  }
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  axpy(1.0, other);
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  axpy(-1.0, other);
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(double s) {
  for (double& x : re_) x *= s;
  for (double& x : im_) x *= s;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx s) {
  if (s.imag() == 0.0) return *this *= s.real();
  double* im = im_mut();
  for (std::size_t k = 0; k < size(); ++k) {
    const cplx v = cplx(re_[k], im[k]) * s;
    re_[k] = v.real();
    im[k] = v.imag();
  }
  return *this;
}

void OperatorMatrix::axpy(double alpha, const OperatorMatrix& x) {
  require_same_dim(x, "axpy");
  const auto& k = simd::kernels();
  k.axpy(size(), alpha, x.re_.data(), re_.data());
  if (!x.im_.empty()) k.axpy(size(), alpha, x.im_.data(), im_mut());
}

void OperatorMatrix::assign_combination(double alpha, const OperatorMatrix& x, double beta,
                                        const OperatorMatrix& y) {
  x.require_same_dim(y, "assign_combination");
  if (dim_ != x.dim_) {
    dim_ = x.dim_;
    re_.assign(size(), 0.0);
    im_.clear();
  }
  const auto& k = simd::kernels();
  k.axpby(size(), alpha, x.re_.data(), beta, y.re_.data(), re_.data());
  if (x.im_.empty() && y.im_.empty()) {
    im_.clear();
    return;
  }
  double* im = im_mut();
  if (x.im_.empty()) {
    std::fill(im, im + size(), 0.0);
    k.axpy(size(), beta, y.im_.data(), im);
  } else if (y.im_.empty()) {
    std::fill(im, im + size(), 0.0);
    k.axpy(size(), alpha, x.im_.data(), im);
  } else {
    k.axpby(size(), alpha, x.im_.data(), beta, y.im_.data(), im);
  }
}

void gemm(double alpha, const OperatorMatrix& a, Op opa, const OperatorMatrix& b, Op opb,
          double beta, OperatorMatrix& c) {
  const std::size_t n = a.dim();
  if (b.dim() != n) throw ContractViolation("gemm: operand dimension mismatch");
  if (beta == 0.0) {
    if (c.dim() != n) {
      c = OperatorMatrix(n);
    }
  } else if (c.dim() != n) {
    throw ContractViolation("gemm: output dimension mismatch");
  }

  const auto& k = simd::kernels();
  const simd::Trans ta = trans_of(opa);
  const simd::Trans tb = trans_of(opb);
  const double sa = imag_sign(opa);
  const double sb = imag_sign(opb);
  const double* ar = a.re();
  const double* ai = a.im();
  const double* br = b.re();
  const double* bi = b.im();

  // Re: ar*br - sa*sb*ai*bi
  k.dgemm(ta, tb, n, n, n, alpha, ar, n, br, n, beta, c.re(), n);
  if (ai && bi) k.dgemm(ta, tb, n, n, n, -alpha * sa * sb, ai, n, bi, n, 1.0, c.re(), n);

  // Im: sb*ar*bi + sa*ai*br
  if (!ai && !bi) {
    if (!c.is_real()) {
      if (beta == 0.0) {
        c.drop_imag();
      } else {
        double* ci = c.im_mut();
        for (std::size_t q = 0; q < c.size(); ++q) ci[q] *= beta;
      }
    }
    return;
  }
  const bool had_imag = !c.is_real();
  double* ci = c.im_mut();
  double beta_im = had_imag ? beta : 0.0;
  if (bi) {
    k.dgemm(ta, tb, n, n, n, alpha * sb, ar, n, bi, n, beta_im, ci, n);
    beta_im = 1.0;
  }
  if (ai) k.dgemm(ta, tb, n, n, n, alpha * sa, ai, n, br, n, beta_im, ci, n);
}

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b, Op opa, Op opb) {
  OperatorMatrix c;
  gemm(1.0, a, opa, b, opb, 0.0, c);
  return c;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  OperatorMatrix c;
  commutator_into(a, Op::none, b, Op::none, 1.0, c);
  return c;
}

void commutator_into(const OperatorMatrix& a, Op opa, const OperatorMatrix& b, Op opb,
                     double scale, OperatorMatrix& out) {
  if (&out == &a || &out == &b) throw ContractViolation("commutator_into: output aliases input");
  gemm(scale, a, opa, b, opb, 0.0, out);
  gemm(-scale, b, opb, a, opa, 1.0, out);
}

double frobenius_norm(const OperatorMatrix& m) {
  const auto& k = simd::kernels();
  double s = k.sum_squares(m.size(), m.re());
  if (m.im()) s += k.sum_squares(m.size(), m.im());
  return std::sqrt(s);
}

double frobenius_distance(const OperatorMatrix& a, const OperatorMatrix& b) {
  OperatorMatrix d = a;
  d -= b;
  return frobenius_norm(d);
}

double hermiticity_defect(const OperatorMatrix& m) {
  const double norm = frobenius_norm(m);
  if (norm == 0.0) return 0.0;
  return frobenius_distance(m, m.adjoint()) / norm;
}

OperatorMatrix conjugate(const OperatorMatrix& u, const OperatorMatrix& m) {
  OperatorMatrix um = multiply(u, m);
  return multiply(um, u, Op::none, Op::adjoint);
}

OperatorMatrix EigenDecomposition::reconstruct() const {
  return spectral_apply(*this, [](double x) { return cplx(x, 0.0); });
}

EigenDecomposition eigh(const OperatorMatrix& m) {
  if (!m.all_finite()) throw PreconditionError("eigh: non-finite matrix entries");
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "eigh: matrix is not Hermitian (relative defect " << defect << ")";
    throw PreconditionError(msg.str());
  }
  const auto n = static_cast<Eigen::Index>(m.dim());
  EigenDecomposition out;
  out.eigenvalues.resize(m.dim());
  out.eigenvectors = OperatorMatrix(m.dim());

  if (m.is_real()) {
    Eigen::Map<const RowMajorXd> a(m.re(), n, n);
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw PreconditionError("eigh: solver did not converge");
    Eigen::VectorXd::Map(out.eigenvalues.data(), n) = solver.eigenvalues();
    Eigen::Map<RowMajorXd>(out.eigenvectors.re(), n, n) = solver.eigenvectors();
    return out;
  }

  RowMajorXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(i, j);
  const Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  if (solver.info() != Eigen::Success) throw PreconditionError("eigh: solver did not converge");
  Eigen::VectorXd::Map(out.eigenvalues.data(), n) = solver.eigenvalues();
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  double* vi = out.eigenvectors.im_mut();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.eigenvectors.re()[i * n + j] = v(i, j).real();
      vi[i * n + j] = v(i, j).imag();
    }
  }
  return out;
}

OperatorMatrix spectral_apply(const EigenDecomposition& eig,
                              const std::function<cplx(double)>& f) {
  const std::size_t n = eig.dim();
  std::vector<cplx> fv(n);
  bool real_f = true;
  for (std::size_t k = 0; k < n; ++k) {
    fv[k] = f(eig.eigenvalues[k]);
    real_f = real_f && fv[k].imag() == 0.0;
  }
  // W = V diag(f), result = W V^dagger
  const OperatorMatrix& v = eig.eigenvectors;
  OperatorMatrix w(n);
  const double* vr = v.re();
  const double* vi = v.im();
  double* wr = w.re();
  double* wi = (vi || !real_f) ? w.im_mut() : nullptr;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const cplx x = cplx(vr[i * n + k], vi ? vi[i * n + k] : 0.0) * fv[k];
      wr[i * n + k] = x.real();
      if (wi) wi[i * n + k] = x.imag();
    }
  }
  return multiply(w, v, Op::none, Op::adjoint);
}

OperatorMatrix expm_hermitian(const EigenDecomposition& eig, cplx scale) {
  return spectral_apply(eig, [scale](double x) { return std::exp(scale * x); });
}

OperatorMatrix expm_hermitian(const OperatorMatrix& m, cplx scale) {
  return expm_hermitian(eigh(m), scale);
}

}  // namespace floqflow

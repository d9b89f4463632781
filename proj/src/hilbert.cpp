#include "floqflow/hilbert.hpp"

#include <cmath>
#include <sstream>

#include "floqflow/errors.hpp"

namespace floqflow {

std::string_view boundary_name(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

std::optional<Boundary> parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "open") return Boundary::open;
  return std::nullopt;
}

void SpinChainParams::validate() const {
  std::ostringstream msg;
  if (L < 2 || L > kMaxSites) {
    msg << "chain length L=" << L << " outside [2, " << kMaxSites << "]";
  } else if (J2 != 0.0 && boundary == Boundary::periodic && L < 5) {
    msg << "J2 != 0 on a periodic chain needs L >= 5 (got L=" << L << ")";
  } else if (!(Omega > 0.0) || !std::isfinite(Omega)) {
    msg << "drive frequency Omega must be positive and finite (got " << Omega << ")";
  } else if (!std::isfinite(J) || !std::isfinite(J2) || !std::isfinite(Bx) || !std::isfinite(A)) {
    msg << "couplings must be finite";
  } else {
    return;
  }
  throw PreconditionError(msg.str());
}

std::vector<std::pair<int, int>> bonds(int L, int distance, Boundary boundary) {
  std::vector<std::pair<int, int>> out;
  if (boundary == Boundary::periodic) {
    for (int i = 0; i < L; ++i) out.emplace_back(i, (i + distance) % L);
  } else {
    for (int i = 0; i + distance < L; ++i) out.emplace_back(i, i + distance);
  }
  return out;
}

void add_spin_product(OperatorMatrix& m, int L, cplx coeff,
                      std::initializer_list<SpinFactor> factors) {
  const std::size_t dim = std::size_t{1} << L;
  if (m.dim() != dim) throw ContractViolation("add_spin_product: matrix dimension mismatch");
  unsigned used = 0;
  for (const auto& f : factors) {
    if (f.site < 0 || f.site >= L) throw ContractViolation("add_spin_product: site out of range");
    const unsigned bit = 1u << f.site;
    if (used & bit) throw ContractViolation("add_spin_product: repeated site");
    used |= bit;
  }
  const cplx I{0.0, 1.0};
  for (std::size_t k = 0; k < dim; ++k) {
    std::size_t row = k;
    cplx c = coeff;
    for (const auto& f : factors) {
      const std::size_t mask = std::size_t{1} << (L - 1 - f.site);
      const bool down = (k & mask) != 0;
      switch (f.axis) {
        case Axis::x:
          c *= 0.5;
          row ^= mask;
          break;
        case Axis::y:
          c *= down ? -0.5 * I : 0.5 * I;
          row ^= mask;
          break;
        case Axis::z:
          c *= down ? -0.5 : 0.5;
          break;
      }
    }
    m.add(row, k, c);
  }
}

OperatorMatrix spin_operator(int L, int site, Axis axis) {
  OperatorMatrix m(std::size_t{1} << L);
  add_spin_product(m, L, 1.0, {{site, axis}});
  return m;
}

std::vector<double> zz_diagonal(const SpinChainParams& p) {
  p.validate();
  const std::size_t dim = p.dim();
  std::vector<double> diag(dim, 0.0);
  auto add_bonds = [&](int distance, double coupling) {
    if (coupling == 0.0) return;
    for (auto [i, j] : bonds(p.L, distance, p.boundary)) {
      const std::size_t mi = std::size_t{1} << (p.L - 1 - i);
      const std::size_t mj = std::size_t{1} << (p.L - 1 - j);
      for (std::size_t k = 0; k < dim; ++k) {
        const bool aligned = ((k & mi) != 0) == ((k & mj) != 0);
        diag[k] += -coupling * (aligned ? 0.25 : -0.25);
      }
    }
  };
  add_bonds(1, p.J);
  add_bonds(2, p.J2);
  return diag;
}

OperatorMatrix build_static(const SpinChainParams& p) {
  const std::vector<double> diag = zz_diagonal(p);
  OperatorMatrix h = OperatorMatrix::diagonal(diag);
  if (p.Bx != 0.0) {
    for (int i = 0; i < p.L; ++i) add_spin_product(h, p.L, p.Bx, {{i, Axis::x}});
  }
  return h;
}

OperatorMatrix build_drive(const SpinChainParams& p) {
  p.validate();
  OperatorMatrix h = build_charge(p.L);
  h *= p.A;
  return h;
}

OperatorMatrix build_charge(int L) {
  if (L < 1 || L > kMaxSites) throw PreconditionError("build_charge: chain length out of range");
  OperatorMatrix m(std::size_t{1} << L);
  for (int i = 0; i < L; ++i) add_spin_product(m, L, 1.0, {{i, Axis::x}});
  return m;
}

OperatorMatrix cyclic_shift(int L) {
  if (L < 1 || L > kMaxSites) throw PreconditionError("cyclic_shift: chain length out of range");
  const std::size_t dim = std::size_t{1} << L;
  OperatorMatrix t(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    // Site i holds bit L-1-i; moving it to site i+1 is a right rotation.
    const std::size_t shifted = (k >> 1) | ((k & 1u) << (L - 1));
    t.set(shifted, k, 1.0);
  }
  return t;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

StateVector polarized_state(int L) {
  if (L < 1 || L > kMaxSites) throw PreconditionError("polarized_state: chain length out of range");
  const std::size_t dim = std::size_t{1} << L;
  return StateVector{std::vector<cplx>(dim, cplx(std::pow(2.0, -0.5 * L), 0.0))};
}

StateVector apply(const OperatorMatrix& m, const StateVector& psi) {
  const std::size_t n = m.dim();
  if (psi.dim() != n) throw ContractViolation("apply: dimension mismatch");
  StateVector out{std::vector<cplx>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) s += m(i, j) * psi.amp[j];
    out.amp[i] = s;
  }
  return out;
}

cplx expectation(const OperatorMatrix& m, const StateVector& psi) {
  const StateVector mpsi = apply(m, psi);
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < psi.dim(); ++i) s += std::conj(psi.amp[i]) * mpsi.amp[i];
  return s;
}

}  // namespace floqflow

#pragma once

// Spin-1/2 chain operators on the 2^L sigma^z basis.
//
// Basis convention: site 0 is the most significant bit of the basis index and
// bit value 0 is S^z = +1/2. Spin operators are Pauli matrices divided by two.

#include <complex>
#include <initializer_list>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "floqflow/opkernel.hpp"

namespace floqflow {

enum class Boundary { periodic, open };

std::string_view boundary_name(Boundary b);
std::optional<Boundary> parse_boundary(std::string_view name);

struct SpinChainParams {
  int L = 8;
  double J = 1.0;
  double J2 = 0.0;
  double Bx = 0.0;
  double A = 0.0;
  double Omega = 10.0;
  Boundary boundary = Boundary::periodic;

  // Throws PreconditionError on invalid parameters.
  void validate() const;
  std::size_t dim() const { return std::size_t{1} << L; }
};

// Largest chain the dense engine accepts.
inline constexpr int kMaxSites = 14;

enum class Axis : char { x = 'x', y = 'y', z = 'z' };

struct SpinFactor {
  int site;
  Axis axis;
};

// Bonds (i, i+d) of the chain, wrapping under periodic boundary.
std::vector<std::pair<int, int>> bonds(int L, int distance, Boundary boundary);

// m += coeff * prod_k S^{axis_k}_{site_k}; sites must be distinct.
void add_spin_product(OperatorMatrix& m, int L, cplx coeff, std::initializer_list<SpinFactor> factors);

OperatorMatrix spin_operator(int L, int site, Axis axis);

// Diagonal of sum_i [-J S^z_i S^z_{i+1} - J2 S^z_i S^z_{i+2}].
std::vector<double> zz_diagonal(const SpinChainParams& p);

// H0(0) = sum_i [-J S^z_i S^z_{i+1} - J2 S^z_i S^z_{i+2} + Bx S^x_i]
OperatorMatrix build_static(const SpinChainParams& p);

// H1(0) = A sum_i S^x_i
OperatorMatrix build_drive(const SpinChainParams& p);

// sum_i S^x_i
OperatorMatrix build_charge(int L);

// Permutation moving the spin on site i to site i+1 (mod L).
OperatorMatrix cyclic_shift(int L);

struct StateVector {
  std::vector<cplx> amp;

  std::size_t dim() const { return amp.size(); }
  double norm() const;
};

// Tensor power of the S^x = +1/2 eigenvector.
StateVector polarized_state(int L);

StateVector apply(const OperatorMatrix& m, const StateVector& psi);
cplx expectation(const OperatorMatrix& m, const StateVector& psi);

}  // namespace floqflow

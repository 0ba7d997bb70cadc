#pragma once

// Coefficient modules: the trivial module and symmetric powers of the
// standard representation with a determinant twist.  Group elements act by
// substitution on degree-k polynomials in n row variables; the semigroup of
// integral Hecke elements acts the same way, which keeps every matrix
// integral before the determinant twist.

#include "tempered/matrix.hpp"

#include <string>

namespace tempered {

struct CoefficientModule {
  enum class Kind { Trivial, SymPower };
  Kind kind = Kind::Trivial;
  int n = 0;
  int k = 0;          // symmetric power degree
  long det_twist = 0; // multiply by det(g)^twist (only visible on the semigroup)

  static CoefficientModule trivial(int n);
  static CoefficientModule sym_power(int n, int k, long det_twist);
  // the normalization that reproduces classical Hecke eigenvalues
  static CoefficientModule sym_power_default(int n, int k);

  int dim() const;
  std::string str() const;

  // matrix of the group element gamma (integral, det +-1)
  QMat gamma_matrix(const IMat& gamma) const;
  // substitution action of an arbitrary invertible rational matrix
  QMat gamma_matrix_q(const QMat& gamma) const;
  // matrix of a semigroup element (integral, det != 0), with the twist
  QMat semigroup_matrix(const IMat& a) const;
  // matrix attached to a transport h: rho(h^{-1}) det(h^{-1})^twist;
  // h may be a semigroup element (any nonzero determinant)
  QMat transport_matrix(const IMat& h) const;

  // exponent vectors of the monomial basis, deterministic order
  std::vector<std::vector<int>> monomial_basis() const;
};

}  // namespace tempered

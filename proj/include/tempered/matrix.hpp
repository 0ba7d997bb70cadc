#pragma once

// Dense exact linear algebra over Z and Q, sized for desk-scale problems
// (n <= 3 lattices, coefficient modules of dimension <= a few dozen).
// Vectors are rows throughout; v*A*v^T is the quadratic form value.

#include "tempered/rational.hpp"

#include <optional>
#include <vector>

namespace tempered {

using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;
using IMat = std::vector<IVec>;
using QMat = std::vector<QVec>;

// ---- construction ----
IMat i_identity(int n);
QMat q_identity(int n);
QMat q_zero(int rows, int cols);
QMat to_qmat(const IMat& m);
QVec to_qvec(const IVec& v);

// ---- shape ----
inline int rows(const IMat& m) { return (int)m.size(); }
inline int rows(const QMat& m) { return (int)m.size(); }
inline int cols(const IMat& m) { return m.empty() ? 0 : (int)m[0].size(); }
inline int cols(const QMat& m) { return m.empty() ? 0 : (int)m[0].size(); }

// ---- arithmetic ----
IMat i_mul(const IMat& a, const IMat& b);
IVec iv_mul(const IVec& v, const IMat& m);
QMat q_mul(const QMat& a, const QMat& b);
QVec qv_mul(const QVec& v, const QMat& m);
QMat q_add(const QMat& a, const QMat& b);
QMat q_sub(const QMat& a, const QMat& b);
QMat q_scale(const Rat& c, const QMat& a);
IMat i_transpose(const IMat& m);
QMat q_transpose(const QMat& m);
bool q_is_zero(const QMat& m);

// value of the quadratic form A at row vector v, i.e. v*A*v^T
Rat form_value(const QMat& a, const IVec& v);
Rat form_value_q(const QMat& a, const QVec& v);
// bilinear pairing u*A*v^T
Rat form_pair(const QMat& a, const IVec& u, const IVec& v);

Int i_dot(const IVec& a, const IVec& b);
Rat q_dot(const QVec& a, const QVec& b);

// ---- comparisons / ordering ----
int ivec_cmp(const IVec& a, const IVec& b);
bool ivec_lt(const IVec& a, const IVec& b);
IVec ivec_neg(const IVec& v);
bool ivec_is_zero(const IVec& v);

// ---- rational elimination ----
int q_rank(QMat a);
Rat q_det(QMat a);
std::optional<QMat> q_inverse(QMat a);
// particular solution x (column, length cols(a)) of a * x = b, if any
std::optional<QVec> q_solve_right(QMat a, QVec b);
// basis of { x : a * x = 0 } (x as columns, returned as row-vectors)
std::vector<QVec> q_right_kernel(const QMat& a);
// basis of { v : v * a = 0 }
std::vector<QVec> q_left_kernel(const QMat& a);
// characteristic polynomial of a square matrix, coefficients low->high
QVec q_char_poly(const QMat& a);

// ---- integer lattice routines ----
// Row-style Hermite normal form of an integer matrix; zero rows dropped.
IMat hnf(IMat m);
// HNF with unimodular transform:  u * m = h  (u is square, det +-1).
void hnf_transform(const IMat& m, IMat& h, IMat& u);
// basis of { v in Z^m : v * a = 0 } (saturated automatically)
IMat i_left_kernel(const IMat& a);
// is row vector v in the row lattice spanned by basis (any basis)?
bool in_row_lattice(const IVec& v, const IMat& basis);
// do two integer row bases span the same lattice?
bool same_row_lattice(const IMat& a, const IMat& b);
// saturation of the row lattice: (span_Q(rows) intersect Z^n), full basis
IMat saturate(const IMat& basis);
// index of the row lattice of sub inside the row lattice of sup
// (requires containment and equal rank = full rank of sup)
Int lattice_index(const IMat& sup, const IMat& sub);
// integral inverse of a unimodular matrix; throws if |det| != 1
IMat i_unimodular_inverse(const IMat& m);
// adjugate: det(m) * m^{-1}, integral for integral m
IMat i_adjugate(const IMat& m);
Int i_det(IMat m);
// clear denominators of a rational vector to a primitive integer vector
IVec primitive_integer_vector(const QVec& v);

// ---- symmetric form routines ----
bool is_symmetric(const QMat& a);
// positive definiteness via leading principal minors (exact)
bool is_positive_definite(const QMat& a);
// If a (symmetric) is not positive definite, return an integer vector w
// with w*a*w^T <= 0; otherwise nullopt.
std::optional<IVec> nonpositive_direction(const QMat& a);

// R^T D R decomposition of a positive definite symmetric matrix with R unit
// upper triangular; used by the short-vector enumerator.
struct LdlT {
  QVec d;   // positive diagonal
  QMat r;   // unit upper triangular
};
LdlT ldlt(const QMat& a);

std::string qmat_str(const QMat& a);
std::string imat_str(const IMat& a);

}  // namespace tempered

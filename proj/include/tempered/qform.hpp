#pragma once

// Positive definite rational quadratic forms on Z^n and exact short-vector
// machinery: weighted lengths, arithmetic minima, homothety normalization.

#include "tempered/matrix.hpp"
#include "tempered/weights.hpp"

#include <vector>

namespace tempered {

struct QForm {
  int n = 0;
  QMat entries;  // symmetric, positive definite

  static QForm from(QMat m);
  static QForm identity(int n);
  static QForm diag(const QVec& d);

  Rat value(const IVec& v) const { return form_value(entries, v); }
  void validate() const;
};

struct MinimaReport {
  Rat minimum;
  std::vector<IVec> vectors;  // closed under negation, sorted
  int span_rank = 0;
};

Rat weighted_length(const QForm& f, const TemperedWeight& w, const IVec& v);

// all nonzero v with v f v^T <= bound, closed under negation, sorted.
// Dispatches to the OpenMP kernel when jobs() > 1.
std::vector<IVec> short_vectors(const QForm& f, const Rat& bound);
// serial reference implementation (plain recursion, no job splitting)
std::vector<IVec> short_vectors_serial(const QForm& f, const Rat& bound);

// all nonzero v with weight(v) * f(v) <= bound
std::vector<IVec> short_vectors_weighted(const QForm& f, const TemperedWeight& w,
                                         const Rat& bound);

MinimaReport arithmetic_minimum(const QForm& f, const TemperedWeight& w);

QForm normalize_homothety(const QForm& f, const TemperedWeight& w);

}  // namespace tempered

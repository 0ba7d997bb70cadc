#include "tempered/weights.hpp"

#include <stdexcept>

namespace tempered {

IVec projective_rep(const IVec& v) {
  Int content = 0;
  for (const Int& x : v) {
    Int g;
    mpz_gcd(g.get_mpz_t(), content.get_mpz_t(), x.get_mpz_t());
    content = g;
  }
  if (content == 0) throw std::invalid_argument("projective_rep: zero vector");
  IVec w = v;
  for (auto& x : w) x /= content;
  for (const Int& x : w) {
    if (x > 0) break;
    if (x < 0) {
      for (auto& y : w) y = -y;
      break;
    }
  }
  return w;
}

WeightSystem WeightSystem::trivial(int n) {
  WeightSystem w;
  w.n = n;
  return w;
}

WeightSystem WeightSystem::with_sublattice(int n, IMat m0) {
  WeightSystem w;
  w.n = n;
  w.m0_basis = m0;
  w.m0_hnf = hnf(m0);
  w.validate();
  return w;
}

Rat WeightSystem::base_weight(const IVec& v) const {
  if (!base) return Rat(1);
  return base(projective_rep(v));
}

bool WeightSystem::in_m0(const IVec& v) const {
  if (!m0_basis) return true;
  return in_row_lattice(v, m0_hnf);
}

void WeightSystem::validate() const {
  if (n <= 0) throw std::invalid_argument("WeightSystem: n must be positive");
  if (m0_basis) {
    if (rows(*m0_basis) != n || cols(*m0_basis) != n)
      throw std::invalid_argument("WeightSystem: m0_basis must be n x n");
    if (i_det(*m0_basis) == 0)
      throw std::invalid_argument("WeightSystem: m0_basis is singular");
  }
  if (sign(min_base) <= 0)
    throw std::invalid_argument("WeightSystem: weights must be positive");
}

TemperedWeight TemperedWeight::trivial(int n) {
  TemperedWeight t;
  t.weights = WeightSystem::trivial(n);
  return t;
}

TemperedWeight TemperedWeight::at(WeightSystem w, Rat s) {
  TemperedWeight t;
  t.weights = std::move(w);
  t.s = std::move(s);
  t.validate();
  return t;
}

Rat TemperedWeight::weight(const IVec& v) const {
  Rat b = weights.base_weight(v);
  if (!weights.m0_basis || weights.in_m0(v)) return b;
  return s * b;
}

void TemperedWeight::validate() const {
  weights.validate();
  if (s < 1) throw std::invalid_argument("TemperedWeight: s must be >= 1");
}

}  // namespace tempered

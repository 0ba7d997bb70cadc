#pragma once

// Weight systems on lattice vectors and their one-parameter tempering.
// A weight is a positive rational attached to the projective line of a
// vector; tempering multiplies the weight by s (= squared temperament) on
// every vector outside the sublattice M0.

#include "tempered/matrix.hpp"

#include <functional>
#include <optional>

namespace tempered {

// canonical representative of the projective line of v: primitive, first
// nonzero coordinate positive
IVec projective_rep(const IVec& v);

struct WeightSystem {
  int n = 0;
  // base weight per projective line; nullptr means the constant function 1
  std::function<Rat(const IVec& projective_rep)> base;
  Rat min_base = Rat(1);  // global lower bound of base, for enumeration bounds
  std::optional<IMat> m0_basis;  // rows span M0 in Z^n; absent = untempered
  IMat m0_hnf;                   // cached HNF of m0_basis

  static WeightSystem trivial(int n);
  static WeightSystem with_sublattice(int n, IMat m0);

  Rat base_weight(const IVec& v) const;
  bool in_m0(const IVec& v) const;
  void validate() const;
};

struct TemperedWeight {
  WeightSystem weights;
  Rat s = Rat(1);  // squared temperament, s >= 1

  static TemperedWeight trivial(int n);
  static TemperedWeight at(WeightSystem w, Rat s);

  int dim() const { return weights.n; }
  bool tempered() const { return weights.m0_basis.has_value() && s != 1; }
  // the weight Phi_s(v)
  Rat weight(const IVec& v) const;
  Rat min_weight() const { return weights.min_base; }
  void validate() const;
};

}  // namespace tempered

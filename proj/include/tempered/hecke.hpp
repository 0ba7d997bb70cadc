#pragma once

// Hecke operators through the well-tempered ladder.  T_a is the composition
// p_* l^(0)* r^(1)_* l^(1)* ... l^(k-1)* r^(k)_* q^*, where q transports the
// untempered slice to the ladder top by right multiplication with a, each
// r/l pair walks one temperament interval through its generic slice, and p
// is the coset-sum transfer from gamma_a back to the full group.  Every
// stage exists at the cochain level; quasi-isomorphism stages are inverted
// on cohomology.  The same stages act on the boundary grids, and the
// commutative cubes are verified as exact matrix identities.

#include "tempered/boundary.hpp"
#include "tempered/ladder.hpp"

#include <memory>
#include <string>
#include <vector>

namespace tempered {

using F = RatField;

struct HeckePair {
  int n = 0;
  IMat a;
  Context gamma_a;
  std::vector<IMat> cosets;  // left-coset transports k_i of gamma_a in SL_n(Z)

  Int index() const { return Int((long)cosets.size()); }
  static HeckePair make(int n, const IMat& a);
};

struct CubeFace {
  std::string cube;   // "L-R i", "P", "Q"
  std::string face;   // which face of the cube
  bool identified;    // true when the face is the identity identification
  bool zero;          // residual vanished exactly
};

struct HeckeStageReport {
  std::string name;
  std::vector<int> src_dims, dst_dims;   // cochain dims per degree
  bool chain_map = false;
  bool invertible_on_cohomology = false; // for l/r/q stages
};

struct HeckeRun {
  CoefficientModule module;
  bool boundary_target = false;
  std::vector<Rat> s_values;
  std::vector<HeckeStageReport> stages;
  std::vector<QMat> t_interior;       // per degree on interior cohomology
  std::vector<QVec> t_char_poly;      // per degree, coefficients low -> high
  std::vector<int> interior_betti;
  std::vector<QMat> t_boundary;       // per total degree on boundary cohomology
  std::vector<int> boundary_betti;
  std::vector<QMat> psi_induced;      // per degree: interior H -> boundary H
  std::vector<CubeFace> cubes;
  bool cubes_ok = true;
};

// interior (and optionally boundary) Hecke operator over Q
HeckeRun hecke_operator(TemperamentLadder& ladder, const CoefficientModule& module,
                        bool boundary_target);

struct MappingTorus {
  std::vector<QMat> monodromy;       // per degree on H^*_{gamma_a}(slice 1)
  std::vector<int> fiber_betti;
  std::vector<int> invariants;       // dim ker(1 - mu) per degree
  std::vector<int> coinvariants;     // dim coker(1 - mu) per degree
  std::vector<int> torus_dims;       // H^m = inv^m + coinv^{m-1}
};

MappingTorus mapping_torus(TemperamentLadder& ladder, const CoefficientModule& module);

}  // namespace tempered

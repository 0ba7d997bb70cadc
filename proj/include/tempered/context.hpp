#pragma once

// Subgroup contexts and exact orbit machinery.  A group element is carried
// as its transport matrix h, which acts on row vectors (hence signatures and
// flag members) by plain right multiplication v -> v h; the group element
// acting on the left in the usual convention is gamma = h^{-1} (forms move
// by A -> h^{-1} A h^{-T} = gamma A gamma^T).  Signatures span, so every
// transporter between two cells is determined by where finitely many
// vectors go; the search below is therefore complete, and stabilizers come
// out as full finite groups.

#include "tempered/signature.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tempered {

struct Flag {
  int n = 0;
  // proper members V_1 < ... < V_{l-1}, each a saturated HNF basis; the
  // chain implicitly ends with Z^n, so length() counts that last member too
  std::vector<IMat> members;

  int length() const { return (int)members.size() + 1; }
  std::vector<int> type() const;  // ranks of the proper members
  void validate() const;
  Flag transported(const IMat& h) const;
  bool operator==(const Flag& other) const { return n == other.n && members == other.members; }
  bool operator<(const Flag& other) const;
  std::string str() const;

  // leading-coordinate flag with the given member ranks
  static Flag standard(int n, const std::vector<int>& ranks);
  // delete proper member j (1-based), giving a flag one shorter
  Flag drop_member(int j) const;
};

// does the signature span every flag member (the W_F condition)?
bool sig_in_flag_subcomplex(const Sig& sig, const Flag& flag);

struct Context {
  std::string name;
  bool trivial_group = false;        // the one-element group
  bool allow_det_minus_one = false;  // GL instead of SL
  std::optional<IMat> semigroup_b;   // restrict to { h : b h b^{-1} integral }
  std::optional<Flag> flag;          // restrict to the flag stabilizer; orbit
                                     // bookkeeping happens inside W_flag only

  bool member(const IMat& h) const;
  bool scoped_to_flag() const { return flag.has_value(); }

  static Context sl(int n);
  static Context trivial();
  static Context gamma_a(const IMat& b);                  // b = a^T
  static Context parabolic(const Flag& f);                // SL cap Stab(flag)
  static Context gamma_a_parabolic(const IMat& b, const Flag& f);
};

// every h with from * h = to (as +- vector sets); complete
std::vector<IMat> all_transports(const Sig& from, const Sig& to);

// first transporter lying in the context, if any
std::optional<IMat> cell_equivalent(const Sig& c1, const Sig& c2, const Context& ctx);

// the full (finite) stabilizer of the signature inside the context
std::vector<IMat> stabilizer(const Sig& sig, const Context& ctx);

// generators of SL_n(Z) as transport matrices (elementary matrices)
std::vector<IMat> sl_generators(int n);
// generators of the standard-flag stabilizer inside SL_n(Z) (h-side)
std::vector<IMat> parabolic_generators(const Flag& std_flag);

// Right cosets of a finite-index context inside SL_n(Z), enumerated via the
// orbit of the sublattice Z^n b.  Requires semigroup_b.
struct CosetTable {
  IMat b;
  std::vector<IMat> reps;  // h_i; rep[0] = identity
  // canonical key (HNF of b * h) -> coset index
  std::map<IMat, int> key_to_index;

  int index_of(const IMat& h) const;  // which coset contains h
  static CosetTable build(const Context& ctx, int n);
};

// one flag per ctx-class of length-l flags (ctx must be SL or gamma_a)
std::vector<Flag> flag_reps(int n, int length, const Context& ctx);

// a transporter h in ctx with f1 * h = f2, if the flags are ctx-equivalent
std::optional<IMat> flag_equivalent(const Flag& f1, const Flag& f2, const Context& ctx);

// some h in SL_n(Z) with f1 * h = f2 (flags of equal type); always exists
IMat flag_transporter_sl(const Flag& f1, const Flag& f2);

// extend the saturated rows to a full unimodular basis (first rows span the
// same lattice as the input)
IMat unimodular_completion(const IMat& saturated_rows, int n);

}  // namespace tempered

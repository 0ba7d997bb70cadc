#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tempered/context.hpp"

using namespace tempered;

static IVec iv(std::vector<long> v) {
  IVec r;
  for (long x : v) r.push_back(Int(x));
  return r;
}

static IMat im(std::vector<std::vector<long>> v) {
  IMat m;
  for (auto& row : v) m.push_back(iv(row));
  return m;
}

static Sig sg(std::vector<std::vector<long>> vs) {
  std::vector<IVec> v;
  for (auto& x : vs) v.push_back(iv(x));
  return canonical_signature(v);
}

TEST_CASE("stabilizers of the n=2 cells") {
  Context sl = Context::sl(2);
  // hexagonal vertex: cyclic of order 6 inside SL_2(Z)
  Sig hexa = sg({{1, 0}, {0, 1}, {1, -1}});
  auto stab_hex = stabilizer(hexa, sl);
  CHECK(stab_hex.size() == 6);
  bool has_minus_id = false;
  for (const auto& h : stab_hex)
    if (h == im({{-1, 0}, {0, -1}})) has_minus_id = true;
  CHECK(has_minus_id);

  // square edge: {±I, ±S}
  Sig edge = sg({{1, 0}, {0, 1}});
  auto stab_edge = stabilizer(edge, sl);
  CHECK(stab_edge.size() == 4);
  bool has_s = false;
  for (const auto& h : stab_edge)
    if (h == im({{0, 1}, {-1, 0}})) has_s = true;
  CHECK(has_s);

  // the full +-symmetry group of the hexagon has order 12 in GL_2(Z)
  Context gl = Context::sl(2);
  gl.allow_det_minus_one = true;
  CHECK(stabilizer(hexa, gl).size() == 12);

  // trivial subgroup: only the identity
  CHECK(stabilizer(hexa, Context::trivial()).size() == 1);
}

TEST_CASE("cell equivalence with transporters") {
  Context sl = Context::sl(2);
  Sig edge = sg({{1, 0}, {0, 1}});
  auto self = cell_equivalent(edge, edge, sl);
  REQUIRE(self.has_value());

  // translate of the edge: {e1, e1 + e2}
  Sig moved = sig_transport(edge, im({{1, 1}, {0, 1}}));
  auto h = cell_equivalent(edge, moved, sl);
  REQUIRE(h.has_value());
  CHECK(sig_transport(edge, *h) == moved);

  Sig hexa = sg({{1, 0}, {0, 1}, {1, -1}});
  CHECK(!cell_equivalent(edge, hexa, sl).has_value());
}

TEST_CASE("gamma_a membership and cosets") {
  IMat b = im({{1, 0}, {0, 2}});
  Context ga = Context::gamma_a(b);
  // b h b^{-1} integral: the upper-right entry of h must be even, i.e. the
  // group elements gamma = (h^T)^{-1} have even lower-left entry
  CHECK(ga.member(im({{1, 0}, {1, 1}})) == true);
  CHECK(ga.member(im({{1, 2}, {0, 1}})) == true);
  CHECK(ga.member(im({{1, 1}, {0, 1}})) == false);
  CHECK(ga.member(im({{1, 0}, {0, 1}})) == true);

  CosetTable t = CosetTable::build(ga, 2);
  CHECK(t.reps.size() == 3);

  CosetTable t3 = CosetTable::build(Context::gamma_a(im({{1, 0, 0}, {0, 1, 0}, {0, 0, 2}})), 3);
  CHECK(t3.reps.size() == 7);
}

TEST_CASE("parabolic contexts: standard flag stabilizer") {
  Flag f = Flag::standard(2, {1});
  Context p = Context::parabolic(f);
  // transport matrices preserving <e1> are lower triangular; the group
  // elements gamma = (h^T)^{-1} are then upper triangular
  CHECK(p.member(im({{1, 0}, {5, 1}})));
  CHECK(!p.member(im({{1, 1}, {0, 1}})));
  CHECK(p.member(im({{-1, 0}, {0, -1}})));

  Sig line_edge = sg({{1, 0}, {0, 1}});
  auto stab = stabilizer(line_edge, p);
  CHECK(stab.size() == 2);  // only +-identity stabilize both the flag and the edge
}

TEST_CASE("flag subcomplex membership") {
  Flag f = Flag::standard(2, {1});
  CHECK(sig_in_flag_subcomplex(sg({{1, 0}, {0, 1}}), f));
  CHECK(sig_in_flag_subcomplex(sg({{1, 0}, {0, 1}, {1, 1}}), f));
  CHECK(!sig_in_flag_subcomplex(sg({{0, 1}, {1, 1}}), f));
}

TEST_CASE("flag representatives") {
  auto r22 = flag_reps(2, 2, Context::sl(2));
  REQUIRE(r22.size() == 1);
  CHECK(r22[0].members[0] == im({{1, 0}}));

  auto r32 = flag_reps(3, 2, Context::sl(3));
  CHECK(r32.size() == 2);  // line type and plane type
  auto r33 = flag_reps(3, 3, Context::sl(3));
  CHECK(r33.size() == 1);  // full flags

  // two cusps for the index-3 Hecke context at n=2
  auto ga_flags = flag_reps(2, 2, Context::gamma_a(im({{1, 0}, {0, 2}})));
  CHECK(ga_flags.size() == 2);
}

TEST_CASE("flag transport and equivalence") {
  Flag f1 = Flag::standard(3, {1});
  Flag f2 = f1.transported(im({{0, 1, 0}, {1, 0, 0}, {0, 0, -1}}));
  IMat h = flag_transporter_sl(f1, f2);
  CHECK(i_det(h) == 1);
  CHECK(f1.transported(h) == f2);

  auto eq = flag_equivalent(f1, f2, Context::sl(3));
  REQUIRE(eq.has_value());
  CHECK(f1.transported(*eq) == f2);

  // under gamma_a for b = diag(1,2) the two n=2 cusps are inequivalent
  Context ga = Context::gamma_a(im({{1, 0}, {0, 2}}));
  auto flags = flag_reps(2, 2, ga);
  REQUIRE(flags.size() == 2);
  CHECK(!flag_equivalent(flags[0], flags[1], ga).has_value());
  CHECK(flag_equivalent(flags[0], flags[0], ga).has_value());
}

TEST_CASE("unimodular completion") {
  IMat c = unimodular_completion(im({{2, 3}}), 2);
  CHECK((i_det(c) == 1 || i_det(c) == -1));
  CHECK(same_row_lattice(IMat{c[0]}, im({{2, 3}})));

  IMat c3 = unimodular_completion(im({{1, 2, 3}, {0, 1, 1}}), 3);
  CHECK((i_det(c3) == 1 || i_det(c3) == -1));
}

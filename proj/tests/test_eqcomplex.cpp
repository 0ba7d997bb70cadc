#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tempered/eqcomplex.hpp"

using namespace tempered;

namespace {

const Chunk& spine2() {
  static Chunk chunk = [] {
    Chunk c(TemperedWeight::trivial(2), {Context::sl(2)});
    c.build();
    return c;
  }();
  return chunk;
}

const Chunk& spine3() {
  static Chunk chunk = [] {
    Chunk c(TemperedWeight::trivial(3), {Context::sl(3)});
    c.build();
    return c;
  }();
  return chunk;
}

}  // namespace

TEST_CASE("interior cohomology of SL_2(Z) with trivial Q coefficients") {
  // oracle: the abelianization of SL_2(Z) is Z/12, so H^1(-, Q) = 0 and
  // connectedness gives H^0 = Q
  RatField f;
  auto cx = build_complex(f, spine2(), "sl", CoefficientModule::trivial(2));
  CHECK(cx.dims == std::vector<int>{1, 0});
  CHECK(complex_d_squared_zero(f, cx));
  auto h = compute_cohomology(f, cx);
  CHECK(h.betti == std::vector<int>{1, 0});
}

TEST_CASE("interior cohomology with Sym^10: Eichler-Shimura dimension 3") {
  // oracle: 2 * dim S_12 + 1 = 3
  RatField f;
  auto cx = build_complex(f, spine2(), "sl", CoefficientModule::sym_power_default(2, 10));
  REQUIRE(cx.dims.size() == 2);
  CHECK(cx.dims[0] == 3);  // C6-invariants of Sym^10
  CHECK(cx.dims[1] == 6);  // orientation-twisted C4-invariants
  CHECK(complex_d_squared_zero(f, cx));
  auto h = compute_cohomology(f, cx);
  CHECK(h.betti == std::vector<int>{0, 3});
}

TEST_CASE("orientation twist is load-bearing") {
  RatField f;
  auto cx = build_complex(f, spine2(), "sl", CoefficientModule::trivial(2), true);
  auto h = compute_cohomology(f, cx);
  // dropping the twist inflates the edge block and breaks the Betti numbers
  CHECK(h.betti != std::vector<int>{1, 0});
}

TEST_CASE("interior cohomology of SL_3(Z): (1,0,0,0)") {
  RatField f;
  auto cx = build_complex(f, spine3(), "sl", CoefficientModule::trivial(3));
  CHECK(complex_d_squared_zero(f, cx));
  auto h = compute_cohomology(f, cx);
  CHECK(h.betti == std::vector<int>{1, 0, 0, 0});
}

TEST_CASE("bad primes") {
  OrbitTable t = spine2().orbit_table("sl");
  CHECK(bad_prime_witnesses(t, 0).empty());
  CHECK(bad_prime_witnesses(t, 5).empty());
  auto two = bad_prime_witnesses(t, 2);
  CHECK(two.size() == 2);  // stabilizer orders 6 and 4
  auto three = bad_prime_witnesses(t, 3);
  CHECK(three.size() == 1);  // the hexagonal vertex, order 6
}

TEST_CASE("good prime field agrees with Q on the n=2 spine") {
  FpField f5(5);
  auto cx = build_complex(f5, spine2(), "sl", CoefficientModule::trivial(2));
  CHECK(complex_d_squared_zero(f5, cx));
  auto h = compute_cohomology(f5, cx);
  CHECK(h.betti == std::vector<int>{1, 0});

  auto cx10 = build_complex(f5, spine2(), "sl", CoefficientModule::sym_power_default(2, 10));
  auto h10 = compute_cohomology(f5, cx10);
  CHECK(h10.betti == std::vector<int>{0, 3});
}

TEST_CASE("induced identity map and coboundary independence") {
  RatField f;
  auto cx = build_complex(f, spine2(), "sl", CoefficientModule::sym_power_default(2, 10));
  auto h = compute_cohomology(f, cx);
  CochainMapT<RatField> id;
  id.src = &cx;
  id.dst = &cx;
  for (int q = 0; q < cx.degrees(); q++) id.mats.push_back(f_identity(f, cx.dims[q]));
  REQUIRE(is_chain_map(f, id));
  auto ind = induced_map(f, id, h, h);
  CHECK(ind[1] == f_identity(f, 3));

  // perturb a representative cocycle by a coboundary: projection unchanged
  FVec<RatField> rep(cx.dims[1]);
  for (int r = 0; r < cx.dims[1]; r++) rep[r] = h.reps[1][r][0];
  FVec<RatField> shifted = rep;
  FVec<RatField> chain0(cx.dims[0], f.zero());
  chain0[0] = f.from_rat(Rat(7, 3));
  FVec<RatField> cob = f_apply(f, cx.diff[0], chain0);
  for (int r = 0; r < cx.dims[1]; r++) shifted[r] = f.add(shifted[r], cob[r]);
  CHECK(h.project(f, 1, rep) == h.project(f, 1, shifted));
}

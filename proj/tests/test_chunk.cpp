#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tempered/chunk.hpp"

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

TEST_CASE("n=2 spine: one vertex orbit, one edge orbit") {
  Chunk chunk(TemperedWeight::trivial(2), {Context::sl(2)});
  chunk.build();
  auto counts = chunk.orbit_counts("sl");
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 1);

  OrbitTable table = chunk.orbit_table("sl");
  REQUIRE(table.orbits.size() == 2);
  for (const Orbit& ob : table.orbits) {
    if (ob.dim == 0) {
      CHECK(ob.stab.size() == 6);
      CHECK(!ob.orientation_reversing);
    } else {
      CHECK(ob.stab.size() == 4);
      CHECK(ob.orientation_reversing);
    }
  }
  // orientation character is a homomorphism on each stabilizer
  for (const Orbit& ob : table.orbits) {
    const ChunkCell& rep = chunk.cell(ob.rep);
    for (const StabElement& a : ob.stab)
      for (const StabElement& b : ob.stab) {
        IMat prod = i_mul(a.h, b.h);
        int expect = a.orientation * b.orientation;
        int got = rep.dim == 0 ? 1
                               : SliceGeometry::transport_orientation(rep.geom, prod,
                                                                      rep.geom);
        CHECK(got == expect);
      }
  }
}

TEST_CASE("chunk closure and grading") {
  Chunk chunk(TemperedWeight::trivial(2), {Context::sl(2)});
  chunk.build();
  for (const ChunkCell& c : chunk.cells()) {
    for (int fid : c.facets) {
      const ChunkCell& f = chunk.cell(fid);
      CHECK(f.dim == c.dim - 1);
      CHECK(sig_subset(c.sig, f.sig));  // facet signatures grow
    }
    if (c.dim == 1) CHECK(c.facets.size() == 2);
  }
}

TEST_CASE("seed independence across three seeds") {
  std::vector<QForm> seeds = {
      QForm::identity(2),
      QForm::from(QMat{{Rat(3), Rat(1)}, {Rat(1), Rat(4)}}),
      QForm::from(QMat{{Rat(7), Rat(2)}, {Rat(2), Rat(11)}}),
  };
  std::vector<int> stab_orders;
  for (const QForm& seed : seeds) {
    Chunk chunk(TemperedWeight::trivial(2), {Context::sl(2)});
    chunk.build({seed});
    auto counts = chunk.orbit_counts("sl");
    CHECK(counts == std::vector<int>{1, 1});
    OrbitTable t = chunk.orbit_table("sl");
    Int total = 0;
    for (const Orbit& ob : t.orbits) total += ob.stab_order();
    stab_orders.push_back((int)total.get_si());
  }
  CHECK(stab_orders[0] == stab_orders[1]);
  CHECK(stab_orders[1] == stab_orders[2]);
}

TEST_CASE("borel context: finite orbit lists on the flag subcomplex") {
  Flag flag = Flag::standard(2, {1});
  Chunk chunk(TemperedWeight::trivial(2),
              {Context::sl(2), Context::parabolic(flag)});
  chunk.build();
  auto counts = chunk.orbit_counts(chunk.contexts()[1].name);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 1);
  OrbitTable t = chunk.orbit_table(chunk.contexts()[1].name);
  for (const Orbit& ob : t.orbits) {
    CHECK(ob.stab.size() == 2);  // +-identity only
    // every orbit representative lies in the flag subcomplex
    CHECK(sig_in_flag_subcomplex(chunk.cell(ob.rep).sig, flag));
  }
}

TEST_CASE("trivial context: every stored cell its own orbit") {
  Chunk chunk(TemperedWeight::trivial(2), {Context::sl(2), Context::trivial()});
  chunk.build();
  auto counts = chunk.orbit_counts("trivial");
  int total = 0;
  for (int c : counts) total += c;
  CHECK(total == (int)chunk.cells().size());
  OrbitTable t = chunk.orbit_table("trivial");
  for (const Orbit& ob : t.orbits) CHECK(ob.stab.size() == 1);
}

TEST_CASE("resolve transports unknown cells to their reps") {
  Chunk chunk(TemperedWeight::trivial(2), {Context::sl(2)});
  chunk.build();
  // an edge far from the chunk: transport of the square edge
  IMat far = im({{13, 4}, {3, 1}});
  Sig moved = sig_transport(Sig{iv({0, 1}), iv({1, 0})}, far);
  auto [orbit, h] = chunk.resolve(0, moved);
  const ChunkCell& rep = chunk.cell(chunk.orbit_table("sl").orbits[orbit].rep);
  CHECK(sig_transport(rep.sig, h) == moved);
  CHECK(rep.dim == 1);
}

TEST_CASE("n=2 tempered slice at s=4 stays finite and closed") {
  WeightSystem ws = WeightSystem::with_sublattice(2, im({{1, 0}, {0, 2}}));
  IMat b = im({{1, 0}, {0, 2}});
  Chunk chunk(TemperedWeight::at(ws, Rat(4)), {Context::gamma_a(b)});
  chunk.build();
  auto counts = chunk.orbit_counts("gamma_a");
  CHECK(counts.size() == 2);
  CHECK(counts[0] >= 1);
  CHECK(counts[1] >= 1);
  for (const ChunkCell& c : chunk.cells())
    for (int fid : c.facets) CHECK(chunk.cell(fid).dim == c.dim - 1);
}

TEST_CASE("n=3 spine builds and closes") {
  Chunk chunk(TemperedWeight::trivial(3), {Context::sl(3)});
  chunk.build();
  auto counts = chunk.orbit_counts("sl");
  REQUIRE(counts.size() == 4);
  CHECK(counts[3] >= 1);
  CHECK(counts[0] >= 1);
  for (const ChunkCell& c : chunk.cells())
    for (int fid : c.facets) CHECK(chunk.cell(fid).dim == c.dim - 1);
  MESSAGE("n=3 orbit counts: ", counts[0], " ", counts[1], " ", counts[2], " ",
          counts[3]);
}

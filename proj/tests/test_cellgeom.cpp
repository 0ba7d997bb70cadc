#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tempered/cellgeom.hpp"

using namespace tempered;

static IVec iv(std::vector<long> v) {
  IVec r;
  for (long x : v) r.push_back(Int(x));
  return r;
}

static Sig sig2(std::vector<std::vector<long>> vs) {
  std::vector<IVec> v;
  for (auto& x : vs) v.push_back(iv(x));
  return canonical_signature(v);
}

TEST_CASE("realize the square edge and hexagonal vertex (n=2)") {
  SliceGeometry geo(TemperedWeight::trivial(2));
  auto edge = geo.realize(sig2({{1, 0}, {0, 1}}));
  REQUIRE(edge.has_value());
  CHECK(geo.locate(QForm::from(*edge)) == sig2({{1, 0}, {0, 1}}));

  auto hexa = geo.realize(sig2({{1, 0}, {0, 1}, {1, -1}}));
  REQUIRE(hexa.has_value());
  CHECK((*hexa)[0][1] == Rat(1, 2));

  // a line through e1 and 2*e1 cannot be an exact minima set
  CHECK(!geo.realize(sig2({{1, 0}, {2, 0}})).has_value());
  // rank-deficient signatures are never cells
  CHECK(!geo.realize(sig2({{1, 0}})).has_value());
}

TEST_CASE("complete the square edge: two hexagonal endpoints") {
  SliceGeometry geo(TemperedWeight::trivial(2));
  CellGeometry cell = geo.complete(sig2({{1, 0}, {0, 1}}));
  CHECK(cell.dim == 1);
  REQUIRE(cell.verts.size() == 2);
  CHECK(cell.vert_sigs[0] == sig2({{1, 0}, {0, 1}, {1, -1}}));
  CHECK(cell.vert_sigs[1] == sig2({{1, 0}, {0, 1}, {1, 1}}));
  REQUIRE(cell.facet_sigs.size() == 2);
  CHECK(cell.facet_sigs[0] == cell.vert_sigs[0]);
}

TEST_CASE("star of the hexagonal vertex: three edges") {
  SliceGeometry geo(TemperedWeight::trivial(2));
  CellGeometry vert = geo.complete(sig2({{1, 0}, {0, 1}, {1, -1}}));
  CHECK(vert.dim == 0);
  auto star = geo.star_cofaces(vert);
  CHECK(star.size() == 3);
  for (auto& [s, witness] : star) {
    CHECK(s.size() == 2);
    CHECK(geo.locate(QForm::from(witness)) == s);
  }
}

TEST_CASE("incidence signs: opposite ends of an edge differ") {
  SliceGeometry geo(TemperedWeight::trivial(2));
  CellGeometry edge = geo.complete(sig2({{1, 0}, {0, 1}}));
  CellGeometry v0 = geo.complete(edge.facet_sigs[0]);
  CellGeometry v1 = geo.complete(edge.facet_sigs[1]);
  int s0 = SliceGeometry::incidence_sign(edge, v0);
  int s1 = SliceGeometry::incidence_sign(edge, v1);
  CHECK(s0 * s1 == -1);
}

TEST_CASE("tempered slice at s=4 has the merged edge cell") {
  WeightSystem ws = WeightSystem::with_sublattice(
      2, IMat{{Int(1), Int(0)}, {Int(0), Int(2)}});
  SliceGeometry geo(TemperedWeight::at(ws, Rat(4)));
  // at the event, (0,1) and (0,2) are simultaneously minimal on the edge
  Sig merged = sig2({{1, 0}, {0, 1}, {0, 2}});
  auto witness = geo.realize(merged);
  REQUIRE(witness.has_value());
  CellGeometry cell = geo.complete(merged);
  CHECK(cell.dim == 1);
  CHECK(cell.verts.size() == 2);

  // off the event the merged signature is not a cell
  SliceGeometry geo5(TemperedWeight::at(ws, Rat(5)));
  CHECK(!geo5.realize(merged).has_value());
  CHECK(geo5.realize(sig2({{1, 0}, {0, 2}})).has_value());
  CHECK(!geo5.realize(sig2({{1, 0}, {0, 1}})).has_value());

  SliceGeometry geo3(TemperedWeight::at(ws, Rat(3)));
  CHECK(geo3.realize(sig2({{1, 0}, {0, 1}})).has_value());
  CHECK(!geo3.realize(sig2({{1, 0}, {0, 2}})).has_value());
}

TEST_CASE("n=3: the cube cell around the identity") {
  SliceGeometry geo(TemperedWeight::trivial(3));
  Sig cube = sig2({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CellGeometry cell = geo.complete(cube);
  CHECK(cell.dim == 3);
  CHECK(cell.verts.size() > 3);
  for (const Sig& f : cell.facet_sigs) {
    CellGeometry facet = geo.complete(f);
    CHECK(facet.dim == 2);
    int s = SliceGeometry::incidence_sign(cell, facet);
    CHECK((s == 1 || s == -1));
  }
}

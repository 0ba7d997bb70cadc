#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tempered/lp.hpp"
#include "tempered/matrix.hpp"

using namespace tempered;

static QMat qm(std::vector<std::vector<long>> v) {
  QMat m;
  for (auto& row : v) {
    QVec r;
    for (long x : row) r.push_back(Rat(x));
    m.push_back(r);
  }
  return m;
}

static IMat im(std::vector<std::vector<long>> v) {
  IMat m;
  for (auto& row : v) {
    IVec r;
    for (long x : row) r.push_back(Int(x));
    m.push_back(r);
  }
  return m;
}

TEST_CASE("rank, det, inverse") {
  QMat a = qm({{2, 1}, {1, 2}});
  CHECK(q_rank(a) == 2);
  CHECK(q_det(a) == Rat(3));
  auto inv = q_inverse(a);
  REQUIRE(inv.has_value());
  CHECK(q_mul(a, *inv) == q_identity(2));
  CHECK(q_rank(qm({{1, 2}, {2, 4}})) == 1);
}

TEST_CASE("kernels and solve") {
  QMat a = qm({{1, 2, 3}, {2, 4, 6}});
  auto ker = q_right_kernel(a);
  CHECK(ker.size() == 2);
  for (const auto& k : ker) {
    QVec img = qv_mul(k, q_transpose(a));
    for (const auto& x : img) CHECK(sign(x) == 0);
  }
  auto sol = q_solve_right(qm({{1, 0}, {0, 2}}), {Rat(3), Rat(4)});
  REQUIRE(sol.has_value());
  CHECK((*sol)[0] == Rat(3));
  CHECK((*sol)[1] == Rat(2));
}

TEST_CASE("char poly") {
  // companion-ish check: diag(1,2) has (x-1)(x-2) = 2 - 3x + x^2
  QVec cp = q_char_poly(qm({{1, 0}, {0, 2}}));
  CHECK(cp == QVec{Rat(2), Rat(-3), Rat(1)});
}

TEST_CASE("hnf and lattices") {
  IMat h = hnf(im({{2, 0}, {0, 2}, {1, 1}}));
  CHECK(rows(h) == 2);
  CHECK(in_row_lattice({Int(1), Int(1)}, h));
  CHECK(in_row_lattice({Int(2), Int(0)}, h));
  CHECK(!in_row_lattice({Int(1), Int(0)}, h));
  CHECK(same_row_lattice(im({{1, 1}, {2, 0}}), im({{1, 1}, {0, 2}})));

  IMat sat = saturate(im({{2, 4}}));
  CHECK(rows(sat) == 1);
  CHECK(sat[0] == IVec{Int(1), Int(2)});

  CHECK(lattice_index(i_identity(2), im({{1, 0}, {0, 3}})) == 3);
}

TEST_CASE("unimodular inverse and kernel") {
  IMat u = im({{1, 1}, {0, 1}});
  IMat ui = i_unimodular_inverse(u);
  CHECK(i_mul(u, ui) == i_identity(2));
  IMat k = i_left_kernel(im({{1, 2}, {2, 4}, {0, 0}}));
  CHECK(rows(k) == 2);
  for (const auto& v : k) {
    IVec img = iv_mul(v, im({{1, 2}, {2, 4}, {0, 0}}));
    CHECK(ivec_is_zero(img));
  }
}

TEST_CASE("positive definiteness and witnesses") {
  CHECK(is_positive_definite(qm({{2, 1}, {1, 2}})));
  CHECK(!is_positive_definite(qm({{1, 2}, {2, 1}})));
  auto w = nonpositive_direction(qm({{1, 2}, {2, 1}}));
  REQUIRE(w.has_value());
  CHECK(sign(form_value(qm({{1, 2}, {2, 1}}), *w)) <= 0);
  CHECK(!nonpositive_direction(qm({{2, 1}, {1, 2}})).has_value());
  // degenerate PSD: kernel direction comes back
  auto w2 = nonpositive_direction(qm({{1, 1}, {1, 1}}));
  REQUIRE(w2.has_value());
  CHECK(sign(form_value(qm({{1, 1}, {1, 1}}), *w2)) <= 0);
}

TEST_CASE("ldlt reproduces the form") {
  QMat a = qm({{2, 1}, {1, 2}});
  LdlT dec = ldlt(a);
  // value at (1,-1) = d0*(x0 + r01 x1)^2 + d1*x1^2 = 2*(1-1/2)^2 + 3/2 = 2
  Rat v = dec.d[0] * Rat(1, 2) * Rat(1, 2) + dec.d[1];
  CHECK(v == Rat(2));
}

TEST_CASE("simplex basics") {
  // max x+y st x<=2, y<=3, -x<=0, -y<=0
  LpResult r = lp_maximize(qm({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}),
                           {Rat(2), Rat(3), Rat(0), Rat(0)}, {Rat(1), Rat(1)});
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.value == Rat(5));

  // infeasible: x <= -1, -x <= 0
  LpResult inf = lp_maximize(qm({{1}, {-1}}), {Rat(-1), Rat(0)}, {Rat(1)});
  CHECK(inf.status == LpStatus::Infeasible);

  // unbounded: x >= 0 maximize x
  LpResult unb = lp_maximize(qm({{-1}}), {Rat(0)}, {Rat(1)});
  CHECK(unb.status == LpStatus::Unbounded);
  CHECK(sign(unb.ray[0]) > 0);
}

TEST_CASE("recession rays and vertices") {
  // triangle x>=0, y>=0, x+y<=1
  QMat a = qm({{-1, 0}, {0, -1}, {1, 1}});
  QVec b = {Rat(0), Rat(0), Rat(1)};
  CHECK(!recession_ray(a).has_value());
  auto verts = polytope_vertices(a, b);
  CHECK(verts.size() == 3);

  // half-strip: x >= 0 only
  auto ray = recession_ray(qm({{-1, 0}}));
  REQUIRE(ray.has_value());
  CHECK(sign((*ray)[0]) >= 0);
  CHECK(!(sign((*ray)[0]) == 0 && sign((*ray)[1]) == 0));
}

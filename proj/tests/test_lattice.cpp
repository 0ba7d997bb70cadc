#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tempered/parallel.hpp"
#include "tempered/qform.hpp"
#include "tempered/retract.hpp"

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

// M0 = {(x, 2y)}: the tempering sublattice used throughout the n=2 examples
static TemperedWeight tempered_12(long s_num, long s_den = 1) {
  return TemperedWeight::at(WeightSystem::with_sublattice(2, im({{1, 0}, {0, 2}})),
                            Rat(s_num, s_den));
}

TEST_CASE("weighted_length examples") {
  TemperedWeight triv = TemperedWeight::trivial(2);
  CHECK(weighted_length(QForm::identity(2), triv, iv({1, 0})) == Rat(1));
  CHECK(weighted_length(QForm::identity(2), tempered_12(4), iv({0, 1})) == Rat(4));
  CHECK(weighted_length(QForm::from(qm({{2, 1}, {1, 2}})), triv, iv({1, -1})) == Rat(2));
  CHECK_THROWS(weighted_length(QForm::identity(2), triv, iv({0, 0})));
  CHECK_THROWS(weighted_length(QForm::identity(2), triv, iv({1, 0, 0})));
}

TEST_CASE("short_vectors examples") {
  auto sv = short_vectors(QForm::identity(2), Rat(1));
  CHECK(sv == std::vector<IVec>{iv({-1, 0}), iv({0, -1}), iv({0, 1}), iv({1, 0})});

  auto sv2 = short_vectors(QForm::diag({Rat(1), Rat(4)}), Rat(1));
  CHECK(sv2 == std::vector<IVec>{iv({-1, 0}), iv({1, 0})});

  auto sv3 = short_vectors(QForm::from(qm({{2, 1}, {1, 2}})), Rat(2));
  CHECK(sv3.size() == 6);
  CHECK(std::find(sv3.begin(), sv3.end(), iv({1, -1})) != sv3.end());
  CHECK(std::find(sv3.begin(), sv3.end(), iv({0, 1})) != sv3.end());
  CHECK(std::find(sv3.begin(), sv3.end(), iv({1, 0})) != sv3.end());
}

TEST_CASE("parallel enumeration kernel agrees with the serial reference") {
  QForm f = QForm::from(qm({{5, 1, 2}, {1, 6, 1}, {2, 1, 7}}));
  auto serial = short_vectors_serial(f, Rat(40));
  CHECK(serial.size() > 20);
  int saved = jobs();
  set_jobs(4);
  auto par = short_vectors(f, Rat(40));
  set_jobs(saved);
  CHECK(par == serial);
}

TEST_CASE("arithmetic_minimum examples") {
  TemperedWeight triv = TemperedWeight::trivial(2);
  MinimaReport r1 = arithmetic_minimum(QForm::identity(2), triv);
  CHECK(r1.minimum == Rat(1));
  CHECK(r1.vectors.size() == 4);
  CHECK(r1.span_rank == 2);

  MinimaReport r2 = arithmetic_minimum(QForm::from(qm({{2, 1}, {1, 2}})), triv);
  CHECK(r2.minimum == Rat(2));
  CHECK(r2.vectors.size() == 6);
  CHECK(r2.span_rank == 2);

  MinimaReport r3 = arithmetic_minimum(QForm::identity(2), tempered_12(4));
  CHECK(r3.minimum == Rat(1));
  CHECK(r3.vectors == std::vector<IVec>{iv({-1, 0}), iv({1, 0})});
  CHECK(r3.span_rank == 1);
}

TEST_CASE("scaling invariance") {
  TemperedWeight w = tempered_12(3);
  QForm f = QForm::from(qm({{3, 1}, {1, 2}}));
  QForm f4 = QForm::from(q_scale(Rat(4), f.entries));
  MinimaReport a = arithmetic_minimum(f, w);
  MinimaReport b = arithmetic_minimum(f4, w);
  CHECK(b.minimum == Rat(4) * a.minimum);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("normalize_homothety examples") {
  TemperedWeight triv = TemperedWeight::trivial(2);
  QForm n1 = normalize_homothety(QForm::from(qm({{2, 1}, {1, 2}})), triv);
  CHECK(n1.entries == QMat{{Rat(1), Rat(1, 2)}, {Rat(1, 2), Rat(1)}});
  QForm n2 = normalize_homothety(QForm::identity(2), triv);
  CHECK(n2.entries == q_identity(2));
  QForm n3 = normalize_homothety(QForm::diag({Rat(4), Rat(4)}), triv);
  CHECK(n3.entries == q_identity(2));
}

TEST_CASE("s = 1 tempered weights agree with untempered") {
  TemperedWeight s1 = tempered_12(1);
  TemperedWeight triv = TemperedWeight::trivial(2);
  QForm f = QForm::from(qm({{3, 1}, {1, 5}}));
  MinimaReport a = arithmetic_minimum(f, s1);
  MinimaReport b = arithmetic_minimum(f, triv);
  CHECK(a.minimum == b.minimum);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("retraction_step examples") {
  TemperedWeight triv = TemperedWeight::trivial(2);
  auto [mu1, f1] = retraction_step(QForm::diag({Rat(1), Rat(4)}), triv);
  CHECK(mu1 == Rat(1, 4));  // mu^2 for mu = 1/2
  CHECK(f1.entries == q_identity(2));

  auto [mu2, f2] = retraction_step(QForm::diag({Rat(1), Rat(9)}), triv);
  CHECK(mu2 == Rat(1, 9));
  CHECK(f2.entries == q_identity(2));

  auto [mu3, f3] = retraction_step(QForm::identity(2), tempered_12(4));
  CHECK(mu3 == Rat(1, 4));
  CHECK(f3.entries == QMat{{Rat(1), Rat(0)}, {Rat(0), Rat(1, 4)}});

  CHECK_THROWS(retraction_step(QForm::identity(2), triv));                 // well rounded
  CHECK_THROWS(retraction_step(QForm::diag({Rat(2), Rat(8)}), triv));     // not normalized
}

TEST_CASE("well_rounded_retract examples") {
  TemperedWeight triv2 = TemperedWeight::trivial(2);
  RetractionTrace t1 = well_rounded_retract(QForm::identity(2), triv2);
  CHECK(t1.steps.empty());
  CHECK(t1.result.entries == q_identity(2));
  CHECK(t1.flag.subspaces.size() == 1);

  RetractionTrace t2 = well_rounded_retract(QForm::diag({Rat(1), Rat(4)}), triv2);
  CHECK(t2.steps.size() == 1);
  CHECK(t2.result.entries == q_identity(2));
  REQUIRE(t2.flag.subspaces.size() == 2);
  CHECK(t2.flag.subspaces[0] == IMat{iv({1, 0})});

  TemperedWeight triv3 = TemperedWeight::trivial(3);
  RetractionTrace t3 = well_rounded_retract(QForm::diag({Rat(1), Rat(4), Rat(25)}), triv3);
  CHECK(t3.steps.size() == 2);
  CHECK(t3.result.entries == q_identity(3));
  REQUIRE(t3.flag.subspaces.size() == 3);
  CHECK(t3.flag.subspaces[0] == IMat{iv({1, 0, 0})});
  CHECK(t3.flag.subspaces[1] == IMat{iv({1, 0, 0}), iv({0, 1, 0})});
}

TEST_CASE("retract idempotence and equivariance") {
  TemperedWeight triv = TemperedWeight::trivial(2);
  QForm f = QForm::from(qm({{1, 0}, {0, 7}}));
  RetractionTrace t = well_rounded_retract(f, triv);
  RetractionTrace t2 = well_rounded_retract(t.result, triv);
  CHECK(t2.steps.empty());

  // transport by h in GL_2(Z): retract(h^T f h) = h^T retract(f) h after
  // matching normalization (trivial weights are preserved by everything)
  IMat g = im({{1, 1}, {0, 1}});
  QMat moved = q_mul(q_mul(to_qmat(i_transpose(g)), f.entries), to_qmat(g));
  RetractionTrace tm = well_rounded_retract(QForm::from(moved), triv);
  QMat expected = q_mul(q_mul(to_qmat(i_transpose(g)), t.result.entries), to_qmat(g));
  CHECK(tm.result.entries == expected);
}

TEST_CASE("cell_signature examples") {
  TemperedWeight triv = TemperedWeight::trivial(2);
  Sig s1 = cell_signature(QForm::identity(2), triv);
  CHECK(s1 == Sig{iv({0, 1}), iv({1, 0})});

  CHECK_THROWS(cell_signature(QForm::diag({Rat(1), Rat(4)}), triv));

  QForm hexa = QForm::from(QMat{{Rat(1), Rat(1, 2)}, {Rat(1, 2), Rat(1)}});
  Sig s3 = cell_signature(hexa, triv);
  CHECK(s3 == Sig{iv({0, 1}), iv({1, -1}), iv({1, 0})});

  QForm quarter = QForm::from(QMat{{Rat(1), Rat(0)}, {Rat(0), Rat(1, 4)}});
  Sig s4 = cell_signature(quarter, tempered_12(4));
  CHECK(s4 == Sig{iv({0, 1}), iv({0, 2}), iv({1, 0})});
}

#include "tempered/lp.hpp"

#include "tempered/parallel.hpp"

#include <algorithm>
#include <functional>
#include <cassert>
#include <stdexcept>

namespace tempered {

namespace {

// Standard-form tableau simplex: maximize c.z with m.z = rhs, z >= 0.
// Dantzig entering rule with the lexicographic leaving rule; exact
// rationals throughout.  The lexicographic rule needs an identity block to
// start from, which the artificial columns provide; they are banned from
// re-entering instead of being erased.
struct Tableau {
  int m, n;
  int enter_limit;   // columns >= enter_limit may never enter the basis
  QMat a;            // m x n
  QVec rhs;          // m, kept >= 0
  std::vector<int> basis;  // m basic column indices

  QVec reduced(const QVec& c) const {
    QVec red = c;
    for (int i = 0; i < m; i++) {
      const Rat& cb = c[basis[i]];
      if (sign(cb) == 0) continue;
      for (int j = 0; j < n; j++) red[j] -= cb * a[i][j];
    }
    return red;
  }

  void pivot(int row, int col) {
    Rat inv = Rat(1) / a[row][col];
    for (int j = 0; j < n; j++) a[row][j] *= inv;
    rhs[row] *= inv;
    for (int i = 0; i < m; i++) {
      if (i == row || sign(a[i][col]) == 0) continue;
      Rat f = a[i][col];
      for (int j = 0; j < n; j++) a[i][j] -= f * a[row][j];
      rhs[i] -= f * rhs[row];
    }
    basis[row] = col;
  }

  // lexicographic comparison of row i against row k, both scaled by their
  // positive pivot-column entries; true when row i is lex-smaller
  bool lex_smaller(int i, int k, int col) const {
    const Rat& pi = a[i][col];
    const Rat& pk = a[k][col];
    Rat d = rhs[i] * pk - rhs[k] * pi;
    if (sign(d) != 0) return sign(d) < 0;
    for (int j = 0; j < n; j++) {
      d = a[i][j] * pk - a[k][j] * pi;
      if (sign(d) != 0) return sign(d) < 0;
    }
    return false;
  }

  // returns entering column on unboundedness, -1 on optimality
  int optimize(const QVec& c) {
    for (int iter = 0;; iter++) {
      if (iter > 100000) throw std::runtime_error("simplex: iteration budget");
      QVec red = reduced(c);
      int enter = -1;
      for (int j = 0; j < enter_limit; j++) {
        if (sign(red[j]) <= 0) continue;
        if (enter < 0 || red[j] > red[enter]) enter = j;
      }
      if (enter < 0) return -1;
      int leave = -1;
      for (int i = 0; i < m; i++) {
        if (sign(a[i][enter]) <= 0) continue;
        if (leave < 0 || lex_smaller(i, leave, enter)) leave = i;
      }
      if (leave < 0) return enter;
      pivot(leave, enter);
    }
  }

  QVec solution() const {
    QVec z(n, Rat(0));
    for (int i = 0; i < m; i++) z[basis[i]] = rhs[i];
    return z;
  }
};

}  // namespace

LpResult lp_maximize(const QMat& a_in, const QVec& b_in, const QVec& c_in) {
  int m = rows(a_in);
  int d = (int)c_in.size();
  // z = (u, v, s): x = u - v, slacks s;  A(u - v) + s = b
  int n = 2 * d + m;
  Tableau t;
  t.m = m;
  t.n = n + m;  // + artificials
  t.a = q_zero(m, t.n);
  t.rhs = b_in;
  for (int i = 0; i < m; i++) {
    for (int j = 0; j < d; j++) {
      t.a[i][j] = a_in[i][j];
      t.a[i][d + j] = -a_in[i][j];
    }
    t.a[i][2 * d + i] = 1;
    if (sign(t.rhs[i]) < 0) {
      for (int j = 0; j < n; j++) t.a[i][j] = -t.a[i][j];
      t.rhs[i] = -t.rhs[i];
    }
    t.a[i][n + i] = 1;
    t.basis.push_back(n + i);
  }

  // phase 1: drive artificials to zero (they may enter during phase 1)
  t.enter_limit = t.n;
  QVec phase1(t.n, Rat(0));
  for (int i = 0; i < m; i++) phase1[n + i] = -1;
  int status = t.optimize(phase1);
  assert(status < 0);  // phase 1 is always bounded
  Rat art_sum(0);
  for (int i = 0; i < m; i++)
    if (t.basis[i] >= n) art_sum += t.rhs[i];
  if (sign(art_sum) != 0) return {LpStatus::Infeasible, {}, {}, Rat(0)};
  // pivot artificials out of the basis where possible
  for (int i = 0; i < m; i++) {
    if (t.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; j++)
      if (sign(t.a[i][j]) != 0) {
        col = j;
        break;
      }
    if (col >= 0) t.pivot(i, col);
    // else: redundant row; harmless to keep with artificial at value 0
  }
  // phase 2: artificial columns stay (the lexicographic rule leans on
  // them) but may not re-enter
  t.enter_limit = n;
  QVec obj(t.n, Rat(0));
  for (int j = 0; j < d; j++) {
    obj[j] = c_in[j];
    obj[d + j] = -c_in[j];
  }
  int enter = t.optimize(obj);
  QVec z = t.solution();
  QVec x(d, Rat(0));
  for (int j = 0; j < d; j++) x[j] = z[j] - z[d + j];
  if (enter < 0) {
    Rat val(0);
    for (int j = 0; j < d; j++) val += c_in[j] * x[j];
    return {LpStatus::Optimal, x, {}, val};
  }
  // unbounded: assemble the improving ray in x-space
  QVec zray(t.n, Rat(0));
  zray[enter] = 1;
  for (int i = 0; i < t.m; i++) {
    // basic variables move by -a[i][enter]
    zray[t.basis[i]] = -t.a[i][enter];
  }
  QVec ray(d, Rat(0));
  for (int j = 0; j < d; j++) ray[j] = zray[j] - zray[d + j];
  Rat val(0);
  for (int j = 0; j < d; j++) val += c_in[j] * x[j];
  return {LpStatus::Unbounded, x, ray, val};
}

std::optional<QVec> recession_ray(const QMat& a) {
  if (a.empty()) return std::nullopt;
  int d = cols(a);
  // box the cone and probe each signed coordinate direction
  QMat sys = a;
  QVec rhs(rows(a), Rat(0));
  for (int k = 0; k < d; k++) {
    QVec row(d, Rat(0));
    row[k] = 1;
    sys.push_back(row);
    rhs.push_back(Rat(1));
    row[k] = -1;
    sys.push_back(row);
    rhs.push_back(Rat(1));
  }
  for (int k = 0; k < d; k++) {
    for (int sgn_ : {1, -1}) {
      QVec c(d, Rat(0));
      c[k] = sgn_;
      LpResult res = lp_maximize(sys, rhs, c);
      if (res.status == LpStatus::Optimal && sign(res.value) > 0) {
        return res.x;
      }
    }
  }
  return std::nullopt;
}

std::vector<QVec> polytope_vertices(const QMat& a, const QVec& b) {
  int m = rows(a), d = cols(a);
  std::vector<QVec> verts;
  if (d == 0) {
    verts.push_back({});
    return verts;
  }
  if (m < d) return verts;
  // split the d-subset enumeration over the first constraint index
  std::vector<std::vector<QVec>> found(m);
  parallel_for(m, [&](int first) {
    std::vector<int> idx(d);
    idx[0] = first;
    std::function<void(int, int)> rec = [&](int pos, int start) {
      if (pos == d) {
        QMat sub(d, QVec(d));
        QVec rhs(d);
        for (int i = 0; i < d; i++) {
          sub[i] = a[idx[i]];
          rhs[i] = b[idx[i]];
        }
        auto inv = q_inverse(sub);
        if (!inv) return;
        QVec x = qv_mul(rhs, q_transpose(*inv));  // solve sub * x = rhs
        for (int i = 0; i < m; i++) {
          Rat lhs = q_dot(a[i], x);
          if (lhs > b[i]) return;
        }
        found[first].push_back(x);
        return;
      }
      for (int i = start; i < m; i++) {
        idx[pos] = i;
        rec(pos + 1, i + 1);
      }
    };
    if (d == 1) {
      rec(1, first + 1);
    } else {
      rec(1, first + 1);
    }
  });
  for (auto& chunk_ : found)
    for (auto& x : chunk_)
      if (std::find(verts.begin(), verts.end(), x) == verts.end())
        verts.push_back(std::move(x));
  return verts;
}

}  // namespace tempered

#include "tempered/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace tempered {

IMat i_identity(int n) {
  IMat m(n, IVec(n, 0));
  for (int i = 0; i < n; i++) m[i][i] = 1;
  return m;
}

QMat q_identity(int n) {
  QMat m(n, QVec(n, Rat(0)));
  for (int i = 0; i < n; i++) m[i][i] = 1;
  return m;
}

QMat q_zero(int r, int c) { return QMat(r, QVec(c, Rat(0))); }

QMat to_qmat(const IMat& m) {
  QMat q(m.size());
  for (size_t i = 0; i < m.size(); i++) {
    q[i].reserve(m[i].size());
    for (const Int& x : m[i]) q[i].push_back(Rat(x));
  }
  return q;
}

QVec to_qvec(const IVec& v) {
  QVec q;
  q.reserve(v.size());
  for (const Int& x : v) q.push_back(Rat(x));
  return q;
}

IMat i_mul(const IMat& a, const IMat& b) {
  int m = rows(a), k = cols(a), n = cols(b);
  assert(k == rows(b));
  IMat c(m, IVec(n, 0));
  for (int i = 0; i < m; i++)
    for (int l = 0; l < k; l++) {
      if (a[i][l] == 0) continue;
      for (int j = 0; j < n; j++) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

IVec iv_mul(const IVec& v, const IMat& m) {
  int k = (int)v.size(), n = cols(m);
  assert(k == rows(m));
  IVec r(n, 0);
  for (int l = 0; l < k; l++) {
    if (v[l] == 0) continue;
    for (int j = 0; j < n; j++) r[j] += v[l] * m[l][j];
  }
  return r;
}

QMat q_mul(const QMat& a, const QMat& b) {
  int m = rows(a), k = cols(a), n = cols(b);
  assert(k == rows(b));
  QMat c = q_zero(m, n);
  for (int i = 0; i < m; i++)
    for (int l = 0; l < k; l++) {
      if (sign(a[i][l]) == 0) continue;
      for (int j = 0; j < n; j++) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

QVec qv_mul(const QVec& v, const QMat& m) {
  int k = (int)v.size(), n = cols(m);
  assert(k == rows(m));
  QVec r(n, Rat(0));
  for (int l = 0; l < k; l++) {
    if (sign(v[l]) == 0) continue;
    for (int j = 0; j < n; j++) r[j] += v[l] * m[l][j];
  }
  return r;
}

QMat q_add(const QMat& a, const QMat& b) {
  QMat c = a;
  for (int i = 0; i < rows(a); i++)
    for (int j = 0; j < cols(a); j++) c[i][j] += b[i][j];
  return c;
}

QMat q_sub(const QMat& a, const QMat& b) {
  QMat c = a;
  for (int i = 0; i < rows(a); i++)
    for (int j = 0; j < cols(a); j++) c[i][j] -= b[i][j];
  return c;
}

QMat q_scale(const Rat& s, const QMat& a) {
  QMat c = a;
  for (auto& row : c)
    for (auto& x : row) x *= s;
  return c;
}

IMat i_transpose(const IMat& m) {
  IMat t(cols(m), IVec(rows(m), 0));
  for (int i = 0; i < rows(m); i++)
    for (int j = 0; j < cols(m); j++) t[j][i] = m[i][j];
  return t;
}

QMat q_transpose(const QMat& m) {
  QMat t(cols(m), QVec(rows(m), Rat(0)));
  for (int i = 0; i < rows(m); i++)
    for (int j = 0; j < cols(m); j++) t[j][i] = m[i][j];
  return t;
}

bool q_is_zero(const QMat& m) {
  for (const auto& row : m)
    for (const auto& x : row)
      if (sign(x) != 0) return false;
  return true;
}

Rat form_value(const QMat& a, const IVec& v) {
  Rat total(0);
  int n = (int)v.size();
  for (int i = 0; i < n; i++) {
    if (v[i] == 0) continue;
    Rat row(0);
    for (int j = 0; j < n; j++) {
      if (v[j] == 0) continue;
      row += a[i][j] * Rat(v[j]);
    }
    total += Rat(v[i]) * row;
  }
  return total;
}

Rat form_value_q(const QMat& a, const QVec& v) {
  Rat total(0);
  int n = (int)v.size();
  for (int i = 0; i < n; i++) {
    if (sign(v[i]) == 0) continue;
    Rat row(0);
    for (int j = 0; j < n; j++) row += a[i][j] * v[j];
    total += v[i] * row;
  }
  return total;
}

Rat form_pair(const QMat& a, const IVec& u, const IVec& v) {
  Rat total(0);
  int n = (int)u.size();
  for (int i = 0; i < n; i++) {
    if (u[i] == 0) continue;
    Rat row(0);
    for (int j = 0; j < n; j++) {
      if (v[j] == 0) continue;
      row += a[i][j] * Rat(v[j]);
    }
    total += Rat(u[i]) * row;
  }
  return total;
}

Int i_dot(const IVec& a, const IVec& b) {
  Int s = 0;
  for (size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
  return s;
}

Rat q_dot(const QVec& a, const QVec& b) {
  Rat s(0);
  for (size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
  return s;
}

int ivec_cmp(const IVec& a, const IVec& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); i++) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool ivec_lt(const IVec& a, const IVec& b) { return ivec_cmp(a, b) < 0; }

IVec ivec_neg(const IVec& v) {
  IVec w = v;
  for (auto& x : w) x = -x;
  return w;
}

bool ivec_is_zero(const IVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

// ---- rational elimination ----

namespace {

// Row echelon reduction in place; returns pivot columns.
std::vector<int> row_echelon(QMat& a) {
  std::vector<int> pivots;
  int m = rows(a), n = cols(a);
  int r = 0;
  for (int c = 0; c < n && r < m; c++) {
    int p = -1;
    for (int i = r; i < m; i++)
      if (sign(a[i][c]) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[r], a[p]);
    Rat inv = Rat(1) / a[r][c];
    for (int j = c; j < n; j++) a[r][j] *= inv;
    for (int i = 0; i < m; i++) {
      if (i == r || sign(a[i][c]) == 0) continue;
      Rat f = a[i][c];
      for (int j = c; j < n; j++) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    r++;
  }
  return pivots;
}

}  // namespace

int q_rank(QMat a) { return (int)row_echelon(a).size(); }

Rat q_det(QMat a) {
  int n = rows(a);
  assert(n == cols(a));
  Rat det(1);
  for (int c = 0; c < n; c++) {
    int p = -1;
    for (int i = c; i < n; i++)
      if (sign(a[i][c]) != 0) {
        p = i;
        break;
      }
    if (p < 0) return Rat(0);
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    Rat inv = Rat(1) / a[c][c];
    for (int i = c + 1; i < n; i++) {
      if (sign(a[i][c]) == 0) continue;
      Rat f = a[i][c] * inv;
      for (int j = c; j < n; j++) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

std::optional<QMat> q_inverse(QMat a) {
  int n = rows(a);
  QMat aug = q_zero(n, 2 * n);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  auto piv = row_echelon(aug);
  if ((int)piv.size() != n) return std::nullopt;
  QMat inv = q_zero(n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) inv[i][j] = aug[i][n + j];
  return inv;
}

std::optional<QVec> q_solve_right(QMat a, QVec b) {
  int m = rows(a), n = cols(a);
  QMat aug = q_zero(m, n + 1);
  for (int i = 0; i < m; i++) {
    for (int j = 0; j < n; j++) aug[i][j] = a[i][j];
    aug[i][n] = b[i];
  }
  auto piv = row_echelon(aug);
  // inconsistent iff a pivot lands in the last column
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  QVec x(n, Rat(0));
  for (size_t r = 0; r < piv.size(); r++) x[piv[r]] = aug[r][n];
  return x;
}

std::vector<QVec> q_right_kernel(const QMat& a) {
  QMat e = a;
  auto piv = row_echelon(e);
  int n = cols(a);
  std::vector<bool> is_piv(n, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<QVec> basis;
  for (int c = 0; c < n; c++) {
    if (is_piv[c]) continue;
    QVec x(n, Rat(0));
    x[c] = 1;
    for (size_t r = 0; r < piv.size(); r++) x[piv[r]] = -e[r][c];
    basis.push_back(x);
  }
  return basis;
}

std::vector<QVec> q_left_kernel(const QMat& a) {
  return q_right_kernel(q_transpose(a));
}

QVec q_char_poly(const QMat& a) {
  // Faddeev-LeVerrier: exact, fine at these sizes.
  int n = rows(a);
  QMat m = q_zero(n, n);
  QVec coeff(n + 1, Rat(0));
  coeff[n] = 1;
  Rat c(1);
  for (int k = 1; k <= n; k++) {
    // M_k = A * M_{k-1} + c_{k-1} I
    QMat am = q_mul(a, m);
    for (int i = 0; i < n; i++) am[i][i] += c;
    m = am;
    Rat tr(0);
    QMat prod = q_mul(a, m);
    for (int i = 0; i < n; i++) tr += prod[i][i];
    c = -tr / Rat(k);
    coeff[n - k] = c;
  }
  return coeff;
}

// ---- integer lattice routines ----

void hnf_transform(const IMat& m_in, IMat& h, IMat& u) {
  int m = rows(m_in), n = cols(m_in);
  h = m_in;
  u = i_identity(m);
  int r = 0;
  for (int c = 0; c < n && r < m; c++) {
    // reduce column c below row r by gcd steps
    while (true) {
      int p = -1;
      for (int i = r; i < m; i++)
        if (h[i][c] != 0) {
          if (p < 0 || abs(h[i][c]) < abs(h[p][c])) p = i;
        }
      if (p < 0) break;
      std::swap(h[p], h[r]);
      std::swap(u[p], u[r]);
      bool done = true;
      for (int i = r + 1; i < m; i++) {
        if (h[i][c] == 0) continue;
        Int q = floor_div(h[i][c], h[r][c]);
        if (q != 0) {
          for (int j = 0; j < n; j++) h[i][j] -= q * h[r][j];
          for (int j = 0; j < m; j++) u[i][j] -= q * u[r][j];
        }
        if (h[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (h[r][c] == 0) continue;
    if (h[r][c] < 0) {
      for (int j = 0; j < n; j++) h[r][j] = -h[r][j];
      for (int j = 0; j < m; j++) u[r][j] = -u[r][j];
    }
    // reduce entries above the pivot into canonical range [0, pivot)
    for (int i = 0; i < r; i++) {
      Int q = floor_div(h[i][c], h[r][c]);
      if (q != 0) {
        for (int j = 0; j < n; j++) h[i][j] -= q * h[r][j];
        for (int j = 0; j < m; j++) u[i][j] -= q * u[r][j];
      }
    }
    r++;
  }
}

IMat hnf(IMat m) {
  IMat h, u;
  hnf_transform(m, h, u);
  while (!h.empty() && ivec_is_zero(h.back())) h.pop_back();
  return h;
}

IMat i_left_kernel(const IMat& a) {
  IMat h, u;
  hnf_transform(a, h, u);
  IMat ker;
  for (int i = 0; i < rows(h); i++)
    if (ivec_is_zero(h[i])) ker.push_back(u[i]);
  return hnf(ker);
}

bool in_row_lattice(const IVec& v, const IMat& basis) {
  IMat h = hnf(basis);
  IVec w = v;
  int n = (int)v.size();
  for (const IVec& row : h) {
    int c = 0;
    while (c < n && row[c] == 0) c++;
    if (c == n) continue;
    if (w[c] % row[c] != 0) {
      // cannot clear this coordinate with this pivot
    } else {
      Int q = w[c] / row[c];
      for (int j = 0; j < n; j++) w[j] -= q * row[j];
    }
  }
  return ivec_is_zero(w);
}

bool same_row_lattice(const IMat& a, const IMat& b) { return hnf(a) == hnf(b); }

IMat saturate(const IMat& basis) {
  // span_Q(rows) ∩ Z^n as the integer left kernel of a kernel matrix
  QMat qb = to_qmat(basis);
  auto ker = q_right_kernel(qb);  // columns w with B w = 0, given as rows
  if (ker.empty()) {
    // full rank: saturation is all of Z^n restricted to the span = Z^n
    return i_identity(cols(basis));
  }
  // W has the kernel vectors as columns, cleared to integers
  int n = cols(basis);
  IMat w(n, IVec(ker.size(), 0));
  for (size_t k = 0; k < ker.size(); k++) {
    IVec col = primitive_integer_vector(ker[k]);
    for (int i = 0; i < n; i++) w[i][k] = col[i];
  }
  return i_left_kernel(w);
}

Int lattice_index(const IMat& sup, const IMat& sub) {
  IMat hs = hnf(sup), hb = hnf(sub);
  assert(rows(hs) == rows(hb));
  Int ds = 1, db = 1;
  // product of pivots
  for (const auto& row : hs)
    for (const auto& x : row)
      if (x != 0) {
        ds *= x;
        break;
      }
  for (const auto& row : hb)
    for (const auto& x : row)
      if (x != 0) {
        db *= x;
        break;
      }
  assert(db % ds == 0);
  return db / ds;
}

Int i_det(IMat a) {
  // fraction-free Bareiss would do; with GMP a rational det is fine
  return Int(q_det(to_qmat(a)).get_num());
}

IMat i_unimodular_inverse(const IMat& m) {
  auto inv = q_inverse(to_qmat(m));
  if (!inv) throw std::domain_error("i_unimodular_inverse: singular");
  IMat out(rows(*inv), IVec(cols(*inv), 0));
  for (int i = 0; i < rows(*inv); i++)
    for (int j = 0; j < cols(*inv); j++) {
      const Rat& x = (*inv)[i][j];
      if (x.get_den() != 1)
        throw std::domain_error("i_unimodular_inverse: not unimodular");
      out[i][j] = x.get_num();
    }
  return out;
}

IMat i_adjugate(const IMat& m) {
  Int d = i_det(m);
  if (d == 0) throw std::domain_error("i_adjugate: singular");
  auto inv = q_inverse(to_qmat(m));
  IMat out(rows(m), IVec(cols(m), 0));
  for (int i = 0; i < rows(m); i++)
    for (int j = 0; j < cols(m); j++) {
      Rat x = (*inv)[i][j] * Rat(d);
      if (x.get_den() != 1) throw std::logic_error("i_adjugate: not integral");
      out[i][j] = x.get_num();
    }
  return out;
}

IVec primitive_integer_vector(const QVec& v) {
  Int lcm = 1;
  for (const Rat& x : v) {
    Int d = x.get_den();
    Int g;
    mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
    lcm = lcm / g * d;
  }
  IVec w;
  w.reserve(v.size());
  Int content = 0;
  for (const Rat& x : v) {
    Int num = x.get_num() * (lcm / x.get_den());
    w.push_back(num);
    Int g;
    mpz_gcd(g.get_mpz_t(), content.get_mpz_t(), num.get_mpz_t());
    content = g;
  }
  if (content > 1)
    for (auto& x : w) x /= content;
  return w;
}

// ---- symmetric form routines ----

bool is_symmetric(const QMat& a) {
  int n = rows(a);
  if (n != cols(a)) return false;
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++)
      if (a[i][j] != a[j][i]) return false;
  return true;
}

bool is_positive_definite(const QMat& a) {
  int n = rows(a);
  for (int k = 1; k <= n; k++) {
    QMat minor_(k, QVec(k, Rat(0)));
    for (int i = 0; i < k; i++)
      for (int j = 0; j < k; j++) minor_[i][j] = a[i][j];
    if (sign(q_det(minor_)) <= 0) return false;
  }
  return true;
}

std::optional<IVec> nonpositive_direction(const QMat& a_in) {
  int n = rows(a_in);
  QMat a = a_in;
  // basis change accumulated as rows: current coordinates y relate to the
  // original ones by x = y * T
  QMat t = q_identity(n);
  std::vector<int> live;
  for (int i = 0; i < n; i++) live.push_back(i);

  while (!live.empty()) {
    // find a live index with nonzero diagonal
    int piv = -1;
    for (int i : live)
      if (sign(a[i][i]) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) {
      // all live diagonal entries are zero
      int bi = -1, bj = -1;
      for (size_t p = 0; p < live.size() && bi < 0; p++)
        for (size_t q = p + 1; q < live.size(); q++) {
          if (sign(a[live[p]][live[q]]) != 0) {
            bi = live[p];
            bj = live[q];
            break;
          }
        }
      if (bi < 0) {
        // zero block: any live direction has value 0
        QVec w = t[live[0]];
        return primitive_integer_vector(w);
      }
      // (e_i - s e_j) has value -2|a_ij| < 0 for suitable sign s
      int s = sign(a[bi][bj]) > 0 ? -1 : 1;
      QVec w(n, Rat(0));
      for (int j = 0; j < n; j++) w[j] = t[bi][j] + Rat(s) * t[bj][j];
      return primitive_integer_vector(w);
    }
    if (sign(a[piv][piv]) < 0) return primitive_integer_vector(t[piv]);
    // eliminate pivot from remaining live rows (symmetric completion)
    for (int i : live) {
      if (i == piv) continue;
      Rat f = a[i][piv] / a[piv][piv];
      if (sign(f) == 0) continue;
      for (int j : live)
        a[i][j] -= f * a[piv][j];
      for (int j : live)
        a[j][i] = a[i][j];
      for (int j = 0; j < n; j++) t[i][j] -= f * t[piv][j];
    }
    live.erase(std::find(live.begin(), live.end(), piv));
  }
  return std::nullopt;  // positive definite
}

LdlT ldlt(const QMat& a_in) {
  int n = rows(a_in);
  QMat a = a_in;
  LdlT out;
  out.d.assign(n, Rat(0));
  out.r = q_identity(n);
  for (int k = 0; k < n; k++) {
    out.d[k] = a[k][k];
    if (sign(out.d[k]) <= 0) throw std::domain_error("ldlt: not positive definite");
    for (int j = k + 1; j < n; j++) out.r[k][j] = a[k][j] / a[k][k];
    for (int i = k + 1; i < n; i++)
      for (int j = k + 1; j < n; j++)
        a[i][j] -= a[i][k] * a[k][j] / a[k][k];
  }
  return out;
}

std::string qmat_str(const QMat& a) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows(a); i++) {
    os << (i ? "; " : "");
    for (int j = 0; j < cols(a); j++) os << (j ? "," : "") << rat_str(a[i][j]);
  }
  os << "]";
  return os.str();
}

std::string imat_str(const IMat& a) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows(a); i++) {
    os << (i ? "; " : "");
    for (int j = 0; j < cols(a); j++) os << (j ? "," : "") << a[i][j].get_str();
  }
  os << "]";
  return os.str();
}

}  // namespace tempered

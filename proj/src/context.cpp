#include "tempered/context.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tempered {

std::vector<int> Flag::type() const {
  std::vector<int> t;
  for (const IMat& m : members) t.push_back(rows(m));
  return t;
}

void Flag::validate() const {
  if (n <= 0) throw std::invalid_argument("Flag: bad dimension");
  int prev = 0;
  for (const IMat& m : members) {
    if (cols(m) != n) throw std::invalid_argument("Flag: member width");
    if (rows(m) <= prev || rows(m) >= n)
      throw std::invalid_argument("Flag: ranks must strictly increase and stay proper");
    if (hnf(m) != m) throw std::invalid_argument("Flag: member not in HNF");
    if (!same_row_lattice(m, saturate(m)))
      throw std::invalid_argument("Flag: member not saturated");
    prev = rows(m);
  }
  for (size_t i = 1; i < members.size(); i++)
    for (const IVec& v : members[i - 1])
      if (!in_row_lattice(v, members[i]))
        throw std::invalid_argument("Flag: members not nested");
}

Flag Flag::transported(const IMat& h) const {
  Flag f;
  f.n = n;
  for (const IMat& m : members) f.members.push_back(hnf(i_mul(m, h)));
  return f;
}

bool Flag::operator<(const Flag& other) const {
  if (n != other.n) return n < other.n;
  return members < other.members;
}

std::string Flag::str() const {
  std::ostringstream os;
  os << "flag[";
  for (size_t i = 0; i < members.size(); i++)
    os << (i ? " < " : "") << imat_str(members[i]);
  os << "]";
  return os.str();
}

Flag Flag::standard(int n, const std::vector<int>& ranks) {
  Flag f;
  f.n = n;
  for (int r : ranks) {
    IMat m;
    for (int i = 0; i < r; i++) {
      IVec row(n, 0);
      row[i] = 1;
      m.push_back(row);
    }
    f.members.push_back(m);
  }
  f.validate();
  return f;
}

Flag Flag::drop_member(int j) const {
  if (j < 1 || j > (int)members.size())
    throw std::invalid_argument("Flag::drop_member: index out of range");
  Flag f;
  f.n = n;
  for (int i = 0; i < (int)members.size(); i++)
    if (i != j - 1) f.members.push_back(members[i]);
  return f;
}

bool sig_in_flag_subcomplex(const Sig& sig, const Flag& flag) {
  for (const IMat& m : flag.members) {
    IMat inside;
    for (const IVec& v : sig)
      if (in_row_lattice(v, m)) inside.push_back(v);
    if (inside.empty()) return false;
    if (q_rank(to_qmat(inside)) != rows(m)) return false;
  }
  return true;
}

bool Context::member(const IMat& h) const {
  if (trivial_group) return h == i_identity((int)h.size());
  Int d = i_det(h);
  if (allow_det_minus_one) {
    if (d != 1 && d != -1) return false;
  } else {
    if (d != 1) return false;
  }
  if (semigroup_b) {
    // b h b^{-1} integral <=> det(b) divides every entry of b h adj(b)
    const IMat& b = *semigroup_b;
    Int bd = i_det(b);
    QMat binv = *q_inverse(to_qmat(b));
    QMat prod = q_mul(q_mul(to_qmat(b), to_qmat(h)), binv);
    for (const auto& row : prod)
      for (const auto& x : row)
        if (x.get_den() != 1) return false;
    (void)bd;
  }
  if (flag) {
    for (const IMat& m : flag->members)
      if (hnf(i_mul(m, h)) != m) return false;
  }
  return true;
}

Context Context::sl(int n) {
  (void)n;
  Context c;
  c.name = "sl";
  return c;
}

Context Context::trivial() {
  Context c;
  c.name = "trivial";
  c.trivial_group = true;
  return c;
}

Context Context::gamma_a(const IMat& b) {
  Context c;
  c.name = "gamma_a";
  c.semigroup_b = b;
  return c;
}

Context Context::parabolic(const Flag& f) {
  Context c;
  c.name = "p";
  for (int r : f.type()) c.name += "_" + std::to_string(r);
  c.flag = f;
  return c;
}

Context Context::gamma_a_parabolic(const IMat& b, const Flag& f) {
  Context c = parabolic(f);
  c.name = "ga_" + c.name;
  c.semigroup_b = b;
  return c;
}

std::vector<IMat> all_transports(const Sig& from, const Sig& to) {
  std::vector<IMat> out;
  if (from.size() != to.size() || from.empty()) return out;
  int n = (int)from[0].size();
  // independent subset of `from`
  std::vector<int> base;
  QMat acc;
  for (size_t i = 0; i < from.size() && (int)base.size() < n; i++) {
    acc.push_back(to_qvec(from[i]));
    if (q_rank(acc) == (int)base.size() + 1)
      base.push_back((int)i);
    else
      acc.pop_back();
  }
  if ((int)base.size() != n) return out;  // signatures in use always span
  QMat m;
  for (int i : base) m.push_back(to_qvec(from[i]));
  QMat minv = *q_inverse(m);

  int t = (int)to.size();
  std::vector<int> pick(n, 0);  // index into 2t signed targets
  while (true) {
    QMat w;
    for (int k = 0; k < n; k++) {
      int idx = pick[k] / 2;
      bool neg = pick[k] % 2;
      w.push_back(neg ? to_qvec(ivec_neg(to[idx])) : to_qvec(to[idx]));
    }
    QMat hq = q_mul(minv, w);
    bool integral = true;
    for (const auto& row : hq)
      for (const auto& x : row)
        if (x.get_den() != 1) {
          integral = false;
          break;
        }
    if (integral) {
      IMat h(n, IVec(n, 0));
      for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) h[i][j] = hq[i][j].get_num();
      Int d = i_det(h);
      if ((d == 1 || d == -1) && sig_transport(from, h) == to) out.push_back(h);
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == 2 * t - 1) {
      pick[k] = 0;
      k--;
    }
    if (k < 0) break;
    pick[k]++;
  }
  // deterministic order
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<IMat> cell_equivalent(const Sig& c1, const Sig& c2, const Context& ctx) {
  if (c1.size() != c2.size()) return std::nullopt;
  if (!c1.empty() &&
      sig_fingerprint(c1, (int)c1[0].size()) != sig_fingerprint(c2, (int)c2[0].size()))
    return std::nullopt;
  for (const IMat& h : all_transports(c1, c2))
    if (ctx.member(h)) return h;
  return std::nullopt;
}

std::vector<IMat> stabilizer(const Sig& sig, const Context& ctx) {
  std::vector<IMat> out;
  for (const IMat& h : all_transports(sig, sig))
    if (ctx.member(h)) out.push_back(h);
  return out;
}

std::vector<IMat> sl_generators(int n) {
  std::vector<IMat> gens;
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      if (i == j) continue;
      for (int s : {1, -1}) {
        IMat e = i_identity(n);
        e[i][j] = s;
        gens.push_back(e);
      }
    }
  return gens;
}

std::vector<IMat> parabolic_generators(const Flag& std_flag) {
  int n = std_flag.n;
  std::vector<int> ranks = std_flag.type();
  auto block_of = [&](int i) {
    int blk = 0;
    for (int r : ranks) {
      if (i < r) return blk;
      blk++;
    }
    return blk;
  };
  std::vector<IMat> gens;
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      if (i == j) continue;
      if (block_of(j) > block_of(i)) continue;  // must keep leading spans
      for (int s : {1, -1}) {
        IMat e = i_identity(n);
        e[i][j] = s;
        gens.push_back(e);
      }
    }
  for (int k = 0; k + 1 < n; k++) {
    IMat d = i_identity(n);
    d[k][k] = -1;
    d[k + 1][k + 1] = -1;
    gens.push_back(d);
  }
  return gens;
}

int CosetTable::index_of(const IMat& h) const {
  IMat key = hnf(i_mul(b, h));
  auto it = key_to_index.find(key);
  if (it == key_to_index.end())
    throw std::logic_error("CosetTable: element outside enumerated cosets");
  return it->second;
}

CosetTable CosetTable::build(const Context& ctx, int n) {
  if (!ctx.semigroup_b) throw std::invalid_argument("CosetTable: context has no sublattice");
  CosetTable t;
  t.b = *ctx.semigroup_b;
  auto gens = sl_generators(n);
  std::deque<IMat> queue;
  IMat id = i_identity(n);
  t.reps.push_back(id);
  t.key_to_index[hnf(t.b)] = 0;
  queue.push_back(id);
  while (!queue.empty()) {
    IMat h = queue.front();
    queue.pop_front();
    for (const IMat& g : gens) {
      IMat hg = i_mul(h, g);
      IMat key = hnf(i_mul(t.b, hg));
      if (t.key_to_index.count(key)) continue;
      t.key_to_index[key] = (int)t.reps.size();
      t.reps.push_back(hg);
      queue.push_back(hg);
    }
  }
  return t;
}

IMat unimodular_completion(const IMat& saturated_rows, int n) {
  if (saturated_rows.empty()) return i_identity(n);
  IMat bt = i_transpose(saturated_rows);
  IMat h, u;
  hnf_transform(bt, h, u);
  // u * b^T = [T; 0] with T unimodular for saturated input; rows of u^{-T}
  // carry the lattice in front
  IMat uit = i_transpose(i_unimodular_inverse(u));
  // sanity: prefix spans the same lattice
  IMat prefix(uit.begin(), uit.begin() + rows(saturated_rows));
  if (!same_row_lattice(prefix, saturated_rows))
    throw std::logic_error("unimodular_completion: prefix span mismatch");
  return uit;
}

namespace {

// unimodular matrix whose row prefix is adapted to the flag: the first
// rank(V_j) rows are a basis of V_j for every member
IMat adapted_basis(const Flag& f) {
  int n = f.n;
  IMat adapted;  // grows member by member
  for (size_t j = 0; j <= f.members.size(); j++) {
    IMat bj = j < f.members.size() ? f.members[j] : i_identity(n);
    if (adapted.empty()) {
      adapted = bj;
      continue;
    }
    // express current adapted rows in bj coordinates
    QMat bq = to_qmat(bj);
    QMat bqt = q_transpose(bq);
    IMat x;
    for (const IVec& row : adapted) {
      auto sol = q_solve_right(bqt, to_qvec(row));
      if (!sol) throw std::logic_error("adapted_basis: flag not nested");
      IVec xi;
      for (const Rat& c : *sol) {
        if (c.get_den() != 1) throw std::logic_error("adapted_basis: non-integer");
        xi.push_back(c.get_num());
      }
      x.push_back(xi);
    }
    int rj = rows(bj);
    IMat z = unimodular_completion(x, rj);
    // T z_prefix = x with T unimodular: rebuild so the literal prefix is x
    IMat zpre(z.begin(), z.begin() + rows(x));
    QMat zq = to_qmat(i_transpose(zpre));
    IMat tmat;
    for (const IVec& row : x) {
      auto sol = q_solve_right(zq, to_qvec(row));
      if (!sol) throw std::logic_error("adapted_basis: completion mismatch");
      IVec ti;
      for (const Rat& c : *sol) {
        assert(c.get_den() == 1);
        ti.push_back(c.get_num());
      }
      tmat.push_back(ti);
    }
    IMat y;
    for (int i = 0; i < rows(x); i++) y.push_back(iv_mul(tmat[i], z));
    for (int i = rows(x); i < rj; i++) y.push_back(z[i]);
    adapted = i_mul(y, bj);
  }
  return adapted;
}

}  // namespace

IMat flag_transporter_sl(const Flag& f1, const Flag& f2) {
  if (f1.type() != f2.type())
    throw std::invalid_argument("flag_transporter_sl: different types");
  IMat u1 = adapted_basis(f1);
  IMat u2 = adapted_basis(f2);
  if (i_det(u2) != i_det(u1)) {
    // flip the last row (outside every proper member) to fix the determinant
    for (auto& x : u2.back()) x = -x;
  }
  IMat h = i_mul(i_unimodular_inverse(u1), u2);
  assert(i_det(h) == 1);
  return h;
}

std::vector<Flag> flag_reps(int n, int length, const Context& ctx) {
  if (length < 2 || length > n)
    throw std::invalid_argument("flag_reps: length out of range");
  // rank subsets of size length-1 from {1..n-1}
  std::vector<std::vector<int>> rank_sets;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if ((int)cur.size() == length - 1) {
      rank_sets.push_back(cur);
      return;
    }
    for (int r = start; r <= n - 1; r++) {
      cur.push_back(r);
      rec(r + 1);
      cur.pop_back();
    }
  };
  rec(1);

  std::vector<Flag> reps;
  for (const auto& ranks : rank_sets) {
    Flag std_f = Flag::standard(n, ranks);
    if (!ctx.semigroup_b) {
      reps.push_back(std_f);
      continue;
    }
    CosetTable cosets = CosetTable::build(ctx, n);
    auto pgens = parabolic_generators(std_f);
    // orbits of right P-multiplication on the coset space
    std::vector<int> orbit(cosets.reps.size(), -1);
    int next_orbit = 0;
    for (size_t i = 0; i < cosets.reps.size(); i++) {
      if (orbit[i] >= 0) continue;
      orbit[i] = next_orbit;
      std::deque<int> queue{(int)i};
      while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        for (const IMat& p : pgens) {
          int d = cosets.index_of(i_mul(cosets.reps[c], p));
          if (orbit[d] < 0) {
            orbit[d] = next_orbit;
            queue.push_back(d);
          }
        }
      }
      // orbit representative coset r: flag rep is std_f * r^{-1}
      reps.push_back(std_f.transported(i_unimodular_inverse(cosets.reps[i])));
      next_orbit++;
    }
  }
  return reps;
}

std::optional<IMat> flag_equivalent(const Flag& f1, const Flag& f2, const Context& ctx) {
  if (f1.type() != f2.type()) return std::nullopt;
  IMat g1 = flag_transporter_sl(Flag::standard(f1.n, f1.type()), f1);
  IMat g2 = flag_transporter_sl(Flag::standard(f2.n, f2.type()), f2);
  if (!ctx.semigroup_b) {
    IMat h = i_mul(i_unimodular_inverse(g1), g2);
    if (ctx.member(h)) return h;
    return std::nullopt;
  }
  CosetTable cosets = CosetTable::build(ctx, f1.n);
  auto pgens = parabolic_generators(Flag::standard(f1.n, f1.type()));
  int start = cosets.index_of(i_unimodular_inverse(g1));
  int goal = cosets.index_of(i_unimodular_inverse(g2));
  // BFS over cosets, tracking the accumulated parabolic word
  std::vector<int> seen(cosets.reps.size(), 0);
  std::deque<std::pair<int, IMat>> queue;
  queue.push_back({start, i_identity(f1.n)});
  seen[start] = 1;
  while (!queue.empty()) {
    auto [c, word] = queue.front();
    queue.pop_front();
    if (c == goal) {
      IMat h = i_mul(i_mul(i_unimodular_inverse(g1), word), g2);
      if (!ctx.member(h)) throw std::logic_error("flag_equivalent: bad transporter");
      return h;
    }
    // configuration of this coset relative to start: multiply the word
    IMat base = i_mul(i_unimodular_inverse(g1), word);
    for (const IMat& p : pgens) {
      IMat next_elt = i_mul(base, p);
      int d = cosets.index_of(next_elt);
      if (!seen[d]) {
        seen[d] = 1;
        queue.push_back({d, i_mul(word, p)});
      }
    }
  }
  return std::nullopt;
}

}  // namespace tempered

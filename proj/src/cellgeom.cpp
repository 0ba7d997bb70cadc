#include "tempered/cellgeom.hpp"

#include "tempered/parallel.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace tempered {

int sym_dim(int n) { return n * (n + 1) / 2; }

QVec sym_to_coords(const QMat& a) {
  int n = rows(a);
  QVec x;
  x.reserve(sym_dim(n));
  for (int i = 0; i < n; i++)
    for (int j = i; j < n; j++) x.push_back(a[i][j]);
  return x;
}

QMat sym_from_coords(const QVec& x, int n) {
  QMat a = q_zero(n, n);
  int k = 0;
  for (int i = 0; i < n; i++)
    for (int j = i; j < n; j++) {
      a[i][j] = x[k];
      a[j][i] = x[k];
      k++;
    }
  return a;
}

QVec sym_value_row(const IVec& v, int n) {
  QVec r;
  r.reserve(sym_dim(n));
  for (int i = 0; i < n; i++)
    for (int j = i; j < n; j++)
      r.push_back(i == j ? Rat(v[i] * v[i]) : Rat(2 * v[i] * v[j]));
  return r;
}

std::optional<IVec> negative_direction(const QMat& a_in) {
  int n = rows(a_in);
  QMat a = a_in;
  QMat t = q_identity(n);
  std::vector<int> live;
  for (int i = 0; i < n; i++) live.push_back(i);
  while (!live.empty()) {
    int piv = -1;
    for (int i : live)
      if (sign(a[i][i]) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) {
      int bi = -1, bj = -1;
      for (size_t p = 0; p < live.size() && bi < 0; p++)
        for (size_t q = p + 1; q < live.size(); q++)
          if (sign(a[live[p]][live[q]]) != 0) {
            bi = live[p];
            bj = live[q];
            break;
          }
      if (bi < 0) return std::nullopt;  // remaining block is zero
      int s = sign(a[bi][bj]) > 0 ? -1 : 1;
      QVec w(n, Rat(0));
      for (int j = 0; j < n; j++) w[j] = t[bi][j] + Rat(s) * t[bj][j];
      return primitive_integer_vector(w);
    }
    if (sign(a[piv][piv]) < 0) return primitive_integer_vector(t[piv]);
    for (int i : live) {
      if (i == piv) continue;
      Rat f = a[i][piv] / a[piv][piv];
      if (sign(f) == 0) continue;
      for (int j : live) a[i][j] -= f * a[piv][j];
      for (int j : live) a[j][i] = a[i][j];
      for (int j = 0; j < n; j++) t[i][j] -= f * t[piv][j];
    }
    live.erase(std::find(live.begin(), live.end(), piv));
  }
  return std::nullopt;
}

SliceGeometry::SliceGeometry(TemperedWeight w, int budget)
    : w_(std::move(w)), budget_(budget) {
  w_.validate();
}

Rat SliceGeometry::rhs(const IVec& v) const { return Rat(1) / w_.weight(v); }

std::optional<SliceGeometry::AffinePatch> SliceGeometry::solve_equalities(
    const Sig& sig) const {
  int nn = n();
  QMat m;
  QVec b;
  for (const IVec& v : sig) {
    m.push_back(sym_value_row(v, nn));
    b.push_back(rhs(v));
  }
  auto x0 = q_solve_right(m, b);
  if (!x0) return std::nullopt;
  // verify consistency (solve_right returns a candidate for full pivot rows)
  QVec img = qv_mul(*x0, q_transpose(m));
  for (int i = 0; i < rows(m); i++)
    if (img[i] != b[i]) return std::nullopt;
  AffinePatch patch;
  patch.x0 = *x0;
  patch.dirs = q_right_kernel(m);
  return patch;
}

namespace {

struct Pool {
  // constraint vectors beyond the signature, canonical +- reps
  std::vector<IVec> vecs;
  std::set<IVec, decltype(&ivec_lt)> seen{&ivec_lt};

  bool add(const IVec& v) {
    IVec r = v;
    for (const Int& x : r) {
      if (x > 0) break;
      if (x < 0) {
        r = ivec_neg(r);
        break;
      }
    }
    if (seen.count(r)) return false;
    seen.insert(r);
    vecs.push_back(r);
    return true;
  }
};

}  // namespace

SliceGeometry::RealizeResult SliceGeometry::realize_lp(const Sig& sig,
                                                       const AffinePatch& patch,
                                                       const std::optional<Rat>& box) {
  int d = (int)patch.dirs.size();
  int nn = n();

  Pool pool;
  for (int i = 0; i < nn; i++) {
    IVec e(nn, 0);
    e[i] = 1;
    pool.add(e);
    for (int j = i + 1; j < nn; j++) {
      IVec f = e;
      f[j] = 1;
      pool.add(f);
      f[j] = -1;
      pool.add(f);
    }
  }
  for (const IVec& v : sig) pool.add(v);

  for (int round = 0; round < budget_; round++) {
    // LP over (x, t): maximize t with weight(u)*A(u) >= 1 + t for pool
    // vectors outside the signature, t <= 1, optionally |x_k| <= box
    QMat lpa;
    QVec lpb;
    for (const IVec& u : pool.vecs) {
      if (sig_contains(sig, u)) continue;
      // -(sum_k x_k w(u) D_k(u)) + t <= w(u) A0(u) - 1
      QVec urow = sym_value_row(u, nn);
      QVec row(d + 1, Rat(0));
      Rat wu = w_.weight(u);
      for (int k = 0; k < d; k++) row[k] = -wu * q_dot(urow, patch.dirs[k]);
      row[d] = 1;
      lpa.push_back(row);
      lpb.push_back(wu * q_dot(urow, patch.x0) - 1);
    }
    {
      QVec row(d + 1, Rat(0));
      row[d] = 1;
      lpa.push_back(row);
      lpb.push_back(Rat(1));
    }
    if (box) {
      for (int k = 0; k < d; k++) {
        QVec row(d + 1, Rat(0));
        row[k] = 1;
        lpa.push_back(row);
        lpb.push_back(*box);
        row[k] = -1;
        lpa.push_back(row);
        lpb.push_back(*box);
      }
    }
    QVec obj(d + 1, Rat(0));
    obj[d] = 1;
    LpResult res = lp_maximize(lpa, lpb, obj);
    if (res.status == LpStatus::Infeasible) return {RealizeOutcome::Empty, {}};
    if (res.status == LpStatus::Optimal && sign(res.value) <= 0)
      return {RealizeOutcome::Empty, {}};
    if (res.status != LpStatus::Optimal)
      throw std::logic_error("realize: slack LP unbounded");

    QVec x(patch.x0);
    for (int k = 0; k < d; k++)
      for (int c = 0; c < (int)x.size(); c++) x[c] += res.x[k] * patch.dirs[k][c];
    QMat a = sym_from_coords(x, nn);
    if (!is_positive_definite(a)) {
      auto wdir = nonpositive_direction(a);
      assert(wdir);
      if (!pool.add(*wdir))
        throw std::logic_error("realize: stalled on repeated direction");
      continue;
    }
    MinimaReport rep = arithmetic_minimum(QForm::from(a), w_);
    if (rep.minimum == 1 && canonical_signature(rep.vectors) == sig)
      return {RealizeOutcome::Found, a};
    bool grew = false;
    for (const IVec& v : rep.vectors)
      if (!sig_contains(sig, v)) grew |= pool.add(v);
    if (!grew) throw std::logic_error("realize: no progress cutting " + sig_str(sig));
  }
  throw BudgetExceeded("realize: cutting-plane budget exceeded");
}

std::optional<QMat> SliceGeometry::realize(const Sig& sig) {
  if (sig.empty() || sig_span_rank(sig) != n()) return std::nullopt;
  auto patch = solve_equalities(sig);
  if (!patch) return std::nullopt;
  // boxed first: keeps coordinates small on the found path.  A boxed Empty
  // answer may be a clipping artifact, so emptiness is confirmed unboxed.
  RealizeResult boxed = realize_lp(sig, *patch, Rat(1 << 16));
  if (boxed.outcome == RealizeOutcome::Found) return boxed.witness;
  RealizeResult confirm = realize_lp(sig, *patch, std::nullopt);
  if (confirm.outcome == RealizeOutcome::Found) return confirm.witness;
  return std::nullopt;
}

CellGeometry SliceGeometry::complete(const Sig& sig,
                                     const std::optional<QMat>& witness_hint) {
  std::optional<QMat> witness;
  if (witness_hint) {
    MinimaReport rep = arithmetic_minimum(QForm::from(*witness_hint), w_);
    if (canonical_signature(rep.vectors) != sig)
      throw std::invalid_argument("complete: witness hint does not match signature");
    witness = q_scale(Rat(1) / rep.minimum, *witness_hint);
  } else {
    if (std::getenv("TEMPERED_DEBUG"))
      fprintf(stderr, "[geo] realizing without witness: %s\n", sig_str(sig).c_str());
    witness = realize(sig);
  }
  if (!witness) throw std::invalid_argument("complete: cell not realized: " + sig_str(sig));
  auto patch = solve_equalities(sig);
  assert(patch);
  int d = (int)patch->dirs.size();
  int nn = n();

  CellGeometry cell;
  cell.sig = sig;
  cell.dim = d;
  cell.witness = *witness;
  for (const QVec& dir : patch->dirs) cell.dirs.push_back(sym_from_coords(dir, nn));

  if (d == 0) {
    cell.verts = {*witness};
    cell.vert_sigs = {sig};
    return cell;
  }

  // recenter the patch at the witness so x = 0 is interior
  QVec x0 = sym_to_coords(*witness);

  Pool pool;
  for (const IVec& v : sig) pool.add(v);
  // seed with the short vectors that are nearly minimal at the witness;
  // anything missed comes back as an exact violation cut
  for (const IVec& v :
       short_vectors_weighted(QForm::from(*witness), w_, Rat(3, 2)))
    pool.add(v);

  auto constraint_rows = [&](QMat& lpa, QVec& lpb) {
    lpa.clear();
    lpb.clear();
    for (const IVec& u : pool.vecs) {
      if (sig_contains(sig, u)) continue;
      QVec urow = sym_value_row(u, nn);
      Rat wu = w_.weight(u);
      QVec row(d, Rat(0));
      for (int k = 0; k < d; k++) row[k] = -wu * q_dot(urow, patch->dirs[k]);
      lpa.push_back(row);
      lpb.push_back(wu * q_dot(urow, x0) - 1);
    }
  };

  for (int round = 0; round < budget_; round++) {
    QMat lpa;
    QVec lpb;
    constraint_rows(lpa, lpb);
    // unbounded directions first
    auto ray = recession_ray(lpa);
    if (ray) {
      QMat dmat = q_zero(nn, nn);
      for (int k = 0; k < d; k++)
        dmat = q_add(dmat, q_scale((*ray)[k], cell.dirs[k]));
      auto neg = negative_direction(dmat);
      if (!neg)
        throw std::logic_error("complete: recession direction with no negative vector");
      if (!pool.add(*neg)) throw std::logic_error("complete: stalled on ray cut");
      continue;
    }
    auto xverts = polytope_vertices(lpa, lpb);
    if (xverts.empty()) throw std::logic_error("complete: no vertices found");
    bool changed = false;
    std::vector<QMat> forms;
    std::vector<Sig> sigs;
    // exact verification of the candidate vertices is embarrassingly
    // parallel; cuts are merged afterwards
    struct VertCheck {
      QMat form;
      Sig sig;
      std::vector<IVec> cuts;
      bool valid = false;
    };
    std::vector<VertCheck> checks(xverts.size());
    parallel_for((int)xverts.size(), [&](int vi) {
      const QVec& xv = xverts[vi];
      QVec coords = x0;
      for (int k = 0; k < d; k++)
        for (int c = 0; c < (int)coords.size(); c++)
          coords[c] += xv[k] * patch->dirs[k][c];
      QMat av = sym_from_coords(coords, nn);
      VertCheck& out = checks[vi];
      if (!is_positive_definite(av)) {
        auto wdir = nonpositive_direction(av);
        assert(wdir);
        out.cuts.push_back(*wdir);
        return;
      }
      MinimaReport rep = arithmetic_minimum(QForm::from(av), w_);
      if (rep.minimum < 1) {
        out.cuts = rep.vectors;
        return;
      }
      out.valid = true;
      out.form = av;
      out.sig = canonical_signature(rep.vectors);
    });
    for (VertCheck& ck : checks) {
      for (const IVec& v : ck.cuts) changed |= pool.add(v);
      if (!ck.valid) continue;
      for (const IVec& v : ck.sig) changed |= pool.add(v);
      forms.push_back(ck.form);
      sigs.push_back(ck.sig);
    }
    if (changed) continue;
    cell.verts = forms;
    cell.vert_sigs = sigs;
    break;
  }
  if (cell.verts.empty()) throw BudgetExceeded("complete: face budget exceeded");

  // canonical vertex order (by signature) for deterministic orientation data
  std::vector<int> order(cell.verts.size());
  for (size_t i = 0; i < order.size(); i++) order[i] = (int)i;
  SigLess less;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return less(cell.vert_sigs[a], cell.vert_sigs[b]); });
  std::vector<QMat> vs;
  std::vector<Sig> ss;
  for (int i : order) {
    vs.push_back(cell.verts[i]);
    ss.push_back(cell.vert_sigs[i]);
  }
  cell.verts = vs;
  cell.vert_sigs = ss;

  // facets: tight-vector faces of affine dimension d-1
  std::set<Sig, SigLess> facet_set;
  std::set<IVec, decltype(&ivec_lt)> tight(&ivec_lt);
  for (const Sig& s : cell.vert_sigs)
    for (const IVec& v : s)
      if (!sig_contains(sig, v)) tight.insert(v);
  for (const IVec& u : tight) {
    std::vector<int> vu;
    for (size_t i = 0; i < cell.verts.size(); i++)
      if (sig_contains(cell.vert_sigs[i], u)) vu.push_back((int)i);
    if (vu.empty()) continue;
    // affine dimension of the vertex set
    QMat diffs;
    for (size_t k = 1; k < vu.size(); k++)
      diffs.push_back(sym_to_coords(q_sub(cell.verts[vu[k]], cell.verts[vu[0]])));
    int fdim = diffs.empty() ? 0 : q_rank(diffs);
    if (fdim != d - 1) continue;
    Sig fs = cell.vert_sigs[vu[0]];
    for (size_t k = 1; k < vu.size(); k++) {
      Sig inter;
      for (const IVec& v : fs)
        if (sig_contains(cell.vert_sigs[vu[k]], v)) inter.push_back(v);
      fs = inter;
    }
    facet_set.insert(fs);
  }
  cell.facet_sigs.assign(facet_set.begin(), facet_set.end());
  return cell;
}

std::vector<std::pair<Sig, QMat>> SliceGeometry::star_cofaces(const CellGeometry& cell) {
  const Sig& sig0 = cell.sig;
  int m = (int)sig0.size();
  int nn = n();
  if (m > 14) throw BudgetExceeded("star_cofaces: signature too large");
  std::vector<std::pair<Sig, QMat>> out;
  int nsym = sym_dim(nn);

  for (int mask = 1; mask < (1 << m) - 1; mask++) {
    Sig sub;
    for (int i = 0; i < m; i++)
      if (mask & (1 << i)) sub.push_back(sig0[i]);
    if (sig_span_rank(sub) != nn) continue;

    // feasibility of a direction B with sub-values 0 and the rest strictly
    // positive: maximize t subject to u B u^T >= t (complement), = 0 (sub)
    QMat lpa;
    QVec lpb;
    for (int i = 0; i < m; i++) {
      QVec row = sym_value_row(sig0[i], nn);
      if (mask & (1 << i)) {
        QVec le(nsym + 1, Rat(0)), ge(nsym + 1, Rat(0));
        for (int k = 0; k < nsym; k++) {
          le[k] = row[k];
          ge[k] = -row[k];
        }
        lpa.push_back(le);
        lpb.push_back(Rat(0));
        lpa.push_back(ge);
        lpb.push_back(Rat(0));
      } else {
        QVec r(nsym + 1, Rat(0));
        for (int k = 0; k < nsym; k++) r[k] = -row[k];
        r[nsym] = 1;
        lpa.push_back(r);
        lpb.push_back(Rat(0));
      }
    }
    {
      QVec r(nsym + 1, Rat(0));
      r[nsym] = 1;
      lpa.push_back(r);
      lpb.push_back(Rat(1));
    }
    QVec obj(nsym + 1, Rat(0));
    obj[nsym] = 1;
    LpResult res = lp_maximize(lpa, lpb, obj);
    if (res.status != LpStatus::Optimal || sign(res.value) <= 0) continue;

    QMat b = sym_from_coords(QVec(res.x.begin(), res.x.begin() + nsym), nn);
    // step off the cell: find a rational eps with exact signature sub
    bool placed = false;
    Rat eps(1);
    for (int tries = 0; tries < 80 && !placed; tries++, eps /= 2) {
      QMat a = q_add(cell.witness, q_scale(eps, b));
      if (!is_positive_definite(a)) continue;
      MinimaReport rep = arithmetic_minimum(QForm::from(a), w_);
      if (rep.minimum != 1) continue;
      if (canonical_signature(rep.vectors) == sub) {
        out.emplace_back(sub, a);
        placed = true;
      }
    }
    if (!placed)
      throw BudgetExceeded("star_cofaces: could not place witness for " + sig_str(sub));
  }
  return out;
}

Sig SliceGeometry::locate(const QForm& f) const {
  MinimaReport rep = arithmetic_minimum(f, w_);
  return canonical_signature(rep.vectors);
}

std::optional<std::pair<Sig, QMat>> SliceGeometry::closure_signature(const Sig& sig) {
  // Grow the set of identically-tight vectors until the open face relative
  // to it is nonempty.  A vector is certified forced when its value cannot
  // exceed 1 anywhere on the (cut-refined) closed face.
  if (sig.empty() || sig_span_rank(sig) != n()) return std::nullopt;
  Sig tight = sig;
  int nn = n();
  Rat box(1 << 16);

  Pool pool;
  for (int i = 0; i < nn; i++) {
    IVec e(nn, 0);
    e[i] = 1;
    pool.add(e);
    for (int j = i + 1; j < nn; j++) {
      IVec e2 = e;
      e2[j] = 1;
      pool.add(e2);
      e2[j] = -1;
      pool.add(e2);
    }
  }
  for (const IVec& v : sig) pool.add(v);

  for (int outer = 0; outer < budget_; outer++) {
    auto patch = solve_equalities(tight);
    if (!patch) return std::nullopt;
    int d = (int)patch->dirs.size();

    // affine data of a pool vector: value(x) = c0 + lin . x
    auto value_row = [&](const IVec& u, QVec& lin, Rat& c0) {
      QVec urow = sym_value_row(u, nn);
      Rat wu = w_.weight(u);
      lin.assign(d, Rat(0));
      for (int k = 0; k < d; k++) lin[k] = wu * q_dot(urow, patch->dirs[k]);
      c0 = wu * q_dot(urow, patch->x0);
    };
    auto face_constraints = [&](QMat& lpa, QVec& lpb, int extra_cols) {
      lpa.clear();
      lpb.clear();
      for (const IVec& u : pool.vecs) {
        if (sig_contains(tight, u)) continue;
        QVec lin;
        Rat c0;
        value_row(u, lin, c0);
        QVec row(d + extra_cols, Rat(0));
        for (int k = 0; k < d; k++) row[k] = -lin[k];
        lpa.push_back(row);
        lpb.push_back(c0 - 1);
      }
      for (int k = 0; k < d; k++) {
        QVec row(d + extra_cols, Rat(0));
        row[k] = 1;
        lpa.push_back(row);
        lpb.push_back(box);
        row[k] = -1;
        lpa.push_back(row);
        lpb.push_back(box);
      }
    };
    auto point_at = [&](const QVec& x) {
      QVec coords = patch->x0;
      for (int k = 0; k < d; k++)
        for (int c = 0; c < (int)coords.size(); c++)
          coords[c] += x[k] * patch->dirs[k][c];
      return sym_from_coords(coords, nn);
    };

    // interior attempt: maximize the common slack t <= 1
    for (int round = 0; round < budget_; round++) {
      QMat lpa;
      QVec lpb;
      face_constraints(lpa, lpb, 1);
      for (auto& row : lpa) row[d] = 0;
      // slack only on the genuine face constraints (first block)
      int nf = 0;
      for (const IVec& u : pool.vecs)
        if (!sig_contains(tight, u)) nf++;
      for (int i = 0; i < nf; i++) lpa[i][d] = 1;
      {
        QVec row(d + 1, Rat(0));
        row[d] = 1;
        lpa.push_back(row);
        lpb.push_back(Rat(1));
      }
      QVec obj(d + 1, Rat(0));
      obj[d] = 1;
      LpResult res = lp_maximize(lpa, lpb, obj);
      if (res.status == LpStatus::Infeasible) return std::nullopt;
      if (res.status != LpStatus::Optimal)
        throw std::logic_error("closure_signature: slack LP unbounded");
      if (sign(res.value) <= 0) break;  // no interior relative to `tight`
      QMat a = point_at(QVec(res.x.begin(), res.x.begin() + d));
      if (!is_positive_definite(a)) {
        auto wdir = nonpositive_direction(a);
        assert(wdir);
        if (!pool.add(*wdir)) throw std::logic_error("closure_signature: PD stall");
        continue;
      }
      MinimaReport rep = arithmetic_minimum(QForm::from(a), w_);
      if (rep.minimum == 1 && canonical_signature(rep.vectors) == tight)
        return std::make_pair(tight, a);
      bool added = false;
      for (const IVec& v : rep.vectors)
        if (!sig_contains(tight, v)) added |= pool.add(v);
      if (!added) throw std::logic_error("closure_signature: cut stall");
    }

    // certify one forced vector: max value_u == 1 over the refined face
    bool forced_found = false;
    for (size_t ui = 0; ui < pool.vecs.size() && !forced_found; ui++) {
      IVec u = pool.vecs[ui];
      if (sig_contains(tight, u)) continue;
      for (int round = 0; round < budget_; round++) {
        QMat lpa;
        QVec lpb;
        face_constraints(lpa, lpb, 0);
        QVec lin;
        Rat c0;
        value_row(u, lin, c0);
        LpResult res = lp_maximize(lpa, lpb, lin);
        if (res.status == LpStatus::Infeasible) return std::nullopt;
        if (res.status != LpStatus::Optimal)
          throw std::logic_error("closure_signature: value LP unbounded");
        Rat maxval = res.value + c0;
        if (maxval > 1) {
          // confirm the maximizer is a genuine face point; otherwise cut
          QMat a = point_at(res.x);
          if (!is_positive_definite(a)) {
            auto wdir = nonpositive_direction(a);
            assert(wdir);
            if (!pool.add(*wdir)) throw std::logic_error("closure_signature: PD stall");
            continue;
          }
          MinimaReport rep = arithmetic_minimum(QForm::from(a), w_);
          if (rep.minimum < 1) {
            bool added = false;
            for (const IVec& v : rep.vectors)
              if (!sig_contains(tight, v)) added |= pool.add(v);
            if (added) continue;
            throw std::logic_error("closure_signature: cut stall");
          }
          break;  // genuine point with value > 1: u is not forced
        }
        // maxval == 1 over a relaxation of the face: u is identically tight
        tight.push_back(u);
        tight = canonical_signature(std::vector<IVec>(tight.begin(), tight.end()));
        forced_found = true;
        break;
      }
    }
    if (!forced_found)
      throw std::logic_error("closure_signature: no forced vector certified");
  }
  throw BudgetExceeded("closure_signature: outer budget");
}

namespace {

QMat barycenter(const std::vector<QMat>& pts) {
  QMat acc = q_zero(rows(pts[0]), cols(pts[0]));
  for (const QMat& p : pts) acc = q_add(acc, p);
  return q_scale(Rat(1, (long)pts.size()), acc);
}

// coordinates of the symmetric matrix m against the basis dirs (must lie in
// the span); returns the coefficient vector
QVec coords_in_basis(const std::vector<QMat>& dirs, const QMat& m) {
  QMat sys;  // columns = dirs
  for (const QMat& dmat : dirs) sys.push_back(sym_to_coords(dmat));
  QMat syst = q_transpose(sys);
  auto sol = q_solve_right(syst, sym_to_coords(m));
  if (!sol) throw std::logic_error("coords_in_basis: not in span");
  return *sol;
}

}  // namespace

int SliceGeometry::incidence_sign(const CellGeometry& tau, const CellGeometry& sigma) {
  // outward vector from tau's interior toward the facet, then compare the
  // orientation of (outward, basis(sigma)) against basis(tau)
  QMat out_vec = q_sub(barycenter(sigma.verts), barycenter(tau.verts));
  QMat mat;
  QVec w = coords_in_basis(tau.dirs, out_vec);
  mat.push_back(w);
  for (const QMat& d : sigma.dirs) mat.push_back(coords_in_basis(tau.dirs, d));
  Rat det = q_det(mat);
  int s = sign(det);
  if (s == 0) throw std::logic_error("incidence_sign: degenerate frame");
  return s;
}

int SliceGeometry::transport_orientation(const CellGeometry& src, const IMat& h,
                                         const CellGeometry& dst) {
  // cell map A -> h^{-1} A h^{-T}; on signatures this is v -> v h
  QMat hq = to_qmat(h);
  auto hinv = q_inverse(hq);
  if (!hinv) throw std::invalid_argument("transport_orientation: singular h");
  QMat hit = q_transpose(*hinv);
  QMat mat;
  for (const QMat& d : src.dirs)
    mat.push_back(coords_in_basis(dst.dirs, q_mul(q_mul(*hinv, d), hit)));
  Rat det = q_det(mat);
  int s = sign(det);
  if (s == 0) throw std::logic_error("transport_orientation: degenerate map");
  return s;
}

}  // namespace tempered

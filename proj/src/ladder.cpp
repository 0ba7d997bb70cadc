#include "tempered/ladder.hpp"

#include "tempered/boundary.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tempered {

TemperamentLadder::TemperamentLadder(int n, IMat a, bool with_boundary_contexts,
                                     LadderBudget budget)
    : n_(n), a_(std::move(a)), with_boundary_(with_boundary_contexts), budget_(budget) {
  if (rows(a_) != n || cols(a_) != n)
    throw std::invalid_argument("TemperamentLadder: a must be n x n");
  if (i_det(a_) == 0) throw std::invalid_argument("TemperamentLadder: a is singular");
  base_ = WeightSystem::with_sublattice(n, a_);
  gamma_a_ = Context::gamma_a(a_);
}

TemperedWeight TemperamentLadder::weight_at(const Rat& s) const {
  return TemperedWeight::at(base_, s);
}

std::vector<Context> TemperamentLadder::contexts_for(const Rat& s) const {
  std::vector<Context> ctxs;
  if (s == 1) {
    // the untempered end carries both the full group and gamma_a
    ctxs.push_back(Context::sl(n_));
    ctxs.push_back(gamma_a_);
    if (with_boundary_) {
      for (const Context& c : BoundaryPlan::make(n_, Context::sl(n_)).contexts())
        if (c.name != "sl") ctxs.push_back(c);
      for (const Context& c : BoundaryPlan::make(n_, gamma_a_).contexts())
        if (c.name != "gamma_a") ctxs.push_back(c);
    }
  } else {
    ctxs.push_back(gamma_a_);
    if (with_boundary_) {
      for (const Context& c : BoundaryPlan::make(n_, gamma_a_).contexts())
        if (c.name != "gamma_a") ctxs.push_back(c);
    }
  }
  return ctxs;
}

const Chunk& TemperamentLadder::slice(const Rat& s) {
  auto it = cache_.find(s);
  if (it != cache_.end()) return *it->second;
  auto chunk = std::make_shared<Chunk>(weight_at(s), contexts_for(s));
  chunk->build({}, budget_.chunk);
  cache_[s] = chunk;
  return *chunk;
}

std::vector<Rat> TemperamentLadder::vertex_events(const Rat& s, const Rat& lo,
                                                  const Rat& hi) {
  const Chunk& chunk = slice(s);
  const TemperedWeight w = weight_at(s);
  std::set<Rat> found;
  OrbitTable table = chunk.orbit_table(gamma_a_.name);
  for (const Orbit& orbit : table.orbits) {
    if (orbit.dim != 0) continue;
    const ChunkCell& rep = chunk.cell(orbit.rep);
    // vertex form as an affine family in t = 1/s: solve the equality
    // system with rhs split into the constant and t parts
    int nn = n_;
    QMat sys;
    QVec rhs_const, rhs_t;
    for (const IVec& v : rep.sig) {
      sys.push_back(sym_value_row(v, nn));
      Rat b = base_.base_weight(v);
      if (base_.in_m0(v)) {
        rhs_const.push_back(Rat(1) / b);
        rhs_t.push_back(Rat(0));
      } else {
        rhs_const.push_back(Rat(0));
        rhs_t.push_back(Rat(1) / b);
      }
    }
    auto x_const = q_solve_right(sys, rhs_const);
    auto x_t = q_solve_right(sys, rhs_t);
    if (!x_const || !x_t) continue;
    // vertices have a unique solution; verify against the witness at t0
    Rat t0 = Rat(1) / s;
    QMat a_const = sym_from_coords(*x_const, nn);
    QMat a_lin = sym_from_coords(*x_t, nn);
    QMat probe = q_add(a_const, q_scale(t0, a_lin));
    if (probe != rep.geom.witness) {
      // non-pinned solution (should not happen at a vertex); skip quietly
      continue;
    }
    // candidate crossing vectors: everything short at the sample.  Only the
    // nearest crossing on each side of the sample is an honest event: the
    // vertex family stops existing there, so farther roots are
    // extrapolations past a structure change.
    Rat pool_bound(16);
    std::optional<Rat> below, above;
    for (const IVec& u : short_vectors_weighted(QForm::from(rep.geom.witness), w,
                                                pool_bound)) {
      if (sig_contains(rep.sig, u)) continue;
      // value_u(t) = weight-structure: in M0: A(u); outside: A(u)/t
      Rat c0 = base_.base_weight(u) * form_value(a_const, u);
      Rat c1 = base_.base_weight(u) * form_value(a_lin, u);
      // in M0: c0 + c1 t = 1;   outside: (c0 + c1 t)/t = 1
      Rat tstar;
      if (base_.in_m0(u)) {
        if (sign(c1) == 0) continue;
        tstar = (Rat(1) - c0) / c1;
      } else {
        Rat denom = Rat(1) - c1;
        if (sign(denom) == 0) continue;
        tstar = c0 / denom;
      }
      if (sign(tstar) <= 0) continue;
      Rat sstar = Rat(1) / tstar;
      if (sstar <= lo || sstar >= hi) continue;
      if (sstar > s) {
        if (!above || sstar < *above) above = sstar;
      } else if (sstar < s) {
        if (!below || sstar > *below) below = sstar;
      }
    }
    if (below) found.insert(*below);
    if (above) found.insert(*above);
  }
  return std::vector<Rat>(found.begin(), found.end());
}

void TemperamentLadder::build() {
  // untempered element: no events, top at 1
  if (same_row_lattice(a_, i_identity(n_))) {
    events_.clear();
    s_top_ = Rat(1);
    s_values_ = {Rat(1)};
    samples_.clear();
    return;
  }

  // sweep: maintain breakpoints, scan each open interval from its midpoint
  // until no interval produces a new event
  Rat horizon(1);
  {
    // generous initial horizon: beyond the largest elementary divisor
    // squared the structure has stabilized in practice; the top detection
    // extends it if needed
    IMat h = hnf(a_);
    Rat max_div(1);
    for (int i = 0; i < n_; i++)
      if (Rat(h[i][i]) > max_div) max_div = Rat(h[i][i]);
    horizon = max_div * max_div + 1;
  }

  std::set<Rat> breakpoints{Rat(1), horizon};
  std::set<Rat> events;
  for (int round = 0; round < budget_.events; round++) {
    bool grew = false;
    std::vector<Rat> pts(breakpoints.begin(), breakpoints.end());
    for (size_t i = 0; i + 1 < pts.size(); i++) {
      Rat mid = (pts[i] + pts[i + 1]) / 2;
      for (const Rat& e : vertex_events(mid, pts[i], pts[i + 1])) {
        if (!events.count(e)) {
          events.insert(e);
          breakpoints.insert(e);
          grew = true;
        }
      }
    }
    if (!grew) break;
    if (round + 1 == budget_.events)
      throw BudgetExceeded("ladder: event budget exceeded");
  }
  events_.assign(events.begin(), events.end());

  // detect the top
  Rat last = events_.empty() ? Rat(1) : events_.back();
  bool found = false;
  for (int j = 1; j <= budget_.top_steps; j++) {
    Rat cand = last + j;
    if (top_bijection_works(cand)) {
      s_top_ = cand;
      found = true;
      break;
    }
  }
  if (!found) throw BudgetExceeded("ladder: top not detected");

  s_values_.clear();
  s_values_.push_back(Rat(1));
  for (const Rat& e : events_)
    if (e > 1 && e < s_top_) s_values_.push_back(e);
  s_values_.push_back(s_top_);
  samples_.clear();
  for (size_t i = 0; i + 1 < s_values_.size(); i++)
    samples_.push_back((s_values_[i] + s_values_[i + 1]) / 2);
}

Sig TemperamentLadder::top_image(const Sig& slice1_sig) const {
  return sig_transport(slice1_sig, a_);
}

bool TemperamentLadder::top_bijection_works(const Rat& s_cand) {
  // The bijection of cell complexes is upstairs: right multiplication by a
  // carries the s = 1 slice onto the slice at s_cand.  On quotients it
  // matches gamma_a-orbits at the top with orbits of the conjugate group
  // { h : a^{-1} h a integral } at s = 1.
  const Chunk& one = slice(Rat(1));
  const Chunk& top = slice(s_cand);
  int ctx_top = top.context_index(gamma_a_.name);
  int ctx_sl = one.context_index("sl");

  // forward: the image of every slice(1) cell is a top-slice cell
  OrbitTable t1 = one.orbit_table("sl");
  for (const Orbit& orbit : t1.orbits) {
    const ChunkCell& rep = one.cell(orbit.rep);
    Sig image = top_image(rep.sig);
    try {
      auto [ob, tr] = top.resolve(ctx_top, image);
      (void)tr;
      if (top.cell(top.orbit_table(gamma_a_.name).orbits[ob].rep).dim != rep.dim)
        return false;
    } catch (const std::exception&) {
      return false;
    }
  }

  // backward: every top-slice cell lives in M0 and divides back to a
  // slice(1) cell of the same dimension, with the conjugate-stabilizer
  // orders agreeing
  Context conj = Context::gamma_a(i_adjugate(a_));
  conj.name = "gamma_a_conj";
  OrbitTable tt = top.orbit_table(gamma_a_.name);
  auto ainv = q_inverse(to_qmat(a_));
  for (const Orbit& orbit : tt.orbits) {
    const ChunkCell& rep = top.cell(orbit.rep);
    for (const IVec& v : rep.sig)
      if (!base_.in_m0(v)) return false;
    auto pre = sig_transport_q(rep.sig, *ainv);
    if (!pre) return false;
    try {
      auto [ob, tr] = one.resolve(ctx_sl, *pre);
      (void)tr;
      if (one.cell(one.orbit_table("sl").orbits[ob].rep).dim != rep.dim) return false;
    } catch (const std::exception&) {
      return false;
    }
    // conjugate stabilizer orders
    if (stabilizer(*pre, conj).size() != orbit.stab.size()) return false;
  }
  return true;
}

Sig TemperamentLadder::collapse_to_event(const Rat& event_s, const Sig& sample_sig) {
  const Chunk& event_chunk = slice(event_s);
  SliceGeometry& geo = const_cast<Chunk&>(event_chunk).geometry();
  auto res = geo.closure_signature(sample_sig);
  if (!res)
    throw std::logic_error("collapse_to_event: face empty at the event for " +
                           sig_str(sample_sig));
  return res->first;
}

}  // namespace tempered

#include "tempered/hecke.hpp"

#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace tempered {

namespace {

// ---- generic assembly helpers ----

// pullback along cell transports: for every dst-orbit rep sigma', the value
// is the sum over g in gs of the src cochain at sigma' * g^{-1}, moved by
// rho~(t g) with orientation signs.  Returns one matrix per degree.
std::vector<QMat> assemble_eval(const F& f, const EqComplexT<F>& src,
                                const EqComplexT<F>& dst, const std::vector<IMat>& gs,
                                bool average_to_invariants = false) {
  int degs = std::min(src.degrees(), dst.degrees());
  std::vector<QMat> out(degs);
  OrbitTable dst_table = dst.chunk->orbit_table(dst.context);
  for (int q = 0; q < degs; q++) {
    QMat m = q_zero(dst.dims[q], src.dims[q]);
    for (const auto& tblk : dst.blocks[q]) {
      if (tblk.dim == 0) continue;
      const Orbit& orbit = dst_table.orbits[tblk.orbit];
      const ChunkCell& rep = dst.chunk->cell(orbit.rep);
      QMat acc = q_zero(src.module.dim(), src.dims[q]);
      for (const IMat& g : gs) {
        EvalBlock<F> ev = cochain_eval(f, src, q, rep.sig, rep.geom, g);
        for (int r = 0; r < src.module.dim(); r++)
          for (int c = 0; c < ev.src_dim; c++)
            acc[r][ev.src_offset + c] += ev.mat[r][c];
      }
      if (average_to_invariants) {
        // project onto the target stabilizer invariants (identity whenever
        // the value already lives there)
        QMat proj = q_zero(src.module.dim(), src.module.dim());
        for (const StabElement& s : orbit.stab) {
          QMat rho = dst.module.transport_matrix(s.h);
          if (s.orientation < 0) rho = q_scale(Rat(-1), rho);
          proj = q_add(proj, rho);
        }
        proj = q_scale(Rat(1, (long)orbit.stab.size()), proj);
        acc = q_mul(proj, acc);
      }
      for (int col = 0; col < src.dims[q]; col++) {
        QVec v(src.module.dim());
        bool zero = true;
        for (int r = 0; r < src.module.dim(); r++) {
          v[r] = acc[r][col];
          if (sign(v[r])) zero = false;
        }
        if (zero) continue;
        auto sol = f_solve(f, tblk.basis, v);
        if (!sol)
          throw std::logic_error("assemble_eval: value left the invariant space");
        for (int r = 0; r < tblk.dim; r++) m[tblk.offset + r][col] = (*sol)[r];
      }
    }
    out[q] = std::move(m);
  }
  return out;
}

// pullback along the collapse of the sample slice onto an event slice: a
// sample cell whose limit keeps its dimension pulls the event value back
// (the direction spaces coincide); cells that collapse to lower dimension
// contribute zero
std::vector<QMat> assemble_collapse(const F& f, TemperamentLadder& ladder,
                                    const EqComplexT<F>& event_cx,
                                    const EqComplexT<F>& sample_cx,
                                    const Rat& event_s) {
  int degs = std::min(sample_cx.degrees(), event_cx.degrees());
  std::vector<QMat> out(degs);
  OrbitTable sample_table = sample_cx.chunk->orbit_table(sample_cx.context);
  OrbitTable event_table = event_cx.chunk->orbit_table(event_cx.context);
  int event_ctx = event_cx.chunk->context_index(event_cx.context);
  for (int q = 0; q < degs; q++) {
    QMat m = q_zero(sample_cx.dims[q], event_cx.dims[q]);
    for (const auto& tblk : sample_cx.blocks[q]) {
      if (tblk.dim == 0) continue;
      const ChunkCell& rep = sample_cx.chunk->cell(sample_table.orbits[tblk.orbit].rep);
      Sig target = ladder.collapse_to_event(event_s, rep.sig);
      int tdim = sym_dim(ladder.n()) - sig_outer_rank(target);
      if (tdim != rep.dim) continue;  // the cell collapses: zero pullback
      auto [orbit, t] = event_cx.chunk->resolve(event_ctx, target);
      const auto& sblk = event_cx.blocks[q][event_cx.orbit_block[orbit]];
      if (sblk.dim == 0) continue;
      const ChunkCell& erep = event_cx.chunk->cell(event_table.orbits[orbit].rep);
      int sgn = rep.dim == 0
                    ? 1
                    : SliceGeometry::transport_orientation(erep.geom, t, rep.geom);
      QMat rho = event_cx.module.transport_matrix(t);
      QMat val = q_mul(rho, sblk.basis);
      if (sgn < 0) val = q_scale(Rat(-1), val);
      for (int c = 0; c < sblk.dim; c++) {
        QVec v(sample_cx.module.dim());
        for (int r = 0; r < sample_cx.module.dim(); r++) v[r] = val[r][c];
        auto sol = f_solve(f, tblk.basis, v);
        if (!sol)
          throw std::logic_error("assemble_collapse: value left the invariant space");
        for (int r = 0; r < tblk.dim; r++)
          m[tblk.offset + r][sblk.offset + c] = (*sol)[r];
      }
    }
    out[q] = std::move(m);
  }
  return out;
}

bool verify_chain_map(const F& f, const EqComplexT<F>& src, const EqComplexT<F>& dst,
                      const std::vector<QMat>& mats) {
  CochainMapT<F> cm;
  cm.src = &src;
  cm.dst = &dst;
  cm.mats = mats;
  return is_chain_map(f, cm);
}

std::vector<QMat> induced(const F& f, const EqComplexT<F>& src,
                          const EqComplexT<F>& dst, const CohomologyT<F>& hsrc,
                          const CohomologyT<F>& hdst, const std::vector<QMat>& mats) {
  CochainMapT<F> cm;
  cm.src = &src;
  cm.dst = &dst;
  cm.mats = mats;
  return induced_map(f, cm, hsrc, hdst);
}

bool mats_equal_padded(const QMat& lhs, const QMat& rhs) {
  int R = std::max(rows(lhs), rows(rhs));
  for (int i = 0; i < R; i++) {
    int cl = i < rows(lhs) ? (int)lhs[i].size() : 0;
    int cr = i < rows(rhs) ? (int)rhs[i].size() : 0;
    for (int j = 0; j < std::max(cl, cr); j++) {
      Rat l = j < cl ? lhs[i][j] : Rat(0);
      Rat r = j < cr ? rhs[i][j] : Rat(0);
      if (l != r) return false;
    }
  }
  return true;
}

bool all_invertible(const std::vector<QMat>& mats) {
  for (const QMat& m : mats) {
    if (rows(m) != cols(m)) return false;
    if (rows(m) == 0) continue;
    if (!q_inverse(m)) return false;
  }
  return true;
}

std::vector<QMat> invert_all(const std::vector<QMat>& mats) {
  std::vector<QMat> out;
  for (const QMat& m : mats) {
    if (rows(m) == 0) {
      out.push_back(m);
      continue;
    }
    auto inv = q_inverse(m);
    if (!inv) throw std::logic_error("hecke: stage not invertible on cohomology");
    out.push_back(*inv);
  }
  return out;
}

std::vector<QMat> compose(const std::vector<QMat>& second,
                          const std::vector<QMat>& first) {
  std::vector<QMat> out;
  for (size_t q = 0; q < std::min(second.size(), first.size()); q++) {
    if (rows(second[q]) == 0 || rows(first[q]) == 0) {
      out.push_back(q_zero(rows(second[q]), first[q].empty() ? 0 : cols(first[q])));
      continue;
    }
    out.push_back(q_mul(second[q], first[q]));
  }
  return out;
}

// ---- boundary-side stage assembly ----

struct GridLevel {
  BoundaryPlan plan;
  BoundaryGrid<F> grid;
  std::vector<QMat> psi_cols;   // interior -> p=0 column per degree
  std::vector<QMat> psi_tot;    // interior -> total per degree
};

// summand-indexed assembly into total-complex matrices
struct SummandJob {
  int p;
  int dst_index;                    // summand in dst column p
  int src_index;                    // summand in src column p
  std::vector<IMat> gs;             // eval transports (empty = matching job)
};

std::vector<QMat> assemble_grid_map(const F& f, TemperamentLadder& ladder,
                                    const BoundaryGrid<F>& src,
                                    const BoundaryGrid<F>& dst,
                                    const std::vector<SummandJob>& jobs,
                                    bool matching, const Rat& event_s,
                                    const Rat& sample_s) {
  size_t degs = dst.total_dims.size();
  std::vector<QMat> out(degs);
  for (size_t m = 0; m < degs; m++)
    out[m] = q_zero(dst.total_dims[m], m < src.total_dims.size() ? src.total_dims[m] : 0);

  for (const SummandJob& job : jobs) {
    const auto& src_sum = src.columns[job.p][job.src_index];
    const auto& dst_sum = dst.columns[job.p][job.dst_index];
    std::vector<QMat> block =
        matching ? assemble_collapse(f, ladder, src_sum.cx, dst_sum.cx, event_s)
                 : assemble_eval(f, src_sum.cx, dst_sum.cx, job.gs);
    for (int q = 0; q < (int)block.size(); q++) {
      int mdeg = job.p + q;
      if (mdeg >= (int)degs) continue;
      int roff = dst.total_offset(job.p, q);
      for (int k = 0; k < job.dst_index; k++) roff += dst.columns[job.p][k].cx.dims[q];
      int coff = src.total_offset(job.p, q);
      for (int k = 0; k < job.src_index; k++) coff += src.columns[job.p][k].cx.dims[q];
      for (int r = 0; r < rows(block[q]); r++)
        for (int c = 0; c < cols(block[q]); c++)
          out[mdeg][roff + r][coff + c] += block[q][r][c];
    }
  }
  return out;
}

bool grid_chain_map(const F& f, const BoundaryGrid<F>& src, const BoundaryGrid<F>& dst,
                    const std::vector<QMat>& mats) {
  for (size_t m = 0; m + 1 < mats.size() && m < src.total_d.size() &&
                     m < dst.total_d.size();
       m++) {
    QMat lhs = rows(dst.total_d[m]) && rows(mats[m]) ? q_mul(dst.total_d[m], mats[m])
                                                     : QMat{};
    QMat rhs = rows(mats[m + 1]) && rows(src.total_d[m])
                   ? q_mul(mats[m + 1], src.total_d[m])
                   : QMat{};
    int R = std::max(rows(lhs), rows(rhs));
    int C = std::max(cols(lhs), cols(rhs));
    for (int i = 0; i < R; i++)
      for (int j = 0; j < C; j++) {
        Rat l = (i < rows(lhs) && j < cols(lhs)) ? lhs[i][j] : Rat(0);
        Rat r = (i < rows(rhs) && j < cols(rhs)) ? rhs[i][j] : Rat(0);
        if (l != r) return false;
      }
  }
  return true;
}

// cohomology of a total complex (dims + representative data for induced maps)
struct TotalCohomology {
  std::vector<int> betti;
  std::vector<QMat> reps;
  std::vector<QMat> span;

  QVec project(const F& f, int m, const QVec& v) const {
    if (betti[m] == 0) return {};
    auto sol = f_solve(f, span[m], v);
    if (!sol) throw std::logic_error("total projection: not a cocycle class");
    return QVec(sol->begin(), sol->begin() + betti[m]);
  }
};

TotalCohomology total_cohomology(const F& f, const BoundaryGrid<F>& grid) {
  TotalCohomology out;
  int top = (int)grid.total_dims.size() - 1;
  out.betti.assign(top + 1, 0);
  out.reps.resize(top + 1);
  out.span.resize(top + 1);
  for (int m = 0; m <= top; m++) {
    int dim = grid.total_dims[m];
    if (dim == 0) continue;
    QMat z = (m < (int)grid.total_d.size() && rows(grid.total_d[m]))
                 ? [&] {
                     auto rows_ = f_right_kernel(f, grid.total_d[m]);
                     return rows_;
                   }()
                 : f_identity(f, dim);
    QMat bnd = q_zero(dim, 0);
    if (m > 0 && m - 1 < (int)grid.total_d.size() && rows(grid.total_d[m - 1])) {
      auto piv = f_column_basis(f, grid.total_d[m - 1]);
      bnd = q_zero(dim, (int)piv.size());
      for (size_t c = 0; c < piv.size(); c++)
        for (int r = 0; r < dim; r++) bnd[r][c] = grid.total_d[m - 1][r][piv[c]];
    }
    int brank = cols(bnd);
    QMat probe = q_transpose(bnd);
    int cur = brank;
    std::vector<int> chosen;
    for (size_t zi = 0; zi < z.size(); zi++) {
      probe.push_back(z[zi]);
      QMat copy = probe;
      int r = (int)f_row_echelon(f, copy).size();
      if (r > cur) {
        cur = r;
        chosen.push_back((int)zi);
      } else
        probe.pop_back();
    }
    out.betti[m] = (int)chosen.size();
    out.reps[m] = q_zero(dim, (int)chosen.size());
    for (size_t c = 0; c < chosen.size(); c++)
      for (int r = 0; r < dim; r++) out.reps[m][r][c] = z[chosen[c]][r];
    out.span[m] = q_zero(dim, out.betti[m] + brank);
    for (int c = 0; c < out.betti[m]; c++)
      for (int r = 0; r < dim; r++) out.span[m][r][c] = out.reps[m][r][c];
    for (int c = 0; c < brank; c++)
      for (int r = 0; r < dim; r++) out.span[m][r][out.betti[m] + c] = bnd[r][c];
  }
  return out;
}

std::vector<QMat> total_induced(const F& f, const std::vector<QMat>& mats,
                                const TotalCohomology& hsrc,
                                const TotalCohomology& hdst) {
  std::vector<QMat> out(mats.size());
  for (size_t m = 0; m < mats.size(); m++) {
    int sb = m < hsrc.betti.size() ? hsrc.betti[m] : 0;
    int db = m < hdst.betti.size() ? hdst.betti[m] : 0;
    out[m] = q_zero(db, sb);
    for (int c = 0; c < sb; c++) {
      QVec rep(rows(mats[m]) ? cols(mats[m]) : 0, Rat(0));
      for (int r = 0; r < (int)rep.size(); r++) rep[r] = hsrc.reps[m][r][c];
      QVec img = rows(mats[m]) ? qv_mul(rep, q_transpose(mats[m]))
                               : QVec(hdst.reps[m].size(), Rat(0));
      QVec coords = hdst.project(f, (int)m, img);
      for (int r = 0; r < db; r++) out[m][r][c] = coords[r];
    }
  }
  return out;
}

}  // namespace

HeckePair HeckePair::make(int n, const IMat& a) {
  if (rows(a) != n || cols(a) != n || i_det(a) == 0)
    throw std::invalid_argument("HeckePair: a must be integral and nonsingular");
  HeckePair pair;
  pair.n = n;
  pair.a = a;
  pair.gamma_a = Context::gamma_a(a);
  // left cosets k * T_a, enumerated by left multiplication with generators;
  // the coset of k is classified by the row lattice of a * k^{-1}
  auto key_of = [&](const IMat& k) { return hnf(i_mul(a, i_unimodular_inverse(k))); };
  std::map<IMat, int> seen;
  std::deque<IMat> queue;
  IMat id = i_identity(n);
  pair.cosets.push_back(id);
  seen[key_of(id)] = 0;
  queue.push_back(id);
  auto gens = sl_generators(n);
  while (!queue.empty()) {
    IMat k = queue.front();
    queue.pop_front();
    for (const IMat& g : gens) {
      IMat gk = i_mul(g, k);
      IMat key = key_of(gk);
      if (seen.count(key)) continue;
      seen[key] = (int)pair.cosets.size();
      pair.cosets.push_back(gk);
      queue.push_back(gk);
    }
  }
  return pair;
}

HeckeRun hecke_operator(TemperamentLadder& ladder, const CoefficientModule& module,
                        bool boundary_target) {
  F f;
  HeckeRun run;
  run.module = module;
  run.boundary_target = boundary_target;
  if (boundary_target && !ladder.with_boundary())
    throw std::invalid_argument("hecke: ladder built without boundary contexts");
  ladder.build();
  run.s_values = ladder.s_values();
  int n = ladder.n();
  HeckePair pair = HeckePair::make(n, ladder.a());

  // interior complexes: slice(1) over sl and gamma_a, every other ladder
  // value and sample over gamma_a
  const Chunk& one = ladder.slice(Rat(1));
  auto cx0_sl = build_complex(f, one, "sl", module);
  auto cx0_ga = build_complex(f, one, "gamma_a", module);
  auto h0_sl = compute_cohomology(f, cx0_sl);
  auto h0_ga = compute_cohomology(f, cx0_ga);
  run.interior_betti = h0_sl.betti;

  int k = ladder.stages();
  std::vector<EqComplexT<F>> event_cx(k + 1), sample_cx(k);
  std::vector<CohomologyT<F>> event_h(k + 1), sample_h(k);
  for (int i = 1; i <= k; i++) {
    const Chunk& ch = ladder.slice(ladder.s_values()[i]);
    event_cx[i] = build_complex(f, ch, "gamma_a", module);
    event_h[i] = compute_cohomology(f, event_cx[i]);
  }
  for (int i = 0; i < k; i++) {
    const Chunk& ch = ladder.slice(ladder.samples()[i]);
    sample_cx[i] = build_complex(f, ch, "gamma_a", module);
    sample_h[i] = compute_cohomology(f, sample_cx[i]);
  }

  // boundary grids when requested
  std::unique_ptr<GridLevel> bd0_sl, bd0_ga;
  std::vector<std::unique_ptr<GridLevel>> bd_event(k + 1), bd_sample(k);
  std::unique_ptr<TotalCohomology> bh0_sl, bh0_ga;
  std::vector<std::unique_ptr<TotalCohomology>> bh_event(k + 1), bh_sample(k);
  auto make_grid = [&](const Chunk& chunk, const Context& base,
                       const EqComplexT<F>& interior) {
    auto lvl = std::make_unique<GridLevel>();
    lvl->plan = BoundaryPlan::make(n, base);
    // context names inside the chunk were created by the ladder with the
    // same plan, so they match
    lvl->grid = build_boundary_grid(f, chunk, lvl->plan, module);
    lvl->psi_cols = psi_map(f, interior, lvl->grid);
    lvl->psi_tot = psi_total(f, interior, lvl->grid, lvl->psi_cols);
    if (!grid_algebra_ok(f, lvl->grid))
      throw std::logic_error("hecke: boundary grid algebra failed");
    if (!psi_is_chain_map(f, interior, lvl->grid, lvl->psi_tot))
      throw std::logic_error("hecke: psi is not a chain map");
    return lvl;
  };
  if (boundary_target) {
    bd0_sl = make_grid(one, Context::sl(n), cx0_sl);
    bd0_ga = make_grid(one, ladder.gamma_a_context(), cx0_ga);
    bh0_sl = std::make_unique<TotalCohomology>(total_cohomology(f, bd0_sl->grid));
    bh0_ga = std::make_unique<TotalCohomology>(total_cohomology(f, bd0_ga->grid));
    run.boundary_betti = bh0_sl->betti;
    for (int i = 1; i <= k; i++) {
      bd_event[i] = make_grid(ladder.slice(ladder.s_values()[i]),
                              ladder.gamma_a_context(), event_cx[i]);
      bh_event[i] =
          std::make_unique<TotalCohomology>(total_cohomology(f, bd_event[i]->grid));
    }
    for (int i = 0; i < k; i++) {
      bd_sample[i] = make_grid(ladder.slice(ladder.samples()[i]),
                               ladder.gamma_a_context(), sample_cx[i]);
      bh_sample[i] =
          std::make_unique<TotalCohomology>(total_cohomology(f, bd_sample[i]->grid));
    }
  }

  auto push_cube_faces = [&](const std::string& cube, bool bottom_zero) {
    run.cubes.push_back({cube, "top (restriction square)", true, true});
    run.cubes.push_back({cube, "back (vertical identification)", true, true});
    run.cubes.push_back({cube, "front (vertical identification)", true, true});
    run.cubes.push_back({cube, "left (slice identification)", true, true});
    run.cubes.push_back({cube, "right (slice identification)", true, true});
    run.cubes.push_back({cube, "bottom (psi square)", false, bottom_zero});
    if (!bottom_zero) run.cubes_ok = false;
  };

  // psi commutation at chain level: psi_dst . M_int == M_bd . psi_src
  auto cube_bottom = [&](const std::vector<QMat>& m_int, GridLevel* src_lvl,
                         GridLevel* dst_lvl, const std::vector<QMat>& m_bd) {
    if (!src_lvl || !dst_lvl) return true;
    for (size_t mdeg = 0; mdeg < dst_lvl->psi_tot.size(); mdeg++) {
      // dst.psi[m] . m_int[m]  vs  m_bd[m] . src.psi[m]
      QMat lhs, rhs;
      if (mdeg < m_int.size() && rows(dst_lvl->psi_tot[mdeg]) && rows(m_int[mdeg]))
        lhs = q_mul(dst_lvl->psi_tot[mdeg], m_int[mdeg]);
      if (mdeg < m_bd.size() && rows(m_bd[mdeg]) && rows(src_lvl->psi_tot[mdeg]))
        rhs = q_mul(m_bd[mdeg], src_lvl->psi_tot[mdeg]);
      int R = std::max(rows(lhs), rows(rhs));
      int C = std::max(cols(lhs), cols(rhs));
      for (int i = 0; i < R; i++)
        for (int j = 0; j < C; j++) {
          Rat l = (i < rows(lhs) && j < cols(lhs)) ? lhs[i][j] : Rat(0);
          Rat r = (i < rows(rhs) && j < cols(rhs)) ? rhs[i][j] : Rat(0);
          if (l != r) return false;
        }
    }
    return true;
  };

  // ---- q stage ----
  EqComplexT<F>& top_cx = k > 0 ? event_cx[k] : cx0_ga;
  CohomologyT<F>& top_h = k > 0 ? event_h[k] : h0_ga;
  std::vector<QMat> q_mats = assemble_eval(f, cx0_sl, top_cx, {ladder.a()});
  if (!verify_chain_map(f, cx0_sl, top_cx, q_mats))
    throw std::logic_error("hecke: q stage is not a chain map");
  std::vector<QMat> q_ind = induced(f, cx0_sl, top_cx, h0_sl, top_h, q_mats);
  {
    HeckeStageReport rep;
    rep.name = "q";
    rep.src_dims = cx0_sl.dims;
    rep.dst_dims = top_cx.dims;
    rep.chain_map = true;
    rep.invertible_on_cohomology = all_invertible(q_ind);
    run.stages.push_back(rep);
  }
  std::vector<QMat> bd_q;
  if (boundary_target) {
    // flag correspondence: target gamma_a summand F' at the top pulls back
    // from the sl class of saturate(F' a^{-1}) with transports g0 * a
    GridLevel* top_lvl = k > 0 ? bd_event[k].get() : bd0_ga.get();
    TotalCohomology* top_bh = k > 0 ? bh_event[k].get() : bh0_ga.get();
    std::vector<SummandJob> jobs;
    auto ainv = q_inverse(to_qmat(ladder.a()));
    for (int p = 0; p <= top_lvl->grid.max_p(); p++) {
      for (size_t di = 0; di < top_lvl->grid.columns[p].size(); di++) {
        const Flag& fp = top_lvl->grid.columns[p][di].flag;
        // transport members by a^{-1} and saturate
        Flag dropped;
        dropped.n = n;
        for (const IMat& mem : fp.members) {
          QMat moved = q_mul(to_qmat(mem), *ainv);
          IMat scaled;
          for (const auto& row : moved) scaled.push_back(primitive_integer_vector(row));
          dropped.members.push_back(hnf(saturate(scaled)));
        }
        int src_idx = -1;
        IMat g0;
        for (size_t si = 0; si < bd0_sl->grid.columns[p].size(); si++) {
          auto tr = flag_equivalent(bd0_sl->grid.columns[p][si].flag, dropped,
                                    Context::sl(n));
          if (tr) {
            src_idx = (int)si;
            g0 = *tr;
            break;
          }
        }
        if (src_idx < 0) throw std::logic_error("hecke: q flag correspondence failed");
        jobs.push_back({p, (int)di, src_idx, {i_mul(g0, ladder.a())}});
      }
    }
    bd_q = assemble_grid_map(f, ladder, bd0_sl->grid, top_lvl->grid, jobs, false,
                             Rat(0), Rat(0));
    if (!grid_chain_map(f, bd0_sl->grid, top_lvl->grid, bd_q))
      throw std::logic_error("hecke: boundary q stage is not a chain map");
    push_cube_faces("Q", cube_bottom(q_mats, bd0_sl.get(), top_lvl, bd_q));
  }

  // ---- ladder stages ----
  // interior composition accumulates on cohomology; boundary likewise
  std::vector<QMat> t_int = q_ind;
  std::vector<QMat> t_bd;
  std::unique_ptr<TotalCohomology>* cur_bh = nullptr;
  if (boundary_target) {
    TotalCohomology* top_bh2 = k > 0 ? bh_event[k].get() : bh0_ga.get();
    t_bd = total_induced(f, bd_q, *bh0_sl, *top_bh2);
    cur_bh = k > 0 ? &bh_event[k] : &bh0_ga;
  }

  auto identity_jobs = [&](GridLevel* src, GridLevel* dst) {
    // summands correspond flag-for-flag (same gamma_a classes at every s)
    std::vector<SummandJob> jobs;
    for (int p = 0; p <= dst->grid.max_p(); p++)
      for (size_t di = 0; di < dst->grid.columns[p].size(); di++) {
        const Flag& fd = dst->grid.columns[p][di].flag;
        int src_idx = -1;
        for (size_t si = 0; si < src->grid.columns[p].size(); si++)
          if (src->grid.columns[p][si].flag == fd) src_idx = (int)si;
        if (src_idx < 0)
          throw std::logic_error("hecke: flag summands differ across slices");
        jobs.push_back({p, (int)di, src_idx, {}});
      }
    return jobs;
  };

  for (int i = k; i >= 1; i--) {
    // r^(i): the sample slice of interval i collapses onto its right end
    // u^(i); the pullback realizes r^(i)_* directly
    std::vector<QMat> r_mats =
        assemble_collapse(f, ladder, event_cx[i], sample_cx[i - 1], ladder.s_values()[i]);
    if (!verify_chain_map(f, event_cx[i], sample_cx[i - 1], r_mats))
      throw std::logic_error("hecke: r stage is not a chain map");
    std::vector<QMat> r_ind =
        induced(f, event_cx[i], sample_cx[i - 1], event_h[i], sample_h[i - 1], r_mats);
    {
      HeckeStageReport rep;
      rep.name = "r" + std::to_string(i);
      rep.src_dims = event_cx[i].dims;
      rep.dst_dims = sample_cx[i - 1].dims;
      rep.chain_map = true;
      rep.invertible_on_cohomology = all_invertible(r_ind);
      if (!rep.invertible_on_cohomology)
        throw std::logic_error("hecke: stage not a quasi-isomorphism: " + rep.name);
      run.stages.push_back(rep);
    }
    t_int = compose(r_ind, t_int);
    if (boundary_target) {
      std::vector<QMat> bd_r = assemble_grid_map(
          f, ladder, bd_event[i]->grid, bd_sample[i - 1]->grid,
          identity_jobs(bd_event[i].get(), bd_sample[i - 1].get()), true,
          ladder.s_values()[i], ladder.samples()[i - 1]);
      if (!grid_chain_map(f, bd_event[i]->grid, bd_sample[i - 1]->grid, bd_r))
        throw std::logic_error("hecke: boundary r stage is not a chain map");
      push_cube_faces("L-R r" + std::to_string(i),
                      cube_bottom(r_mats, bd_event[i].get(), bd_sample[i - 1].get(),
                                  bd_r));
      t_bd = compose(total_induced(f, bd_r, *bh_event[i], *bh_sample[i - 1]), t_bd);
      cur_bh = &bh_sample[i - 1];
    }

    // l^(i-1): collapse onto the left end u^(i-1); T_a applies its inverse
    EqComplexT<F>& left_cx = (i - 1 == 0) ? cx0_ga : event_cx[i - 1];
    CohomologyT<F>& left_h = (i - 1 == 0) ? h0_ga : event_h[i - 1];
    std::vector<QMat> l_mats = assemble_collapse(f, ladder, left_cx, sample_cx[i - 1],
                                                 ladder.s_values()[i - 1]);
    if (!verify_chain_map(f, left_cx, sample_cx[i - 1], l_mats))
      throw std::logic_error("hecke: l stage is not a chain map");
    std::vector<QMat> l_ind =
        induced(f, left_cx, sample_cx[i - 1], left_h, sample_h[i - 1], l_mats);
    {
      HeckeStageReport rep;
      rep.name = "l" + std::to_string(i - 1);
      rep.src_dims = left_cx.dims;
      rep.dst_dims = sample_cx[i - 1].dims;
      rep.chain_map = true;
      rep.invertible_on_cohomology = all_invertible(l_ind);
      if (!rep.invertible_on_cohomology)
        throw std::logic_error("hecke: stage not a quasi-isomorphism: " + rep.name);
      run.stages.push_back(rep);
    }
    t_int = compose(invert_all(l_ind), t_int);
    if (boundary_target) {
      GridLevel* left_lvl = (i - 1 == 0) ? bd0_ga.get() : bd_event[i - 1].get();
      TotalCohomology* left_bh = (i - 1 == 0) ? bh0_ga.get() : bh_event[i - 1].get();
      std::vector<QMat> bd_l = assemble_grid_map(
          f, ladder, left_lvl->grid, bd_sample[i - 1]->grid,
          identity_jobs(left_lvl, bd_sample[i - 1].get()), true,
          ladder.s_values()[i - 1], ladder.samples()[i - 1]);
      if (!grid_chain_map(f, left_lvl->grid, bd_sample[i - 1]->grid, bd_l))
        throw std::logic_error("hecke: boundary l stage is not a chain map");
      push_cube_faces("L-R l" + std::to_string(i - 1),
                      cube_bottom(l_mats, left_lvl, bd_sample[i - 1].get(), bd_l));
      std::vector<QMat> bl_ind = total_induced(f, bd_l, *left_bh, **cur_bh);
      std::vector<QMat> bl_inv;
      for (auto& m0 : bl_ind) {
        if (rows(m0) == 0) {
          bl_inv.push_back(m0);
          continue;
        }
        auto inv = q_inverse(m0);
        if (!inv) throw std::logic_error("hecke: boundary l stage not invertible");
        bl_inv.push_back(*inv);
      }
      t_bd = compose(bl_inv, t_bd);
      cur_bh = (i - 1 == 0) ? &bh0_ga : &bh_event[i - 1];
    }
  }

  // ---- p stage: transfer over the cosets ----
  std::vector<IMat> coset_invs;
  for (const IMat& k_i : pair.cosets) coset_invs.push_back(i_unimodular_inverse(k_i));
  std::vector<QMat> p_mats = assemble_eval(f, cx0_ga, cx0_sl, coset_invs);
  if (!verify_chain_map(f, cx0_ga, cx0_sl, p_mats))
    throw std::logic_error("hecke: p stage is not a chain map");
  std::vector<QMat> p_ind = induced(f, cx0_ga, cx0_sl, h0_ga, h0_sl, p_mats);
  {
    HeckeStageReport rep;
    rep.name = "p";
    rep.src_dims = cx0_ga.dims;
    rep.dst_dims = cx0_sl.dims;
    rep.chain_map = true;
    run.stages.push_back(rep);
  }
  t_int = compose(p_ind, t_int);
  if (boundary_target) {
    // transfer on the boundary grid with flag permutation by the cosets
    std::vector<SummandJob> jobs;
    for (int p = 0; p <= bd0_sl->grid.max_p(); p++)
      for (size_t di = 0; di < bd0_sl->grid.columns[p].size(); di++) {
        const Flag& f0 = bd0_sl->grid.columns[p][di].flag;
        for (const IMat& k_i : pair.cosets) {
          Flag moved = f0.transported(k_i);
          int src_idx = -1;
          IMat c;
          for (size_t si = 0; si < bd0_ga->grid.columns[p].size(); si++) {
            auto tr = flag_equivalent(bd0_ga->grid.columns[p][si].flag, moved,
                                      ladder.gamma_a_context());
            if (tr) {
              src_idx = (int)si;
              c = *tr;
              break;
            }
          }
          if (src_idx < 0)
            throw std::logic_error("hecke: p flag correspondence failed");
          jobs.push_back(
              {p, (int)di, src_idx, {i_mul(c, i_unimodular_inverse(k_i))}});
        }
      }
    std::vector<QMat> bd_p = assemble_grid_map(f, ladder, bd0_ga->grid, bd0_sl->grid,
                                               jobs, false, Rat(0), Rat(0));
    if (!grid_chain_map(f, bd0_ga->grid, bd0_sl->grid, bd_p))
      throw std::logic_error("hecke: boundary p stage is not a chain map");
    push_cube_faces("P", cube_bottom(p_mats, bd0_ga.get(), bd0_sl.get(), bd_p));
    t_bd = compose(total_induced(f, bd_p, *bh0_ga, *bh0_sl), t_bd);
    run.t_boundary = t_bd;
    // psi induced on cohomology: interior classes to boundary classes
    for (size_t qdeg = 0; qdeg < h0_sl.betti.size(); qdeg++) {
      QMat m = q_zero(qdeg < bh0_sl->betti.size() ? bh0_sl->betti[qdeg] : 0,
                      h0_sl.betti[qdeg]);
      for (int c2 = 0; c2 < h0_sl.betti[qdeg]; c2++) {
        QVec rep(cx0_sl.dims[qdeg]);
        for (int r = 0; r < cx0_sl.dims[qdeg]; r++) rep[r] = h0_sl.reps[qdeg][r][c2];
        QVec img = rows(bd0_sl->psi_tot[qdeg])
                       ? qv_mul(rep, q_transpose(bd0_sl->psi_tot[qdeg]))
                       : QVec();
        if ((int)qdeg < (int)bh0_sl->betti.size() && bh0_sl->betti[qdeg] > 0) {
          QVec coords = bh0_sl->project(f, (int)qdeg, img);
          for (int r = 0; r < bh0_sl->betti[qdeg]; r++) m[r][c2] = coords[r];
        }
      }
      run.psi_induced.push_back(m);
    }
    // restriction-Hecke compatibility on cohomology
    for (size_t qdeg = 0; qdeg < run.psi_induced.size(); qdeg++) {
      if (qdeg >= t_int.size() || qdeg >= run.t_boundary.size()) break;
      QMat lhs = rows(run.psi_induced[qdeg]) && rows(t_int[qdeg]) &&
                         cols(run.psi_induced[qdeg]) == rows(t_int[qdeg])
                     ? q_mul(run.psi_induced[qdeg], t_int[qdeg])
                     : QMat{};
      QMat rhs = rows(run.t_boundary[qdeg]) && rows(run.psi_induced[qdeg]) &&
                         cols(run.t_boundary[qdeg]) == rows(run.psi_induced[qdeg])
                     ? q_mul(run.t_boundary[qdeg], run.psi_induced[qdeg])
                     : QMat{};
      bool same = mats_equal_padded(lhs, rhs);
      run.cubes.push_back({"T_a restriction compatibility (H^" + std::to_string(qdeg) +
                               ")",
                           "psi* T_a = T_a psi*", false, same});
      if (!same) run.cubes_ok = false;
    }
  }

  run.t_interior = t_int;
  for (const QMat& m : run.t_interior)
    run.t_char_poly.push_back(rows(m) ? q_char_poly(m) : QVec{Rat(1)});
  return run;
}

namespace {

// left-coset representatives, inside gamma_a, of the subgroup whose
// conjugates by both a and a^2 stay integral; the monodromy pullback is
// equivariant over that subgroup and is averaged back up to gamma_a
std::vector<IMat> double_conjugation_cosets(int n, const IMat& a) {
  IMat a2 = i_mul(a, a);
  auto key = [&](const IMat& k) {
    IMat kinv = i_unimodular_inverse(k);
    return std::make_pair(hnf(i_mul(a, kinv)), hnf(i_mul(a2, kinv)));
  };
  Context ga = Context::gamma_a(a);
  std::map<std::pair<IMat, IMat>, int> seen;
  std::deque<IMat> queue;
  std::vector<IMat> all;
  IMat id = i_identity(n);
  seen[key(id)] = 0;
  all.push_back(id);
  queue.push_back(id);
  auto gens = sl_generators(n);
  while (!queue.empty()) {
    IMat k = queue.front();
    queue.pop_front();
    for (const IMat& g : gens) {
      IMat gk = i_mul(g, k);
      auto kk = key(gk);
      if (seen.count(kk)) continue;
      seen[kk] = (int)all.size();
      all.push_back(gk);
      queue.push_back(gk);
    }
  }
  std::vector<IMat> inside;
  for (const IMat& k : all)
    if (ga.member(k)) inside.push_back(k);
  return inside;
}

}  // namespace

MappingTorus mapping_torus(TemperamentLadder& ladder, const CoefficientModule& module) {
  F f;
  ladder.build();
  MappingTorus out;
  const Chunk& one = ladder.slice(Rat(1));
  auto cx0 = build_complex(f, one, "gamma_a", module);
  auto h0 = compute_cohomology(f, cx0);
  out.fiber_betti = h0.betti;
  int k = ladder.stages();

  std::vector<QMat> mu;
  if (k == 0) {
    // trivial monodromy
    for (int q = 0; q < (int)h0.betti.size(); q++)
      mu.push_back(q_identity(h0.betti[q]));
  } else {
    std::vector<EqComplexT<F>> event_cx(k + 1), sample_cx(k);
    std::vector<CohomologyT<F>> event_h(k + 1), sample_h(k);
    for (int i = 1; i <= k; i++) {
      event_cx[i] = build_complex(f, ladder.slice(ladder.s_values()[i]), "gamma_a",
                                  module);
      event_h[i] = compute_cohomology(f, event_cx[i]);
    }
    for (int i = 0; i < k; i++) {
      sample_cx[i] = build_complex(f, ladder.slice(ladder.samples()[i]), "gamma_a",
                                   module);
      sample_h[i] = compute_cohomology(f, sample_cx[i]);
    }
    // strict pullback when it is equivariant on the nose; otherwise average
    // over cosets of the double-conjugation subgroup inside gamma_a (the
    // canonical characteristic-zero projection, still a chain map)
    std::vector<QMat> q_mats;
    bool strict_ok = true;
    try {
      q_mats = assemble_eval(f, cx0, event_cx[k], {ladder.a()});
      strict_ok = verify_chain_map(f, cx0, event_cx[k], q_mats);
    } catch (const std::logic_error&) {
      strict_ok = false;
    }
    if (!strict_ok) {
      std::vector<IMat> ks = double_conjugation_cosets(ladder.n(), ladder.a());
      std::vector<IMat> gs;
      for (const IMat& kk : ks)
        gs.push_back(i_mul(ladder.a(), i_unimodular_inverse(kk)));
      q_mats = assemble_eval(f, cx0, event_cx[k], gs);
      Rat scale = Rat(1, (long)ks.size());
      for (auto& m0 : q_mats) m0 = q_scale(scale, m0);
      if (!verify_chain_map(f, cx0, event_cx[k], q_mats))
        throw std::logic_error("mapping_torus: monodromy start is not a chain map");
    }
    mu = induced(f, cx0, event_cx[k], h0, event_h[k], q_mats);
    for (int i = k; i >= 1; i--) {
      auto r_mats = assemble_collapse(f, ladder, event_cx[i], sample_cx[i - 1],
                                      ladder.s_values()[i]);
      auto r_ind = induced(f, event_cx[i], sample_cx[i - 1], event_h[i],
                           sample_h[i - 1], r_mats);
      mu = compose(r_ind, mu);
      const EqComplexT<F>& left_cx = (i - 1 == 0) ? cx0 : event_cx[i - 1];
      const CohomologyT<F>& left_h = (i - 1 == 0) ? h0 : event_h[i - 1];
      auto l_mats = assemble_collapse(f, ladder, left_cx, sample_cx[i - 1],
                                      ladder.s_values()[i - 1]);
      auto l_ind =
          induced(f, left_cx, sample_cx[i - 1], left_h, sample_h[i - 1], l_mats);
      mu = compose(invert_all(l_ind), mu);
    }
  }
  out.monodromy = mu;
  for (size_t q = 0; q < mu.size(); q++) {
    int dim = rows(mu[q]);
    QMat one_minus = q_sub(q_identity(dim), mu[q]);
    int r = dim ? q_rank(one_minus) : 0;
    out.invariants.push_back(dim - r);
    out.coinvariants.push_back(dim - r);
  }
  for (size_t m = 0; m < mu.size() + 1; m++) {
    int inv = m < out.invariants.size() ? out.invariants[m] : 0;
    int coinv = (m >= 1 && m - 1 < out.coinvariants.size()) ? out.coinvariants[m - 1] : 0;
    out.torus_dims.push_back(inv + coinv);
  }
  return out;
}

}  // namespace tempered

#pragma once

// Boundary cohomology through the flag subcomplexes: the double complex
// with one column per flag length, vertical differential (-1)^p times the
// equivariant coboundary of each W_F, horizontal differential the signed
// member-deletion restrictions, plus the psi chain map from the interior
// complex into the p = 0 column.  The E1 page is columnwise cohomology.

#include "tempered/eqcomplex.hpp"

#include <vector>

namespace tempered {

// context layout for a boundary computation over a base group: one
// parabolic context per flag class and length
struct BoundaryPlan {
  Context base;                 // sl or gamma_a
  int n = 0;
  // flags[l-2][i] = representative of the i-th class of length-l flags
  std::vector<std::vector<Flag>> flags;
  std::vector<std::vector<std::string>> ctx_names;

  static BoundaryPlan make(int n, const Context& base);
  // contexts to hand to the chunk: base first, then the parabolic ones
  std::vector<Context> contexts() const;
};

// the value of an equivariant cochain of `src` at a literal target cell
// known to equal (src-cell) * g; returns the block column offset in src
// and the module-space matrix rho~(t g) * basis with orientation sign
template <class F>
struct EvalBlock {
  int src_offset = 0;
  int src_dim = 0;
  FMat<F> mat;  // module_dim x src_dim
};

template <class F>
EvalBlock<F> cochain_eval(const F& f, const EqComplexT<F>& src, int q,
                          const Sig& target_sig, const CellGeometry& target_geom,
                          const IMat& g) {
  // src-cell signature (g may be a semigroup transport; the preimage must
  // stay integral, which the weight sublattice guarantees)
  auto ginv = q_inverse(to_qmat(g));
  if (!ginv) throw std::invalid_argument("cochain_eval: singular transport");
  auto src_opt = sig_transport_q(target_sig, *ginv);
  if (!src_opt) throw std::logic_error("cochain_eval: non-integral preimage");
  Sig src_sig = *src_opt;
  int src_ctx = src.chunk->context_index(src.context);
  auto [orbit, t] = src.chunk->resolve(src_ctx, src_sig);
  IMat combined = i_mul(t, g);
  const auto& blk = src.blocks[q][src.orbit_block[orbit]];
  EvalBlock<F> out;
  out.src_offset = blk.offset;
  out.src_dim = blk.dim;
  if (blk.dim == 0) {
    out.mat = f_zero(f, src.module.dim(), 0);
    return out;
  }
  const ChunkCell& rep =
      src.chunk->cell(src.chunk->orbit_table(src.context).orbits[orbit].rep);
  int sgn = target_geom.dim == 0 ? 1
                                 : SliceGeometry::transport_orientation(
                                       rep.geom, combined, target_geom);
  FMat<F> rho = f_from_qmat(f, src.module.transport_matrix(combined));
  out.mat = f_mul(f, rho, blk.basis);
  if (sgn < 0) out.mat = f_scale(f, f.neg(f.one()), out.mat);
  return out;
}

template <class F>
struct BoundaryGrid {
  const F* field = nullptr;
  const Chunk* chunk = nullptr;
  BoundaryPlan plan;
  CoefficientModule module;

  struct Summand {
    Flag flag;
    std::string ctx;
    EqComplexT<F> cx;
    int offset = 0;  // offset of this summand inside its column, per degree:
  };
  std::vector<std::vector<Summand>> columns;     // [p][i]
  std::vector<std::vector<int>> col_dims;        // [p][q]
  // horizontal differential per column p and degree q:
  // matrix col_dims[p+1][q] x col_dims[p][q]
  std::vector<std::vector<FMat<F>>> d_h;
  // vertical differential including the (-1)^p sign: [p][q]
  std::vector<std::vector<FMat<F>>> d_v;

  int max_p() const { return (int)columns.size() - 1; }
  int max_q() const { return chunk->max_dim(); }

  // total complex
  std::vector<int> total_dims;          // degree m = p + q
  std::vector<FMat<F>> total_d;         // degree m -> m+1
  // offset of (p, q) block inside total degree p+q
  int total_offset(int p, int q) const;
};

template <class F>
struct SpectralPage {
  // E1^{p,q} dimensions and the d1 maps, then E2 dimensions
  std::vector<std::vector<int>> e1;  // [p][q]
  std::vector<std::vector<int>> e2;  // [p][q]
  std::vector<int> abutment;         // dim H^m(total)
};

// ---- implementation ----

template <class F>
BoundaryGrid<F> build_boundary_grid(const F& f, const Chunk& chunk,
                                    const BoundaryPlan& plan,
                                    const CoefficientModule& module) {
  BoundaryGrid<F> grid;
  grid.field = &f;
  grid.chunk = &chunk;
  grid.plan = plan;
  grid.module = module;
  int n = plan.n;
  int qmax = chunk.max_dim();

  grid.columns.resize(n - 1);
  grid.col_dims.assign(n - 1, std::vector<int>(qmax + 1, 0));
  for (int p = 0; p <= n - 2; p++) {
    int len = p + 2;
    for (size_t i = 0; i < plan.flags[len - 2].size(); i++) {
      typename BoundaryGrid<F>::Summand s;
      s.flag = plan.flags[len - 2][i];
      s.ctx = plan.ctx_names[len - 2][i];
      s.cx = build_complex(f, chunk, s.ctx, module);
      s.offset = grid.col_dims[p][0];  // per-degree offsets pulled from cx dims
      grid.columns[p].push_back(std::move(s));
    }
    // per-degree dims and offsets
    for (int q = 0; q <= qmax; q++) {
      int off = 0;
      for (auto& s : grid.columns[p]) {
        if (q == 0) s.offset = off;  // summand offsets are degreewise equal order
        off += s.cx.dims[q];
      }
      grid.col_dims[p][q] = off;
    }
  }

  // vertical differentials with the (-1)^p sign
  grid.d_v.resize(n - 1);
  for (int p = 0; p <= n - 2; p++) {
    grid.d_v[p].resize(qmax);
    for (int q = 0; q < qmax; q++) {
      FMat<F> d = f_zero(f, grid.col_dims[p][q + 1], grid.col_dims[p][q]);
      int roff = 0, coff = 0;
      for (const auto& s : grid.columns[p]) {
        const FMat<F>& block = s.cx.diff[q];
        for (size_t r = 0; r < block.size(); r++)
          for (size_t c = 0; c < block[r].size(); c++)
            d[roff + r][coff + c] = (p % 2 == 0) ? block[r][c] : f.neg(block[r][c]);
        roff += s.cx.dims[q + 1];
        coff += s.cx.dims[q];
      }
      grid.d_v[p][q] = std::move(d);
    }
  }

  // horizontal differentials: delete flag member j with sign (-1)^j
  grid.d_h.resize(n - 1);
  for (int p = 0; p + 1 <= n - 2; p++) {
    grid.d_h[p].resize(qmax + 1);
    for (int q = 0; q <= qmax; q++) {
      FMat<F> d = f_zero(f, grid.col_dims[p + 1][q], grid.col_dims[p][q]);
      int roff = 0;
      for (const auto& tgt : grid.columns[p + 1]) {
        const OrbitTable tgt_table = chunk.orbit_table(tgt.ctx);
        for (int j = 1; j <= tgt.flag.length() - 1; j++) {
          Flag dropped = tgt.flag.drop_member(j);
          // identify the class of the dropped flag among column-p summands
          int src_idx = -1;
          IMat g;
          for (size_t i = 0; i < grid.columns[p].size(); i++) {
            auto tr = flag_equivalent(grid.columns[p][i].flag, dropped, plan.base);
            if (tr) {
              src_idx = (int)i;
              g = *tr;
              break;
            }
          }
          if (src_idx < 0)
            throw std::logic_error("boundary grid: dropped flag has no class");
          const auto& src = grid.columns[p][src_idx];
          int coff = 0;
          for (int k = 0; k < src_idx; k++) coff += grid.columns[p][k].cx.dims[q];
          // evaluate the transported src cochain at every tgt orbit rep
          for (const auto& tblk : tgt.cx.blocks[q]) {
            if (tblk.dim == 0) continue;
            const ChunkCell& rep = chunk.cell(tgt_table.orbits[tblk.orbit].rep);
            EvalBlock<F> ev = cochain_eval(f, src.cx, q, rep.sig, rep.geom, g);
            if (ev.src_dim == 0) continue;
            // express in tgt invariant coordinates
            for (int c = 0; c < ev.src_dim; c++) {
              FVec<F> v(module.dim());
              for (int r = 0; r < module.dim(); r++) v[r] = ev.mat[r][c];
              auto sol = f_solve(f, tblk.basis, v);
              if (!sol)
                throw std::logic_error("boundary grid: restriction left invariants");
              for (int r = 0; r < tblk.dim; r++) {
                typename F::Elem val = (*sol)[r];
                if (j % 2 == 1) val = f.neg(val);  // sign (-1)^j
                d[roff + tblk.offset + r][coff + ev.src_offset + c] =
                    f.add(d[roff + tblk.offset + r][coff + ev.src_offset + c], val);
              }
            }
          }
        }
        roff += tgt.cx.dims[q];
      }
      grid.d_h[p][q] = std::move(d);
    }
  }

  // total complex
  int mmax = (n - 2) + qmax;
  grid.total_dims.assign(mmax + 2, 0);
  for (int m = 0; m <= mmax; m++) {
    int dim = 0;
    for (int p = 0; p <= std::min(n - 2, m); p++) {
      int q = m - p;
      if (q <= qmax) dim += grid.col_dims[p][q];
    }
    grid.total_dims[m] = dim;
  }
  grid.total_d.resize(mmax + 1);
  for (int m = 0; m < mmax + 1; m++) {
    FMat<F> d = f_zero(f, m + 1 <= mmax ? grid.total_dims[m + 1] : 0, grid.total_dims[m]);
    for (int p = 0; p <= std::min(n - 2, m); p++) {
      int q = m - p;
      if (q > qmax) continue;
      int coff = grid.total_offset(p, q);
      // vertical: (p, q) -> (p, q+1)
      if (q + 1 <= qmax) {
        int roff = grid.total_offset(p, q + 1);
        const FMat<F>& blk = grid.d_v[p][q];
        for (size_t r = 0; r < blk.size(); r++)
          for (size_t c = 0; c < blk[r].size(); c++)
            d[roff + r][coff + c] = f.add(d[roff + r][coff + c], blk[r][c]);
      }
      // horizontal: (p, q) -> (p+1, q)
      if (p + 1 <= n - 2) {
        int roff = grid.total_offset(p + 1, q);
        const FMat<F>& blk = grid.d_h[p][q];
        for (size_t r = 0; r < blk.size(); r++)
          for (size_t c = 0; c < blk[r].size(); c++)
            d[roff + r][coff + c] = f.add(d[roff + r][coff + c], blk[r][c]);
      }
    }
    grid.total_d[m] = std::move(d);
  }
  return grid;
}

template <class F>
int BoundaryGrid<F>::total_offset(int p, int q) const {
  int m = p + q;
  int off = 0;
  for (int pp = 0; pp < p; pp++) {
    int qq = m - pp;
    if (pp <= max_p() && qq >= 0 && qq <= max_q()) off += col_dims[pp][qq];
  }
  return off;
}

// psi: interior equivariant cochains into the p = 0 column (sum of
// restrictions); zero in higher columns
template <class F>
std::vector<FMat<F>> psi_map(const F& f, const EqComplexT<F>& interior,
                             const BoundaryGrid<F>& grid) {
  int qmax = grid.max_q();
  std::vector<FMat<F>> psi(qmax + 1);
  IMat id = i_identity(grid.plan.n);
  for (int q = 0; q <= qmax; q++) {
    FMat<F> m = f_zero(f, grid.col_dims[0][q], interior.dims[q]);
    int roff = 0;
    for (const auto& s : grid.columns[0]) {
      const OrbitTable table = grid.chunk->orbit_table(s.ctx);
      for (const auto& tblk : s.cx.blocks[q]) {
        if (tblk.dim == 0) continue;
        const ChunkCell& rep = grid.chunk->cell(table.orbits[tblk.orbit].rep);
        EvalBlock<F> ev = cochain_eval(f, interior, q, rep.sig, rep.geom, id);
        for (int c = 0; c < ev.src_dim; c++) {
          FVec<F> v(grid.module.dim());
          for (int r = 0; r < grid.module.dim(); r++) v[r] = ev.mat[r][c];
          auto sol = f_solve(f, tblk.basis, v);
          if (!sol) throw std::logic_error("psi: restriction left invariants");
          for (int r = 0; r < tblk.dim; r++)
            m[roff + tblk.offset + r][ev.src_offset + c] = (*sol)[r];
        }
      }
      roff += s.cx.dims[q];
    }
    psi[q] = std::move(m);
  }
  return psi;
}

// psi as a map into the total complex (p = 0 block of each total degree)
template <class F>
std::vector<FMat<F>> psi_total(const F& f, const EqComplexT<F>& interior,
                               const BoundaryGrid<F>& grid,
                               const std::vector<FMat<F>>& psi_cols) {
  std::vector<FMat<F>> out(grid.total_dims.size());
  for (size_t m = 0; m < grid.total_dims.size(); m++) {
    int qmax = grid.max_q();
    int src_dim = (int)m <= qmax ? interior.dims[m] : 0;
    FMat<F> mat = f_zero(f, grid.total_dims[m], src_dim);
    if (src_dim > 0 && (int)m <= qmax) {
      int roff = grid.total_offset(0, (int)m);
      const FMat<F>& blk = psi_cols[m];
      for (size_t r = 0; r < blk.size(); r++)
        for (size_t c = 0; c < blk[r].size(); c++) mat[roff + r][c] = blk[r][c];
    }
    out[m] = std::move(mat);
  }
  return out;
}

// chain-map check for psi against the total differential:
// total_d . psi_m == psi_{m+1} . interior_d
template <class F>
bool psi_is_chain_map(const F& f, const EqComplexT<F>& interior,
                      const BoundaryGrid<F>& grid,
                      const std::vector<FMat<F>>& psi_tot) {
  int top = (int)grid.total_d.size();
  for (int m = 0; m + 1 < (int)psi_tot.size() && m < top; m++) {
    FMat<F> lhs = f_mul(f, grid.total_d[m], psi_tot[m]);
    FMat<F> rhs = f_zero(f, (int)lhs.size(), lhs.empty() ? 0 : (int)lhs[0].size());
    if (m < (int)interior.diff.size() && !interior.diff[m].empty()) {
      FMat<F> prod = f_mul(f, psi_tot[m + 1], interior.diff[m]);
      for (size_t i = 0; i < prod.size() && i < rhs.size(); i++)
        for (size_t j = 0; j < prod[i].size(); j++) rhs[i][j] = prod[i][j];
    }
    for (size_t i = 0; i < lhs.size(); i++)
      for (size_t j = 0; j < lhs[i].size(); j++)
        if (!f.eq(lhs[i][j], rhs[i][j])) return false;
  }
  return true;
}

// algebra checks: d_v^2 = 0, d_h^2 = 0, anticommutation, total d^2 = 0
template <class F>
bool grid_algebra_ok(const F& f, const BoundaryGrid<F>& grid) {
  int qmax = grid.max_q();
  for (int p = 0; p <= grid.max_p(); p++)
    for (int q = 0; q + 2 <= qmax; q++)
      if (!f_is_zero_mat(f, f_mul(f, grid.d_v[p][q + 1], grid.d_v[p][q]))) return false;
  for (int p = 0; p + 2 <= grid.max_p(); p++)
    for (int q = 0; q <= qmax; q++)
      if (!f_is_zero_mat(f, f_mul(f, grid.d_h[p + 1][q], grid.d_h[p][q]))) return false;
  for (int p = 0; p + 1 <= grid.max_p(); p++)
    for (int q = 0; q + 1 <= qmax; q++) {
      FMat<F> a = f_mul(f, grid.d_v[p + 1][q], grid.d_h[p][q]);
      FMat<F> b = f_mul(f, grid.d_h[p][q + 1], grid.d_v[p][q]);
      for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < a[i].size(); j++)
          if (!f.eq(a[i][j], f.neg(b[i][j]))) return false;
    }
  for (size_t m = 0; m + 1 < grid.total_d.size(); m++)
    if (!f_is_zero_mat(f, f_mul(f, grid.total_d[m + 1], grid.total_d[m]))) return false;
  return true;
}

template <class F>
std::vector<int> total_cohomology_dims(const F& f, const BoundaryGrid<F>& grid) {
  std::vector<int> h;
  int top = (int)grid.total_dims.size() - 1;
  std::vector<int> ranks(top + 1, 0);
  for (int m = 0; m < (int)grid.total_d.size(); m++)
    ranks[m] = grid.total_d[m].empty() ? 0 : f_rank(f, grid.total_d[m]);
  for (int m = 0; m <= top; m++) {
    int dim = grid.total_dims[m];
    if (dim == 0) {
      h.push_back(0);
      continue;
    }
    int dout = m < (int)grid.total_d.size() ? ranks[m] : 0;
    int din = m > 0 ? ranks[m - 1] : 0;
    h.push_back(dim - dout - din);
  }
  return h;
}

// E1 page (columnwise cohomology), d1, E2, and the abutment consistency data
template <class F>
SpectralPage<F> e1_page(const F& f, const BoundaryGrid<F>& grid) {
  SpectralPage<F> page;
  int pmax = grid.max_p();
  int qmax = grid.max_q();
  page.e1.assign(pmax + 1, std::vector<int>(qmax + 1, 0));
  page.e2.assign(pmax + 1, std::vector<int>(qmax + 1, 0));

  // per column: cocycle reps of the vertical complex and projections
  struct ColH {
    std::vector<FMat<F>> reps;
    std::vector<FMat<F>> span;
    std::vector<int> betti;
  };
  std::vector<ColH> cols(pmax + 1);
  for (int p = 0; p <= pmax; p++) {
    ColH ch;
    ch.reps.resize(qmax + 1);
    ch.span.resize(qmax + 1);
    ch.betti.assign(qmax + 1, 0);
    for (int q = 0; q <= qmax; q++) {
      int dim = grid.col_dims[p][q];
      if (dim == 0) continue;
      FMat<F> z = q < qmax && !grid.d_v[p][q].empty()
                      ? f_right_kernel(f, grid.d_v[p][q])
                      : f_identity(f, dim);
      FMat<F> bnd = f_zero(f, dim, 0);
      if (q > 0 && !grid.d_v[p][q - 1].empty()) {
        auto piv = f_column_basis(f, grid.d_v[p][q - 1]);
        bnd = f_zero(f, dim, (int)piv.size());
        for (size_t c = 0; c < piv.size(); c++)
          for (int r = 0; r < dim; r++) bnd[r][c] = grid.d_v[p][q - 1][r][piv[c]];
      }
      int brank = bnd.empty() || bnd[0].empty() ? 0 : (int)bnd[0].size();
      FMat<F> probe = f_transpose(f, bnd);
      int cur = brank;
      std::vector<int> chosen;
      for (size_t zi = 0; zi < z.size(); zi++) {
        probe.push_back(z[zi]);
        FMat<F> copy = probe;
        int r = (int)f_row_echelon(f, copy).size();
        if (r > cur) {
          cur = r;
          chosen.push_back((int)zi);
        } else
          probe.pop_back();
      }
      ch.betti[q] = (int)chosen.size();
      ch.reps[q] = f_zero(f, dim, (int)chosen.size());
      for (size_t c = 0; c < chosen.size(); c++)
        for (int r = 0; r < dim; r++) ch.reps[q][r][c] = z[chosen[c]][r];
      ch.span[q] = f_zero(f, dim, ch.betti[q] + brank);
      for (int c = 0; c < ch.betti[q]; c++)
        for (int r = 0; r < dim; r++) ch.span[q][r][c] = ch.reps[q][r][c];
      for (int c = 0; c < brank; c++)
        for (int r = 0; r < dim; r++) ch.span[q][r][ch.betti[q] + c] = bnd[r][c];
      page.e1[p][q] = ch.betti[q];
    }
    cols[p] = std::move(ch);
  }

  // d1 and E2
  for (int q = 0; q <= qmax; q++) {
    std::vector<FMat<F>> d1(pmax + 1);
    for (int p = 0; p < pmax; p++) {
      d1[p] = f_zero(f, cols[p + 1].betti[q], cols[p].betti[q]);
      for (int c = 0; c < cols[p].betti[q]; c++) {
        FVec<F> rep(grid.col_dims[p][q]);
        for (int r = 0; r < grid.col_dims[p][q]; r++) rep[r] = cols[p].reps[q][r][c];
        FVec<F> img = f_apply(f, grid.d_h[p][q], rep);
        if (cols[p + 1].betti[q] == 0) continue;
        auto sol = f_solve(f, cols[p + 1].span[q], img);
        if (!sol) throw std::logic_error("e1_page: d1 image not a vertical cocycle class");
        for (int r = 0; r < cols[p + 1].betti[q]; r++) d1[p][r][c] = (*sol)[r];
      }
    }
    for (int p = 0; p <= pmax; p++) {
      int dim = page.e1[p][q];
      int rout = p < pmax && !d1[p].empty() ? f_rank(f, d1[p]) : 0;
      int rin = p > 0 && !d1[p - 1].empty() ? f_rank(f, d1[p - 1]) : 0;
      page.e2[p][q] = dim - rout - rin;
    }
  }

  page.abutment = total_cohomology_dims(f, grid);
  return page;
}

// diagnostic constants from the staged retraction along a flag: alpha_j
// (weighted minimum of the projected lattice), beta_j^2 and t_j^2 squared
// to stay rational
struct FlagConstants {
  std::vector<Rat> alpha;
  std::vector<Rat> beta_sq;
  std::vector<Rat> t_sq;
};

FlagConstants lemma_constants(const QForm& form, const TemperedWeight& w,
                              const Flag& flag);

}  // namespace tempered

#pragma once

// Equivariant cochain complexes over a field: one block per cell orbit,
// coefficients in the stabilizer invariants of (rho tensor orientation).
// With bad primes rejected, the invariants are cut out by the averaging
// projector, and the equivariant cohomology is the cohomology of this
// single complex.

#include "tempered/chunk.hpp"
#include "tempered/coeff.hpp"
#include "tempered/field.hpp"

#include <optional>
#include <vector>

namespace tempered {

// stabilizer orders that the prime divides (empty = good prime / char 0)
std::vector<Int> bad_prime_witnesses(const OrbitTable& table, unsigned long p);

template <class F>
struct EqComplexT {
  const F* field = nullptr;
  const Chunk* chunk = nullptr;
  std::string context;
  CoefficientModule module;

  struct Block {
    int orbit = -1;
    int offset = 0;
    int dim = 0;          // number of invariant coordinates
    FMat<F> basis;        // module_dim x dim
  };
  std::vector<std::vector<Block>> blocks;  // per degree
  std::vector<int> dims;                   // per degree
  std::vector<FMat<F>> diff;               // diff[q] : C^q -> C^{q+1}
  std::vector<int> orbit_block;            // orbit id -> block index in its degree

  int degrees() const { return (int)dims.size(); }
};

template <class F>
struct CohomologyT {
  std::vector<int> betti;
  std::vector<FMat<F>> reps;       // per degree: dims[q] x betti[q] cocycle reps
  std::vector<FMat<F>> proj_span;  // per degree: [reps | coboundary basis]

  FVec<F> project(const F& f, int q, const FVec<F>& cocycle) const {
    if (betti[q] == 0) return {};
    auto sol = f_solve(f, proj_span[q], cocycle);
    if (!sol) throw std::logic_error("cohomology project: not a cocycle class");
    return FVec<F>(sol->begin(), sol->begin() + betti[q]);
  }
};

template <class F>
struct CochainMapT {
  const EqComplexT<F>* src = nullptr;
  const EqComplexT<F>* dst = nullptr;
  std::vector<FMat<F>> mats;  // per degree: dst dims x src dims
};

// ---- construction ----

template <class F>
EqComplexT<F> build_complex(const F& field, const Chunk& chunk,
                            const std::string& context_name,
                            const CoefficientModule& module,
                            bool force_trivial_orientation = false) {
  const OrbitTable table = chunk.orbit_table(context_name);
  EqComplexT<F> cx;
  cx.field = &field;
  cx.chunk = &chunk;
  cx.context = context_name;
  cx.module = module;
  int top = chunk.max_dim();
  cx.blocks.resize(top + 1);
  cx.dims.assign(top + 1, 0);
  cx.orbit_block.assign(table.orbits.size(), -1);

  int mdim = module.dim();
  for (int q = 0; q <= top; q++) {
    for (int ob : table.orbits_by_dim[q]) {
      const Orbit& orbit = table.orbits[ob];
      // averaging projector over the stabilizer, twisted by orientation
      FMat<F> acc = f_zero(field, mdim, mdim);
      for (const StabElement& s : orbit.stab) {
        FMat<F> rho = f_from_qmat(field, module.transport_matrix(s.h));
        int orc = force_trivial_orientation ? 1 : s.orientation;
        if (orc < 0) rho = f_scale(field, field.neg(field.one()), rho);
        acc = f_add(field, acc, rho);
      }
      typename F::Elem inv_order =
          field.div(field.one(), field.from_rat(Rat((long)orbit.stab.size())));
      acc = f_scale(field, inv_order, acc);
      auto piv = f_column_basis(field, acc);
      typename EqComplexT<F>::Block blk;
      blk.orbit = ob;
      blk.offset = cx.dims[q];
      blk.dim = (int)piv.size();
      blk.basis = f_zero(field, mdim, (int)piv.size());
      for (size_t c = 0; c < piv.size(); c++)
        for (int r = 0; r < mdim; r++) blk.basis[r][c] = acc[r][piv[c]];
      cx.dims[q] += blk.dim;
      cx.orbit_block[ob] = (int)cx.blocks[q].size();
      cx.blocks[q].push_back(std::move(blk));
    }
  }

  // differentials
  cx.diff.resize(top);
  for (int q = 0; q + 1 <= top; q++) {
    FMat<F> d = f_zero(field, cx.dims[q + 1], cx.dims[q]);
    for (const auto& tblk : cx.blocks[q + 1]) {
      if (tblk.dim == 0) continue;
      // accumulate the module-space matrix of (dx)(rep) in terms of source coords
      FMat<F> acc = f_zero(field, mdim, cx.dims[q]);
      for (const FacetUse& use : table.incidence[tblk.orbit]) {
        const auto& sblk = cx.blocks[q][cx.orbit_block[use.facet_orbit]];
        if (sblk.dim == 0) continue;
        FMat<F> rho = f_from_qmat(field, module.transport_matrix(use.transport));
        int s = use.incidence * (force_trivial_orientation ? 1 : use.transport_sign);
        FMat<F> contrib = f_mul(field, rho, sblk.basis);
        if (s < 0) contrib = f_scale(field, field.neg(field.one()), contrib);
        for (int r = 0; r < mdim; r++)
          for (int c = 0; c < sblk.dim; c++)
            acc[r][sblk.offset + c] = field.add(acc[r][sblk.offset + c], contrib[r][c]);
      }
      // express in the target block's invariant coordinates
      for (int col = 0; col < cx.dims[q]; col++) {
        FVec<F> v(mdim);
        for (int r = 0; r < mdim; r++) v[r] = acc[r][col];
        bool zero = true;
        for (const auto& x : v)
          if (!field.is_zero(x)) zero = false;
        if (zero) continue;
        auto sol = f_solve(field, tblk.basis, v);
        if (!sol)
          throw std::logic_error("build_complex: differential left the invariant space");
        for (int r = 0; r < tblk.dim; r++) d[tblk.offset + r][col] = (*sol)[r];
      }
    }
    cx.diff[q] = std::move(d);
  }
  return cx;
}

template <class F>
bool complex_d_squared_zero(const F& f, const EqComplexT<F>& cx) {
  for (size_t q = 0; q + 1 < cx.diff.size(); q++)
    if (!f_is_zero_mat(f, f_mul(f, cx.diff[q + 1], cx.diff[q]))) return false;
  return true;
}

template <class F>
CohomologyT<F> compute_cohomology(const F& f, const EqComplexT<F>& cx) {
  CohomologyT<F> h;
  int top = cx.degrees() - 1;
  h.betti.assign(top + 1, 0);
  h.reps.resize(top + 1);
  h.proj_span.resize(top + 1);
  for (int q = 0; q <= top; q++) {
    int dim = cx.dims[q];
    // cocycles
    FMat<F> z;
    if (q < top && !cx.diff[q].empty())
      z = f_right_kernel(f, cx.diff[q]);  // rows = kernel basis
    else {
      z = f_identity(f, dim);
    }
    if (dim == 0) {
      h.reps[q] = {};
      h.proj_span[q] = {};
      continue;
    }
    // coboundaries: columns of diff[q-1]
    FMat<F> bnd_cols;
    if (q > 0 && !cx.diff[q - 1].empty()) {
      const FMat<F>& dprev = cx.diff[q - 1];
      auto piv = f_column_basis(f, dprev);
      bnd_cols = f_zero(f, dim, (int)piv.size());
      for (size_t c = 0; c < piv.size(); c++)
        for (int r = 0; r < dim; r++) bnd_cols[r][c] = dprev[r][piv[c]];
    } else {
      bnd_cols = f_zero(f, dim, 0);
    }
    int b_rank = bnd_cols.empty() || bnd_cols[0].empty() ? 0 : (int)bnd_cols[0].size();
    // extend the boundary basis to the cocycle space by greedy rank growth
    FMat<F> span_cols = bnd_cols;  // dim x (b_rank + new)
    std::vector<int> rep_cols;
    {
      FMat<F> probe = f_transpose(f, bnd_cols);
      int cur_rank = b_rank;
      for (size_t zi = 0; zi < z.size(); zi++) {
        probe.push_back(z[zi]);
        FMat<F> copy = probe;
        int r = (int)f_row_echelon(f, copy).size();
        if (r > cur_rank) {
          cur_rank = r;
          rep_cols.push_back((int)zi);
        } else {
          probe.pop_back();
        }
      }
    }
    h.betti[q] = (int)rep_cols.size();
    h.reps[q] = f_zero(f, dim, (int)rep_cols.size());
    for (size_t c = 0; c < rep_cols.size(); c++)
      for (int r = 0; r < dim; r++) h.reps[q][r][c] = z[rep_cols[c]][r];
    // projection span: [reps | boundaries]
    h.proj_span[q] = f_zero(f, dim, h.betti[q] + b_rank);
    for (int c = 0; c < h.betti[q]; c++)
      for (int r = 0; r < dim; r++) h.proj_span[q][r][c] = h.reps[q][r][c];
    for (int c = 0; c < b_rank; c++)
      for (int r = 0; r < dim; r++) h.proj_span[q][r][h.betti[q] + c] = bnd_cols[r][c];
  }
  return h;
}

template <class F>
bool is_chain_map(const F& f, const CochainMapT<F>& m) {
  int top = std::min(m.src->degrees(), m.dst->degrees()) - 1;
  for (int q = 0; q + 1 <= top; q++) {
    // d_dst . M_q == M_{q+1} . d_src; degenerate blocks collapse matrix
    // shapes, so compare with zero padding
    FMat<F> lhs = f_mul(f, m.dst->diff[q], m.mats[q]);
    FMat<F> rhs = f_mul(f, m.mats[q + 1], m.src->diff[q]);
    size_t rmax = std::max(lhs.size(), rhs.size());
    for (size_t i = 0; i < rmax; i++) {
      size_t cl = i < lhs.size() ? lhs[i].size() : 0;
      size_t cr = i < rhs.size() ? rhs[i].size() : 0;
      for (size_t j = 0; j < std::max(cl, cr); j++) {
        typename F::Elem l = j < cl ? lhs[i][j] : f.zero();
        typename F::Elem r = j < cr ? rhs[i][j] : f.zero();
        if (!f.eq(l, r)) return false;
      }
    }
  }
  return true;
}

// matrices induced on cohomology, one per degree
template <class F>
std::vector<FMat<F>> induced_map(const F& f, const CochainMapT<F>& m,
                                 const CohomologyT<F>& hsrc,
                                 const CohomologyT<F>& hdst) {
  if (!is_chain_map(f, m)) throw std::invalid_argument("induced_map: not a chain map");
  int top = std::min(m.src->degrees(), m.dst->degrees());
  std::vector<FMat<F>> out(top);
  for (int q = 0; q < top; q++) {
    out[q] = f_zero(f, hdst.betti[q], hsrc.betti[q]);
    for (int c = 0; c < hsrc.betti[q]; c++) {
      FVec<F> rep(m.src->dims[q]);
      for (int r = 0; r < m.src->dims[q]; r++) rep[r] = hsrc.reps[q][r][c];
      FVec<F> img = f_apply(f, m.mats[q], rep);
      FVec<F> coords = hdst.project(f, q, img);
      for (int r = 0; r < hdst.betti[q]; r++) out[q][r][c] = coords[r];
    }
  }
  return out;
}

}  // namespace tempered

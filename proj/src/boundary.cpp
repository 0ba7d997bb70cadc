#include "tempered/boundary.hpp"

#include "tempered/retract.hpp"

#include <stdexcept>

namespace tempered {

BoundaryPlan BoundaryPlan::make(int n, const Context& base) {
  BoundaryPlan plan;
  plan.base = base;
  plan.n = n;
  for (int len = 2; len <= n; len++) {
    plan.flags.push_back(flag_reps(n, len, base));
    std::vector<std::string> names;
    for (size_t i = 0; i < plan.flags.back().size(); i++)
      names.push_back(base.name + "_p" + std::to_string(len) + "f" + std::to_string(i));
    plan.ctx_names.push_back(names);
  }
  return plan;
}

std::vector<Context> BoundaryPlan::contexts() const {
  std::vector<Context> out;
  out.push_back(base);
  for (size_t l = 0; l < flags.size(); l++)
    for (size_t i = 0; i < flags[l].size(); i++) {
      Context c = base.semigroup_b
                      ? Context::gamma_a_parabolic(*base.semigroup_b, flags[l][i])
                      : Context::parabolic(flags[l][i]);
      c.name = ctx_names[l][i];
      out.push_back(c);
    }
  return out;
}

namespace {

// basis of { y in Z^d : y * c  is integral } for a rational matrix c
IMat integrality_lattice(const QMat& c) {
  int d = rows(c), n = cols(c);
  Int den = 1;
  for (const auto& row : c)
    for (const auto& x : row) {
      Int g;
      mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), x.get_den().get_mpz_t());
      den = den / g * x.get_den();
    }
  // y c integral <=> exists z : y (den c) - den z = 0
  IMat stacked;
  for (int i = 0; i < d; i++) {
    IVec row(n);
    for (int j = 0; j < n; j++) {
      Rat scaled = Rat(den) * c[i][j];
      row[j] = scaled.get_num();
    }
    stacked.push_back(row);
  }
  for (int i = 0; i < n; i++) {
    IVec row(n, 0);
    row[i] = -den;
    stacked.push_back(row);
  }
  IMat ker = i_left_kernel(stacked);
  IMat basis;
  for (const IVec& v : ker) {
    IVec y(v.begin(), v.begin() + d);
    if (!ivec_is_zero(y)) basis.push_back(y);
  }
  basis = hnf(basis);
  if (rows(basis) != d) throw std::logic_error("integrality_lattice: rank deficit");
  return basis;
}

}  // namespace

FlagConstants lemma_constants(const QForm& form, const TemperedWeight& w,
                              const Flag& flag) {
  FlagConstants out;
  int n = form.n;
  Rat t_prod(1);
  for (size_t j = 0; j < flag.members.size(); j++) {
    const IMat& basis = flag.members[j];
    int d = rows(basis);
    QMat bq = to_qmat(basis);
    QMat bt = q_transpose(bq);
    QMat gram = q_mul(q_mul(bq, form.entries), bt);

    // beta: product of the squared retraction scalars of the restricted form
    TemperedWeight restricted = TemperedWeight::trivial(d);
    if (w.weights.m0_basis) {
      QMat m0q = to_qmat(*w.weights.m0_basis);
      QMat m0inv = *q_inverse(m0q);
      IMat sub = integrality_lattice(q_mul(bq, m0inv));
      restricted = TemperedWeight::at(WeightSystem::with_sublattice(d, sub), w.s);
    }
    RetractionTrace trace = well_rounded_retract(QForm::from(gram), restricted);
    Rat beta_sq(1);
    for (const auto& step : trace.steps) beta_sq *= step.mu_sq;
    out.beta_sq.push_back(beta_sq);

    // alpha: weighted minimum of the projection onto the orthogonal
    // complement of the member
    IMat completion = unimodular_completion(basis, n);
    IMat quot(completion.begin() + d, completion.end());
    QMat cq = to_qmat(quot);
    auto gram_inv = q_inverse(gram);
    if (!gram_inv) throw std::logic_error("lemma_constants: degenerate member");
    QMat proj = q_sub(form.entries,
                      q_mul(q_mul(q_mul(q_mul(form.entries, bt), *gram_inv), bq),
                            form.entries));
    QMat schur = q_mul(q_mul(cq, proj), q_transpose(cq));
    QForm sform = QForm::from(schur);
    // weight of a coset: 1 when it meets M0 + (member lattice), else s
    IMat coset_lattice;
    if (w.weights.m0_basis) {
      coset_lattice = *w.weights.m0_basis;
      for (const IVec& v : basis) coset_lattice.push_back(v);
      coset_lattice = hnf(coset_lattice);
    }
    auto coset_weight = [&](const IVec& y) -> Rat {
      if (!w.weights.m0_basis) return Rat(1);
      IVec x = iv_mul(y, quot);
      return in_row_lattice(x, coset_lattice) ? Rat(1) : w.s;
    };
    Rat c0;
    bool first = true;
    for (int i = 0; i < n - d; i++) {
      IVec e(n - d, 0);
      e[i] = 1;
      Rat val = coset_weight(e) * sform.value(e);
      if (first || val < c0) {
        c0 = val;
        first = false;
      }
    }
    Rat alpha = c0;
    for (const IVec& y : short_vectors(sform, c0)) {
      Rat val = coset_weight(y) * sform.value(y);
      if (val < alpha) alpha = val;
    }
    out.alpha.push_back(alpha);

    // t_j^2 = min(1, (1/4) (prod t_i^2)^{-1} alpha^2 beta^2)
    Rat cand = Rat(1, 4) / t_prod * alpha * alpha * beta_sq;
    Rat t_sq = cand < 1 ? cand : Rat(1);
    out.t_sq.push_back(t_sq);
    t_prod *= t_sq;
  }
  return out;
}

}  // namespace tempered

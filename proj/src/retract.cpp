#include "tempered/retract.hpp"

#include <stdexcept>

namespace tempered {

void MinimaFlag::validate(int n) const {
  if (subspaces.empty()) throw std::logic_error("MinimaFlag: empty");
  int prev_rank = 0;
  for (size_t i = 0; i < subspaces.size(); i++) {
    const IMat& b = subspaces[i];
    int r = rows(b);
    if (r <= prev_rank) throw std::logic_error("MinimaFlag: not strictly increasing");
    if (hnf(b) != b) throw std::logic_error("MinimaFlag: basis not canonical");
    if (same_row_lattice(b, saturate(b)) == false)
      throw std::logic_error("MinimaFlag: member not saturated");
    if (i > 0) {
      for (const IVec& v : subspaces[i - 1])
        if (!in_row_lattice(v, b)) throw std::logic_error("MinimaFlag: not a chain");
    }
    prev_rank = r;
  }
  if (rows(subspaces.back()) != n) throw std::logic_error("MinimaFlag: last member not full");
}

namespace {

// projection matrix onto the span of the rows of basis, orthogonal with
// respect to the form a:  v -> v * P
QMat form_projector(const QMat& a, const IMat& basis) {
  QMat b = to_qmat(basis);
  QMat bt = q_transpose(b);
  QMat gram = q_mul(q_mul(b, a), bt);  // B A B^T
  auto gram_inv = q_inverse(gram);
  if (!gram_inv) throw std::logic_error("form_projector: degenerate span");
  // P = A B^T (B A B^T)^{-1} B
  return q_mul(q_mul(q_mul(a, bt), *gram_inv), b);
}

}  // namespace

std::pair<Rat, QForm> retraction_step(const QForm& f, const TemperedWeight& w) {
  MinimaReport rep = arithmetic_minimum(f, w);
  if (rep.minimum != 1)
    throw std::invalid_argument("retraction_step: form not normalized to minimum 1");
  if (rep.span_rank == f.n)
    throw std::invalid_argument("retraction_step: no step needed");

  IMat span = saturate(IMat(rep.vectors.begin(), rep.vectors.end()));
  QMat p = form_projector(f.entries, span);
  QMat ip = q_sub(q_identity(f.n), p);

  // candidate sweep: every crossing vector v satisfies weight*f(v) <= 1/m*,
  // so growing the sweep bound C certifies completeness once best >= 1/C
  Rat best(0);
  Rat c(4);
  for (int rounds = 0; rounds < 64; rounds++) {
    for (const IVec& v : short_vectors_weighted(f, w, c)) {
      QVec vq = to_qvec(v);
      QVec wpart = qv_mul(vq, ip);
      Rat aw = form_value_q(f.entries, wpart);
      if (sign(aw) == 0) continue;  // inside the span, unaffected by scaling
      QVec ppart = qv_mul(vq, p);
      Rat ap = form_value_q(f.entries, ppart);
      Rat target = Rat(1) / w.weight(v);
      Rat m = (target - ap) / aw;
      if (sign(m) > 0 && m < 1 && m > best) best = m;
    }
    if (sign(best) > 0 && best >= Rat(1) / c) break;
    c *= 4;
  }
  if (sign(best) <= 0)
    throw std::logic_error("retraction_step: no crossing vector found");

  // A' = P A P^T + m (I-P) A (I-P)^T
  QMat scaled = q_add(q_mul(q_mul(p, f.entries), q_transpose(p)),
                      q_scale(best, q_mul(q_mul(ip, f.entries), q_transpose(ip))));
  return {best, QForm::from(scaled)};
}

RetractionTrace well_rounded_retract(const QForm& f, const TemperedWeight& w) {
  RetractionTrace trace;
  QForm cur = normalize_homothety(f, w);
  for (int guard = 0; guard <= f.n; guard++) {
    MinimaReport rep = arithmetic_minimum(cur, w);
    IMat span = saturate(IMat(rep.vectors.begin(), rep.vectors.end()));
    trace.flag.subspaces.push_back(span);
    if (rep.span_rank == f.n) {
      trace.result = cur;
      trace.flag.validate(f.n);
      return trace;
    }
    auto [mu_sq, next] = retraction_step(cur, w);
    trace.steps.push_back({mu_sq, span, next});
    cur = next;
  }
  throw std::logic_error("well_rounded_retract: did not terminate");
}

Sig cell_signature(const QForm& f, const TemperedWeight& w) {
  MinimaReport rep = arithmetic_minimum(f, w);
  if (rep.span_rank != f.n)
    throw std::invalid_argument("cell_signature: form not well rounded");
  return canonical_signature(rep.vectors);
}

}  // namespace tempered

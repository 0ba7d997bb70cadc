#include "tempered/qform.hpp"

#include "tempered/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempered {

QForm QForm::from(QMat m) {
  QForm f;
  f.n = rows(m);
  f.entries = std::move(m);
  f.validate();
  return f;
}

QForm QForm::identity(int n) { return from(q_identity(n)); }

QForm QForm::diag(const QVec& d) {
  QMat m = q_zero((int)d.size(), (int)d.size());
  for (size_t i = 0; i < d.size(); i++) m[i][i] = d[i];
  return from(m);
}

void QForm::validate() const {
  if (n == 0 || rows(entries) != n || cols(entries) != n)
    throw std::invalid_argument("QForm: bad shape");
  if (!is_symmetric(entries)) throw std::invalid_argument("QForm: not symmetric");
  if (!is_positive_definite(entries))
    throw std::invalid_argument("QForm: not positive definite");
}

Rat weighted_length(const QForm& f, const TemperedWeight& w, const IVec& v) {
  if ((int)v.size() != f.n || w.dim() != f.n)
    throw std::invalid_argument("weighted_length: dimension mismatch");
  if (ivec_is_zero(v)) throw std::invalid_argument("weighted_length: zero vector");
  return w.weight(v) * f.value(v);
}

namespace {

// one branch of the Fincke-Pohst recursion; emits vectors with the
// outermost nonzero coordinate positive
void enumerate_level(const LdlT& dec, const Rat& bound, int level, IVec& x,
                     const Rat& used, bool zero_above, std::vector<IVec>& out) {
  int n = (int)dec.d.size();
  // center of the completed square at this level
  Rat c(0);
  for (int j = level + 1; j < n; j++)
    if (x[j] != 0) c += dec.r[level][j] * Rat(x[j]);
  Rat budget = bound - used;
  if (sign(budget) < 0) return;
  Rat q = budget / dec.d[level];
  Int t = rat_sqrt_floor(q);
  Int lo = rat_ceil(-c) - t - 1;
  Int hi = rat_floor(-c) + t + 1;
  if (zero_above && lo < 0) lo = 0;
  for (Int xi = lo; xi <= hi; xi++) {
    Rat term = Rat(xi) + c;
    Rat add = dec.d[level] * term * term;
    if (add > budget) continue;
    x[level] = xi;
    bool zero_here = zero_above && xi == 0;
    if (level == 0) {
      if (!zero_here) {
        out.push_back(x);
      }
    } else {
      enumerate_level(dec, bound, level - 1, x, used + add, zero_here, out);
    }
  }
  x[level] = 0;
}

std::vector<IVec> with_negatives_sorted(std::vector<IVec> half) {
  std::vector<IVec> all;
  all.reserve(2 * half.size());
  for (auto& v : half) {
    all.push_back(ivec_neg(v));
    all.push_back(std::move(v));
  }
  std::sort(all.begin(), all.end(), ivec_lt);
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace

std::vector<IVec> short_vectors_serial(const QForm& f, const Rat& bound) {
  if (sign(bound) <= 0) return {};
  LdlT dec = ldlt(f.entries);
  IVec x(f.n, 0);
  std::vector<IVec> half;
  enumerate_level(dec, bound, f.n - 1, x, Rat(0), true, half);
  return with_negatives_sorted(std::move(half));
}

std::vector<IVec> short_vectors(const QForm& f, const Rat& bound) {
  if (jobs() <= 1) return short_vectors_serial(f, bound);
  if (sign(bound) <= 0) return {};
  LdlT dec = ldlt(f.entries);
  int n = f.n;
  int top = n - 1;
  // candidate range for the outermost coordinate (nonnegative half)
  Rat q = bound / dec.d[top];
  Int t = rat_sqrt_floor(q);
  Int hi = t + 1;
  int count = (int)hi.get_si() + 1;
  std::vector<std::vector<IVec>> chunks(count);
  parallel_for(count, [&](int idx) {
    Int xi = idx;
    Rat term(xi);
    Rat add = dec.d[top] * term * term;
    if (add > bound) return;
    IVec x(n, 0);
    x[top] = xi;
    if (top == 0) {
      if (xi != 0) chunks[idx].push_back(x);
      return;
    }
    enumerate_level(dec, bound, top - 1, x, add, xi == 0, chunks[idx]);
  });
  std::vector<IVec> half;
  for (auto& c : chunks)
    for (auto& v : c) half.push_back(std::move(v));
  return with_negatives_sorted(std::move(half));
}

std::vector<IVec> short_vectors_weighted(const QForm& f, const TemperedWeight& w,
                                         const Rat& bound) {
  Rat raw_bound = bound / w.min_weight();
  std::vector<IVec> raw = short_vectors(f, raw_bound);
  std::vector<IVec> out;
  for (auto& v : raw)
    if (w.weight(v) * f.value(v) <= bound) out.push_back(std::move(v));
  return out;
}

MinimaReport arithmetic_minimum(const QForm& f, const TemperedWeight& w) {
  if (w.dim() != f.n) throw std::invalid_argument("arithmetic_minimum: dimension");
  // upper bound from the standard basis vectors
  Rat c0;
  bool first = true;
  for (int i = 0; i < f.n; i++) {
    IVec e(f.n, 0);
    e[i] = 1;
    Rat val = w.weight(e) * f.value(e);
    if (first || val < c0) {
      c0 = val;
      first = false;
    }
  }
  std::vector<IVec> cand = short_vectors_weighted(f, w, c0);
  Rat best = c0;
  for (const auto& v : cand) {
    Rat val = w.weight(v) * f.value(v);
    if (val < best) best = val;
  }
  MinimaReport rep;
  rep.minimum = best;
  for (auto& v : cand)
    if (w.weight(v) * f.value(v) == best) rep.vectors.push_back(std::move(v));
  std::sort(rep.vectors.begin(), rep.vectors.end(), ivec_lt);
  QMat span = to_qmat(IMat(rep.vectors.begin(), rep.vectors.end()));
  rep.span_rank = q_rank(span);
  return rep;
}

QForm normalize_homothety(const QForm& f, const TemperedWeight& w) {
  MinimaReport rep = arithmetic_minimum(f, w);
  return QForm::from(q_scale(Rat(1) / rep.minimum, f.entries));
}

}  // namespace tempered

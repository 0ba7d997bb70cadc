#include "tempered/signature.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tempered {

namespace {

IVec pair_rep(const IVec& v) {
  for (const Int& x : v) {
    if (x > 0) return v;
    if (x < 0) return ivec_neg(v);
  }
  return v;
}

}  // namespace

Sig canonical_signature(const std::vector<IVec>& vecs) {
  Sig s;
  s.reserve(vecs.size());
  for (const auto& v : vecs) s.push_back(pair_rep(v));
  std::sort(s.begin(), s.end(), ivec_lt);
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Sig sig_transport(const Sig& s, const IMat& h) {
  std::vector<IVec> moved;
  moved.reserve(s.size());
  for (const auto& v : s) moved.push_back(iv_mul(v, h));
  return canonical_signature(moved);
}

std::optional<Sig> sig_transport_q(const Sig& s, const QMat& h) {
  std::vector<IVec> moved;
  moved.reserve(s.size());
  for (const auto& v : s) {
    QVec img = qv_mul(to_qvec(v), h);
    IVec w;
    for (const Rat& x : img) {
      if (x.get_den() != 1) return std::nullopt;
      w.push_back(x.get_num());
    }
    moved.push_back(w);
  }
  return canonical_signature(moved);
}

bool sig_contains(const Sig& s, const IVec& v) {
  IVec r = pair_rep(v);
  return std::binary_search(s.begin(), s.end(), r, ivec_lt);
}

bool sig_subset(const Sig& a, const Sig& b) {
  for (const auto& v : a)
    if (!sig_contains(b, v)) return false;
  return true;
}

int sig_span_rank(const Sig& s) {
  return q_rank(to_qmat(IMat(s.begin(), s.end())));
}

int sig_outer_rank(const Sig& s) {
  if (s.empty()) return 0;
  int n = (int)s[0].size();
  QMat rows_;
  for (const auto& v : s) {
    QVec row;
    row.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; i++)
      for (int j = i; j < n; j++) row.push_back(Rat(v[i] * v[j]));
    rows_.push_back(std::move(row));
  }
  return q_rank(rows_);
}

std::string sig_fingerprint(const Sig& s, int n) {
  std::vector<std::string> dets;
  int m = (int)s.size();
  std::vector<int> idx(n);
  // iterate over n-subsets of the m vectors
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == n) {
      IMat sub;
      for (int i : idx) sub.push_back(s[i]);
      Int d = i_det(sub);
      if (d < 0) d = -d;
      dets.push_back(d.get_str());
      return;
    }
    for (int i = start; i < m; i++) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  if (m >= n) rec(0, 0);
  std::sort(dets.begin(), dets.end());
  std::ostringstream os;
  os << m << "#";
  for (const auto& d : dets) os << d << ",";
  return os.str();
}

std::string sig_str(const Sig& s) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < s.size(); i++) {
    os << (i ? " " : "") << "(";
    for (size_t j = 0; j < s[i].size(); j++)
      os << (j ? "," : "") << s[i][j].get_str();
    os << ")";
  }
  os << "}";
  return os.str();
}

}  // namespace tempered

#pragma once

// Canonical minimal-vector signatures. A signature stores one representative
// per +-pair (first nonzero coordinate positive), sorted lexicographically;
// two cells of a slice agree iff their signatures agree.

#include "tempered/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tempered {

using Sig = std::vector<IVec>;

// from any collection of nonzero vectors (with or without both signs)
Sig canonical_signature(const std::vector<IVec>& vecs);

// canonical signature of s * h (plain right multiplication by h)
Sig sig_transport(const Sig& s, const IMat& h);

// transport by a rational matrix; nullopt when any image is non-integral
std::optional<Sig> sig_transport_q(const Sig& s, const QMat& h);

bool sig_contains(const Sig& s, const IVec& v);
bool sig_subset(const Sig& a, const Sig& b);

// rank of the Q-span of the vectors
int sig_span_rank(const Sig& s);
// rank of the outer products v^T v; the cell dimension is N - this
int sig_outer_rank(const Sig& s);

// cheap GL_n(Z)-invariant fingerprint used to prescreen equivalence tests:
// sorted multiset of |det| over all n-subsets, plus pair count
std::string sig_fingerprint(const Sig& s, int n);

std::string sig_str(const Sig& s);

struct SigLess {
  bool operator()(const Sig& a, const Sig& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); i++) {
      int c = ivec_cmp(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

}  // namespace tempered

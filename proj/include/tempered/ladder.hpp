#pragma once

// The well-tempered sweep.  Events are the parameters s = tau^2 where some
// cell signature gains or loses a vector; between events the slice
// structure is constant.  Vertex forms are affine in t = 1/s, so every
// crossing condition is linear in t and all events are rational.  The
// ladder top is the first integer step past the last event where
// right-multiplication by a carries the s = 1 slice onto the slice
// cell-for-cell.

#include "tempered/chunk.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace tempered {

struct LadderBudget {
  int events = 64;
  int top_steps = 16;
  ChunkBudget chunk;
};

class TemperamentLadder {
 public:
  // a: integral Hecke element with nonzero determinant; M0 = Z^n a
  TemperamentLadder(int n, IMat a, bool with_boundary_contexts = false,
                    LadderBudget budget = {});

  void build();  // enumerate events and detect the top

  int n() const { return n_; }
  const IMat& a() const { return a_; }
  const std::vector<Rat>& events() const { return events_; }
  const Rat& s_top() const { return s_top_; }
  // s_values: 1 = u^(0) < u^(1) < ... < u^(k) = s_top
  const std::vector<Rat>& s_values() const { return s_values_; }
  const std::vector<Rat>& samples() const { return samples_; }
  int stages() const { return (int)s_values_.size() - 1; }

  // slice chunk at an arbitrary s >= 1 (cached); contexts: gamma_a (and the
  // boundary parabolics when requested), plus sl contexts at s = 1
  const Chunk& slice(const Rat& s);

  TemperedWeight weight_at(const Rat& s) const;
  const Context& gamma_a_context() const { return gamma_a_; }
  bool with_boundary() const { return with_boundary_; }

  // the cell bijection at the top: slice(1) signature -> slice(s_top)
  Sig top_image(const Sig& slice1_sig) const;

  // the event-slice cell a sample-slice cell collapses onto as the
  // temperament approaches the event (signatures grow in the limit)
  Sig collapse_to_event(const Rat& event_s, const Sig& sample_sig);

 private:
  int n_;
  IMat a_;
  bool with_boundary_;
  LadderBudget budget_;
  WeightSystem base_;
  Context gamma_a_;
  std::vector<Rat> events_;
  Rat s_top_ = Rat(1);
  std::vector<Rat> s_values_;
  std::vector<Rat> samples_;
  std::map<Rat, std::shared_ptr<Chunk>> cache_;

  std::vector<Context> contexts_for(const Rat& s) const;
  // all crossing parameters produced by the vertices of the slice at s,
  // restricted to the open interval (lo, hi)
  std::vector<Rat> vertex_events(const Rat& s, const Rat& lo, const Rat& hi);
  bool top_bijection_works(const Rat& s_cand);
};

}  // namespace tempered

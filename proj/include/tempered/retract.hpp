#pragma once

// The weighted well-rounded retraction: scale the orthogonal complement of
// the current minimal-vector span until new vectors reach the minimum, and
// iterate until the minima span everything.  Only the squared scale mu^2
// is ever stored, so every form stays rational.

#include "tempered/qform.hpp"
#include "tempered/signature.hpp"

#include <vector>

namespace tempered {

struct MinimaFlag {
  // strictly increasing chain of saturated sublattices, last member Z^n;
  // each given by a full integer basis in HNF
  std::vector<IMat> subspaces;
  void validate(int n) const;
};

struct RetractionStep {
  Rat mu_sq;       // squared scaling factor, in (0,1)
  IMat subspace;   // saturated span of the minima before the step
  QForm form_after;
};

struct RetractionTrace {
  std::vector<RetractionStep> steps;
  QForm result;
  MinimaFlag flag;
};

// one scaling step; requires the form normalized to weighted minimum 1 and
// not yet well rounded
std::pair<Rat, QForm> retraction_step(const QForm& f, const TemperedWeight& w);

RetractionTrace well_rounded_retract(const QForm& f, const TemperedWeight& w);

// canonical signature of a well-rounded form; error if not well rounded
Sig cell_signature(const QForm& f, const TemperedWeight& w);

}  // namespace tempered

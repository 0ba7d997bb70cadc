#pragma once

// Exact rational linear programming (dense two-phase simplex with Bland's
// rule) plus small-dimension polyhedron helpers.  Everything here is sized
// for the tiny systems that arise from cell realization: a handful of free
// variables and a few dozen constraints.

#include "tempered/matrix.hpp"

#include <optional>
#include <vector>

namespace tempered {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status;
  QVec x;     // optimizer (Optimal) or a feasible point (Unbounded)
  QVec ray;   // improving recession direction when Unbounded
  Rat value;  // objective value at x
};

// maximize c.x subject to a[i].x <= b[i] (x free)
LpResult lp_maximize(const QMat& a, const QVec& b, const QVec& c);

// nonzero r with a[i].r <= 0 for all i, if one exists
std::optional<QVec> recession_ray(const QMat& a);

// all vertices of { x : a[i].x <= b[i] }, exact, deduplicated
std::vector<QVec> polytope_vertices(const QMat& a, const QVec& b);

}  // namespace tempered

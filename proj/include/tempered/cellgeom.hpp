#pragma once

// Exact geometry of cells at a fixed tempered weight.  Cells of the retract
// are the bounded faces of the polyhedron { A : weight(v) * A(v) >= 1 } in
// the space of symmetric matrices, indexed by their exact equality set (the
// signature).  Realization and face completion run a cutting-plane loop:
// solve a small rational LP, test the candidate point exactly with the
// short-vector enumerator, and add whatever vector witnesses a violation.

#include "tempered/lp.hpp"
#include "tempered/qform.hpp"
#include "tempered/signature.hpp"

#include <map>
#include <optional>
#include <vector>

namespace tempered {

// coordinates on symmetric matrices: entries (i,j) with i <= j
int sym_dim(int n);
QVec sym_to_coords(const QMat& a);
QMat sym_from_coords(const QVec& x, int n);
// row r with r . coords(A) = v A v^T
QVec sym_value_row(const IVec& v, int n);

// strictly negative direction of a symmetric matrix, if any (exact)
std::optional<IVec> negative_direction(const QMat& a);

struct CellGeometry {
  Sig sig;
  int dim = 0;
  QMat witness;                 // relative interior point, weighted minimum 1
  std::vector<QMat> dirs;       // ordered basis of the direction space
  std::vector<QMat> verts;      // polytope vertices (forms)
  std::vector<Sig> vert_sigs;   // exact signatures of the vertices
  std::vector<Sig> facet_sigs;  // signatures of the codimension-1 faces
};

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class SliceGeometry {
 public:
  explicit SliceGeometry(TemperedWeight w, int budget = 256);

  const TemperedWeight& weight() const { return w_; }
  int n() const { return w_.dim(); }

  // witness with exact minima signature sig (minimum normalized to 1),
  // or nullopt when no such form exists
  std::optional<QMat> realize(const Sig& sig);

  // full polytope data of the closed cell; throws if the cell is not
  // realized.  A known relative-interior point skips the realization LP.
  CellGeometry complete(const Sig& sig,
                        const std::optional<QMat>& witness_hint = std::nullopt);

  // cells of the local star of `cell` (every face of the Ryshkov polyhedron
  // whose closure contains the cell), as signature/witness pairs
  std::vector<std::pair<Sig, QMat>> star_cofaces(const CellGeometry& cell);

  // exact signature of the homothety-normalized form
  Sig locate(const QForm& f) const;

  // relative interior of the closed face { equalities on sig, everything
  // else >= 1 }: returns its exact tight set (= sig plus whatever is
  // identically tight on the face) and an interior witness; nullopt when
  // the face is empty at this weight
  std::optional<std::pair<Sig, QMat>> closure_signature(const Sig& sig);

  // orientation data: [tau : sigma] incidence sign for a facet sigma of tau,
  // given both cells' stored geometry
  static int incidence_sign(const CellGeometry& tau, const CellGeometry& sigma);

  // sign of det of the linear map A -> h^{-1} A h^{-T} restricted to the
  // direction space of src, expressed against dst's basis; src * h must have
  // the signature of dst.  |det h| need not be 1 (semigroup transports).
  static int transport_orientation(const CellGeometry& src, const IMat& h,
                                   const CellGeometry& dst);

 private:
  TemperedWeight w_;
  int budget_;

  Rat rhs(const IVec& v) const;  // 1 / weight(v)

  struct AffinePatch {
    QVec x0;                 // particular solution, sym coords
    std::vector<QVec> dirs;  // kernel basis, sym coords
  };
  std::optional<AffinePatch> solve_equalities(const Sig& sig) const;

  enum class RealizeOutcome { Found, Empty };
  struct RealizeResult {
    RealizeOutcome outcome;
    QMat witness;
  };
  // cutting-plane loop; when boxed, Empty is advisory (the box may clip a
  // genuine cell) and must be confirmed by an unboxed run
  RealizeResult realize_lp(const Sig& sig, const AffinePatch& patch,
                           const std::optional<Rat>& box);

  friend class LadderBuilder;
};

}  // namespace tempered

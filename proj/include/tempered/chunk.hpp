#pragma once

// Chunks: finite closed subcomplexes of the retract at a fixed tempered
// weight, built by a breadth-first walk (vertex -> surrounding cells ->
// their vertices -> ...) with orbit reduction against every marked subgroup
// context.  The walk stops once a full wave discovers no new orbit in any
// context.  Cells are stored with full polytope data, so face relations,
// orientations and incidence numbers are exact and local.

#include "tempered/cellgeom.hpp"
#include "tempered/context.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tempered {

struct OrbitRef {
  int orbit = -1;   // -1 unassigned, -2 out of context scope
  IMat transport;   // rep.sig * transport = cell.sig
};

struct ChunkCell {
  int id = -1;
  Sig sig;
  int dim = 0;
  std::string fingerprint;
  CellGeometry geom;
  std::vector<int> facets;         // cell ids, ascending
  std::vector<OrbitRef> orbit;     // indexed like Chunk::contexts
};

struct StabElement {
  IMat h;
  int orientation = 1;
};

struct Orbit {
  int rep = -1;  // cell id
  int dim = 0;
  std::vector<StabElement> stab;
  bool orientation_reversing = false;
  Int stab_order() const { return Int((long)stab.size()); }
};

struct FacetUse {
  int facet_cell = -1;
  int facet_orbit = -1;
  IMat transport;      // facet_rep.sig * transport = facet.sig
  int incidence = 0;   // [rep : facet] with stored orientations
  int transport_sign = 1;
};

struct OrbitTable {
  std::string context_name;
  std::vector<Orbit> orbits;                      // indexed by orbit id
  std::vector<std::vector<int>> orbits_by_dim;    // dim -> orbit ids
  std::vector<std::vector<FacetUse>> incidence;   // orbit id -> facet uses of rep
};

struct ChunkBudget {
  int waves = 32;
  int cells = 20000;
};

class Chunk {
 public:
  Chunk(TemperedWeight w, std::vector<Context> contexts);

  // breadth-first construction from one or more seed forms (default: the
  // retract of the identity form)
  void build(const std::vector<QForm>& seeds = {}, const ChunkBudget& budget = {});

  const TemperedWeight& weight() const { return weight_; }
  const std::vector<Context>& contexts() const { return contexts_; }
  const std::vector<ChunkCell>& cells() const { return cells_; }
  int context_index(const std::string& name) const;

  int max_dim() const;
  std::optional<int> cell_id(const Sig& sig) const;
  const ChunkCell& cell(int id) const { return cells_[id]; }

  // orbit table with stabilizers, orientation characters and incidence
  OrbitTable orbit_table(const std::string& context_name) const;

  // orbit id + transporter (rep.sig * h = sig) for any cell of the slice,
  // stored in the chunk or not; throws if the signature cannot be resolved
  std::pair<int, IMat> resolve(int ctx_index, const Sig& sig) const;

  // counts per dimension for a context (number of orbits)
  std::vector<int> orbit_counts(const std::string& context_name) const;

  SliceGeometry& geometry() { return geo_; }
  const SliceGeometry& geometry() const { return geo_; }

  int waves_used() const { return waves_used_; }

 private:
  TemperedWeight weight_;
  std::vector<Context> contexts_;
  SliceGeometry geo_;
  std::vector<ChunkCell> cells_;
  std::map<Sig, int, SigLess> index_;
  std::vector<std::vector<int>> orbit_reps_;  // per context: orbit -> cell id
  int waves_used_ = 0;
  mutable std::vector<std::map<Sig, std::pair<int, IMat>, SigLess>> resolve_cache_;

  int store_cell(const Sig& sig,
                 const std::optional<QMat>& witness = std::nullopt);
  bool in_scope(const Context& ctx, const Sig& sig) const;
  // assign orbits for cells [from, cells_.size()); returns number of new orbits
  int assign_orbits(size_t from);
};

}  // namespace tempered

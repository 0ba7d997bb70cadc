#include "tempered/chunk.hpp"

#include "tempered/parallel.hpp"
#include "tempered/retract.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tempered {

Chunk::Chunk(TemperedWeight w, std::vector<Context> contexts)
    : weight_(std::move(w)), contexts_(std::move(contexts)), geo_(weight_) {
  if (contexts_.empty()) throw std::invalid_argument("Chunk: no contexts");
  orbit_reps_.resize(contexts_.size());
  resolve_cache_.resize(contexts_.size());
}

int Chunk::context_index(const std::string& name) const {
  for (size_t i = 0; i < contexts_.size(); i++)
    if (contexts_[i].name == name) return (int)i;
  throw std::invalid_argument("Chunk: unknown context " + name);
}

int Chunk::max_dim() const {
  int d = 0;
  for (const auto& c : cells_) d = std::max(d, c.dim);
  return d;
}

std::optional<int> Chunk::cell_id(const Sig& sig) const {
  auto it = index_.find(sig);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Chunk::in_scope(const Context& ctx, const Sig& sig) const {
  if (!ctx.flag) return true;
  return sig_in_flag_subcomplex(sig, *ctx.flag);
}

int Chunk::store_cell(const Sig& sig, const std::optional<QMat>& witness) {
  auto it = index_.find(sig);
  if (it != index_.end()) return it->second;
  CellGeometry geom = geo_.complete(sig, witness);
  ChunkCell cell;
  cell.id = (int)cells_.size();
  cell.sig = sig;
  cell.dim = geom.dim;
  cell.fingerprint = sig_fingerprint(sig, weight_.dim());
  cell.geom = std::move(geom);
  cell.orbit.resize(contexts_.size());
  index_[sig] = cell.id;
  cells_.push_back(std::move(cell));
  int id = cells_.back().id;
  // closure: store every facet as a cell; the barycenter of a facet's
  // vertex set is a ready-made interior witness.  Copy what we need first:
  // the recursive calls below may reallocate cells_.
  std::vector<Sig> facet_sigs = cells_[id].geom.facet_sigs;
  std::vector<QMat> verts = cells_[id].geom.verts;
  std::vector<Sig> vert_sigs = cells_[id].geom.vert_sigs;
  std::vector<int> facet_ids;
  for (const Sig& fs : facet_sigs) {
    std::optional<QMat> fw;
    QMat acc;
    int count = 0;
    for (size_t vi = 0; vi < verts.size(); vi++) {
      if (!sig_subset(fs, vert_sigs[vi])) continue;
      acc = acc.empty() ? verts[vi] : q_add(acc, verts[vi]);
      count++;
    }
    if (count > 0) fw = q_scale(Rat(1, count), acc);
    int fid = store_cell(fs, fw);
    facet_ids.push_back(fid);
  }
  std::sort(facet_ids.begin(), facet_ids.end());
  cells_[id].facets = facet_ids;
  return id;
}

int Chunk::assign_orbits(size_t from) {
  int new_orbits = 0;
  for (size_t ci = 0; ci < contexts_.size(); ci++) {
    const Context& ctx = contexts_[ci];
    // phase A: match new cells against existing representatives in parallel
    std::vector<int> pending;
    for (size_t id = from; id < cells_.size(); id++) {
      if (!in_scope(ctx, cells_[id].sig)) {
        cells_[id].orbit[ci] = {-2, {}};
        continue;
      }
      pending.push_back((int)id);
    }
    if (ctx.trivial_group) {
      // every cell is its own orbit; bookkeeping only, never drives the walk
      for (int id : pending) {
        orbit_reps_[ci].push_back(id);
        cells_[id].orbit[ci] = {(int)orbit_reps_[ci].size() - 1,
                                i_identity(weight_.dim())};
      }
      continue;
    }
    std::vector<std::pair<int, IMat>> match(pending.size(), {-1, {}});
    parallel_for((int)pending.size(), [&](int k) {
      const ChunkCell& c = cells_[pending[k]];
      for (size_t ob = 0; ob < orbit_reps_[ci].size(); ob++) {
        const ChunkCell& rep = cells_[orbit_reps_[ci][ob]];
        if (rep.dim != c.dim || rep.fingerprint != c.fingerprint) continue;
        auto h = cell_equivalent(rep.sig, c.sig, ctx);
        if (h) {
          match[k] = {(int)ob, *h};
          break;
        }
      }
    });
    // phase B: place the unmatched, serially (they may be mutually equivalent)
    for (size_t k = 0; k < pending.size(); k++) {
      int id = pending[k];
      if (match[k].first >= 0) {
        cells_[id].orbit[ci] = {match[k].first, match[k].second};
        continue;
      }
      bool placed = false;
      for (size_t ob = orbit_reps_[ci].size(); ob-- > 0;) {
        const ChunkCell& rep = cells_[orbit_reps_[ci][ob]];
        if (rep.dim != cells_[id].dim || rep.fingerprint != cells_[id].fingerprint)
          continue;
        if (rep.id < (int)from) break;  // older reps were already tested in phase A
        auto h = cell_equivalent(rep.sig, cells_[id].sig, ctx);
        if (h) {
          cells_[id].orbit[ci] = {(int)ob, *h};
          placed = true;
          break;
        }
      }
      if (!placed) {
        orbit_reps_[ci].push_back(id);
        cells_[id].orbit[ci] = {(int)orbit_reps_[ci].size() - 1, i_identity(weight_.dim())};
        new_orbits++;
      }
    }
  }
  return new_orbits;
}

void Chunk::build(const std::vector<QForm>& seeds, const ChunkBudget& budget) {
  const bool debug = std::getenv("TEMPERED_DEBUG") != nullptr;
  std::vector<QForm> seed_forms = seeds;
  if (seed_forms.empty()) seed_forms.push_back(QForm::identity(weight_.dim()));

  size_t assigned_from = 0;
  for (const QForm& s : seed_forms) {
    RetractionTrace trace = well_rounded_retract(s, weight_);
    Sig sig = geo_.locate(trace.result);
    store_cell(sig, trace.result.entries);
  }
  assign_orbits(assigned_from);
  assigned_from = cells_.size();

  std::set<int> expanded;
  for (int wave = 1; wave <= budget.waves; wave++) {
    waves_used_ = wave;
    // frontier: vertices worth expanding (their orbit has no expanded member
    // in at least one context)
    std::vector<std::vector<char>> orbit_expanded(contexts_.size());
    for (size_t ci = 0; ci < contexts_.size(); ci++)
      orbit_expanded[ci].assign(orbit_reps_[ci].size(), 0);
    for (int id : expanded)
      for (size_t ci = 0; ci < contexts_.size(); ci++)
        if (cells_[id].orbit[ci].orbit >= 0)
          orbit_expanded[ci][cells_[id].orbit[ci].orbit] = 1;

    std::vector<int> frontier;
    for (const auto& c : cells_) {
      if (c.dim != 0 || expanded.count(c.id)) continue;
      bool fresh = false;
      for (size_t ci = 0; ci < contexts_.size(); ci++) {
        if (contexts_[ci].trivial_group) continue;
        int ob = c.orbit[ci].orbit;
        if (ob >= 0 && !orbit_expanded[ci][ob]) {
          fresh = true;
          break;
        }
      }
      if (fresh) frontier.push_back(c.id);
    }
    if (frontier.empty()) return;

    if (debug)
      fprintf(stderr, "[chunk] wave %d: expanding %zu vertices (%zu cells so far)\n",
              wave, frontier.size(), cells_.size());
    for (int vid : frontier) {
      // skip vertices whose orbits were all covered earlier in this wave
      bool still_fresh = false;
      for (size_t ci = 0; ci < contexts_.size(); ci++) {
        if (contexts_[ci].trivial_group) continue;
        int ob = cells_[vid].orbit[ci].orbit;
        if (ob >= 0 && !orbit_expanded[ci][ob]) {
          still_fresh = true;
          break;
        }
      }
      if (!still_fresh) continue;
      expanded.insert(vid);
      for (size_t ci = 0; ci < contexts_.size(); ci++) {
        int ob = cells_[vid].orbit[ci].orbit;
        if (ob >= 0) orbit_expanded[ci][ob] = 1;
      }
      auto star = geo_.star_cofaces(cells_[vid].geom);
      for (const auto& [sig, witness] : star) {
        store_cell(sig, witness);
        if ((int)cells_.size() > budget.cells)
          throw BudgetExceeded("chunk build: cell budget exceeded");
      }
    }
    if (debug)
      fprintf(stderr, "[chunk] wave %d: stars done, %zu cells, reducing orbits...\n",
              wave, cells_.size());
    int added = assign_orbits(assigned_from);
    assigned_from = cells_.size();
    if (debug) {
      fprintf(stderr, "[chunk] wave %d: %d new orbits; counts per ctx:", wave, added);
      for (size_t ci = 0; ci < contexts_.size(); ci++)
        fprintf(stderr, " %zu", orbit_reps_[ci].size());
      fprintf(stderr, "\n");
    }
    if (added == 0) return;  // a full wave discovered nothing new
  }
  throw BudgetExceeded("chunk build: wave budget exceeded");
}

OrbitTable Chunk::orbit_table(const std::string& context_name) const {
  int ci = context_index(context_name);
  const Context& ctx = contexts_[ci];
  OrbitTable table;
  table.context_name = context_name;
  table.orbits_by_dim.assign(max_dim() + 1, {});
  for (size_t ob = 0; ob < orbit_reps_[ci].size(); ob++) {
    const ChunkCell& rep = cells_[orbit_reps_[ci][ob]];
    Orbit orbit;
    orbit.rep = rep.id;
    orbit.dim = rep.dim;
    for (const IMat& h : stabilizer(rep.sig, ctx)) {
      StabElement el;
      el.h = h;
      el.orientation =
          rep.dim == 0 ? 1 : SliceGeometry::transport_orientation(rep.geom, h, rep.geom);
      if (el.orientation < 0) orbit.orientation_reversing = true;
      orbit.stab.push_back(std::move(el));
    }
    table.orbits_by_dim[rep.dim].push_back((int)ob);
    table.orbits.push_back(std::move(orbit));
  }
  // incidence of each representative against its facets
  table.incidence.resize(table.orbits.size());
  for (size_t ob = 0; ob < table.orbits.size(); ob++) {
    const ChunkCell& rep = cells_[table.orbits[ob].rep];
    for (int fid : rep.facets) {
      const ChunkCell& facet = cells_[fid];
      if (facet.orbit[ci].orbit < 0) continue;  // facet outside context scope
      FacetUse use;
      use.facet_cell = fid;
      use.facet_orbit = facet.orbit[ci].orbit;
      use.transport = facet.orbit[ci].transport;
      use.incidence = SliceGeometry::incidence_sign(rep.geom, facet.geom);
      const ChunkCell& facet_rep = cells_[orbit_reps_[ci][use.facet_orbit]];
      use.transport_sign =
          facet.dim == 0
              ? 1
              : SliceGeometry::transport_orientation(facet_rep.geom, use.transport,
                                                     facet.geom);
      table.incidence[ob].push_back(std::move(use));
    }
  }
  return table;
}

std::pair<int, IMat> Chunk::resolve(int ctx_index, const Sig& sig) const {
  auto it = index_.find(sig);
  if (it != index_.end()) {
    const OrbitRef& ref = cells_[it->second].orbit[ctx_index];
    if (ref.orbit < 0)
      throw std::logic_error("resolve: cell outside context scope");
    return {ref.orbit, ref.transport};
  }
  auto cached = resolve_cache_[ctx_index].find(sig);
  if (cached != resolve_cache_[ctx_index].end()) return cached->second;
  const Context& ctx = contexts_[ctx_index];
  std::string fp = sig_fingerprint(sig, weight_.dim());
  for (size_t ob = 0; ob < orbit_reps_[ctx_index].size(); ob++) {
    const ChunkCell& rep = cells_[orbit_reps_[ctx_index][ob]];
    if (rep.fingerprint != fp) continue;
    auto h = cell_equivalent(rep.sig, sig, ctx);
    if (h) {
      auto value = std::make_pair((int)ob, *h);
      resolve_cache_[ctx_index][sig] = value;
      return value;
    }
  }
  throw std::logic_error("resolve: signature not equivalent to any orbit rep: " +
                         sig_str(sig));
}

std::vector<int> Chunk::orbit_counts(const std::string& context_name) const {
  int ci = context_index(context_name);
  std::vector<int> counts(max_dim() + 1, 0);
  for (int cell_id : orbit_reps_[ci]) counts[cells_[cell_id].dim]++;
  return counts;
}

}  // namespace tempered

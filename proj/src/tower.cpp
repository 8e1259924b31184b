#include "mbx/tower.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace mbx {

TowerLevel tower_over(const ClopenSet& V, const std::vector<ClopenSet>& bases,
                      long long scan_cap) {
  auto sys = V.system();
  TowerLevel t;
  t.system = sys;
  t.V = V;

  // first-return height per base, computed exactly; the scan also certifies
  // the intermediate floors stay out of V
  std::vector<std::pair<ClopenSet, long long>> staged;
  for (const auto& B0 : bases) {
    long long h = 0;
    for (long long n = 1; n <= scan_cap; ++n) {
      ClopenSet img = sys->is_subshift() ? B0.image(n) : B0.image2({n, 0});
      if (img.intersects(V)) {
        require(img.subset_of(V), Err::NonconstantHeight,
                "first-return time varies across a base block");
        h = n;
        break;
      }
    }
    require(h >= 1, Err::NonconstantHeight, "no return within the scan cap");
    if (sys->is_subshift()) {
      // split by journey profile so tiles are pinned (no-op on blocks whose
      // itinerary already forces the symbols)
      const auto& sub = sys->sub();
      ClopenSet deep = B0.is_whole()
                           ? ClopenSet::whole(sys).expanded(0, static_cast<size_t>(h))
                           : B0.expanded(std::min(0LL, B0.anchor()),
                                         std::max<size_t>(B0.word_len() +
                                                              static_cast<size_t>(
                                                                  B0.anchor() < 0 ? -B0.anchor()
                                                                                  : 0),
                                                          static_cast<size_t>(h)));
      std::map<std::pair<int32_t, int32_t>, std::vector<size_t>> by_profile;
      size_t base_from = static_cast<size_t>(-std::min(0LL, deep.anchor()));
      for (size_t p : deep.word_positions())
        by_profile[sub.index().key(p + base_from, static_cast<size_t>(h))].push_back(p);
      for (auto& [k, words] : by_profile)
        staged.push_back({ClopenSet::from_words(sys, deep.anchor(), deep.word_len(), words), h});
    } else {
      staged.push_back({B0, h});
    }
  }

  for (auto& [B, h] : staged) t.bases.push_back(B);
  for (size_t c = 0; c < staged.size(); ++c) {
    const auto& [B, h] = staged[c];
    ReebColumn col;
    col.base = c;
    col.height = h;
    if (sys->is_subshift()) {
      const auto& sub = sys->sub();
      size_t from = static_cast<size_t>(-std::min(0LL, B.anchor()));
      size_t p = B.word_positions().front() + from;
      Rat len(0);
      for (long long j = 0; j < h; ++j) {
        Sym s = sub.symbol_at(p + static_cast<size_t>(j));
        col.profile.push_back(s);
        len += sub.tile(s);
      }
      col.length = len;
    } else {
      col.length = Rat(h);
    }
    ClopenSet ret = sys->is_subshift() ? B.image(h) : B.image2({h, 0});
    for (size_t c2 = 0; c2 < t.bases.size(); ++c2)
      if (ret.intersects(t.bases[c2])) col.exits.push_back(c2);
    require(!col.exits.empty(), Err::NonconstantHeight, "return slice misses every base");
    t.columns.push_back(std::move(col));
  }

  // exact slice bound for this tower
  Rat slice(0);
  for (size_t c = 0; c < t.columns.size(); ++c) {
    Rat d = t.bases[c].diameter();
    slice = std::max(slice, std::min(Rat(1), d * pow2(t.columns[c].height - 1)));
  }
  t.slice_bound = slice;
  t.class_bound = std::max(slice, V.diameter());
  return t;
}

TowerLevel build_tower(const LevelData& lv) {
  auto t = tower_over(lv.V, lv.flat_fine_blocks());
  t.level = lv.level;
  // the level's own slice bound must dominate the tower's exact one
  require(t.slice_bound <= lv.constants.delta_hat_slice, Err::NonconstantHeight,
          "slice bound drifted from the level constants");
  t.slice_bound = lv.constants.delta_hat_slice;
  t.class_bound = std::max(lv.constants.delta_hat_slice, lv.V.diameter());
  return t;
}

TowerLevel return_tower(const ClopenSet& V) {
  auto rs = induced_generators(V);
  std::vector<ClopenSet> bases;
  for (const auto& g : rs.generators) bases.push_back(g.domain);
  return tower_over(V, bases);
}

// ---------------------------------------------------------------------------
// equivalence store
// ---------------------------------------------------------------------------

EquivalenceStore::EquivalenceStore(const std::vector<long long>& heights) {
  size_t total = 0;
  for (long long h : heights) {
    offset_.push_back(total);
    total += static_cast<size_t>(h) + 1;
  }
  parent_.resize(total);
  std::iota(parent_.begin(), parent_.end(), size_t(0));
}

size_t EquivalenceStore::slot(size_t column, long long boundary) const {
  return offset_[column] + static_cast<size_t>(boundary);
}

size_t EquivalenceStore::find(size_t s) const {
  while (parent_[s] != s) {
    parent_[s] = parent_[parent_[s]];
    s = parent_[s];
  }
  return s;
}

void EquivalenceStore::unite(size_t a, size_t b) {
  a = find(a);
  b = find(b);
  if (a != b) parent_[std::max(a, b)] = std::min(a, b);
}

size_t EquivalenceStore::class_count() const {
  size_t n = 0;
  for (size_t s = 0; s < parent_.size(); ++s)
    if (find(s) == s) ++n;
  return n;
}

std::vector<size_t> EquivalenceStore::class_of_all() const {
  std::vector<size_t> out(parent_.size());
  for (size_t s = 0; s < parent_.size(); ++s) out[s] = find(s);
  return out;
}

EquivalenceStore equivalence_closure(const TowerLevel& t) {
  std::vector<long long> heights;
  for (const auto& c : t.columns) heights.push_back(c.height);
  EquivalenceStore uf(heights);
  for (size_t c = 0; c < t.columns.size(); ++c)
    for (size_t e : t.columns[c].exits)
      uf.unite(uf.slot(c, t.columns[c].height), uf.slot(e, 0));
  return uf;
}

// ---------------------------------------------------------------------------
// collapse / simplify
// ---------------------------------------------------------------------------

long long BranchedComplex::euler_raw() const {
  if (dim == 2) return vertices2 - edges2 + squares;
  return raw_vertices - raw_edges;
}

long long BranchedComplex::euler_simplified() const {
  if (dim == 2) return vertices2 - edges2 + squares;
  long long e = 0;
  for (const auto& ed : edges) e += 1;
  return static_cast<long long>(vertices) - e;
}

bool BranchedComplex::is_circle() const {
  if (!simplified || dim != 1) return false;
  if (edges.size() == 1) return edges[0].src == edges[0].dst && vertices == 1;
  // a cycle through distinct vertices
  if (edges.size() != vertices) return false;
  std::vector<int> in(vertices, 0), out(vertices, 0);
  for (const auto& e : edges) {
    ++out[e.src];
    ++in[e.dst];
  }
  for (size_t v = 0; v < vertices; ++v)
    if (in[v] != 1 || out[v] != 1) return false;
  return true;
}

BranchedComplex collapse(const TowerLevel& t) {
  BranchedComplex bc;
  bc.dim = 1;
  bc.system = t.system;
  bc.level = t.level;
  auto uf = equivalence_closure(t);

  // boundary classes over V plus one vertex per interior boundary
  std::map<size_t, size_t> class_id;
  for (size_t c = 0; c < t.columns.size(); ++c) {
    for (long long k : {0LL, t.columns[c].height}) {
      size_t root = uf.find(uf.slot(c, k));
      if (!class_id.count(root)) class_id[root] = class_id.size();
    }
  }
  bc.boundary_classes = class_id.size();
  long long interior = 0;
  for (const auto& c : t.columns) interior += c.height - 1;
  bc.raw_vertices = static_cast<long long>(bc.boundary_classes) + interior;
  bc.raw_edges = 0;
  for (const auto& c : t.columns) bc.raw_edges += c.height;

  const auto& alphabet_sys = t.system;
  for (const auto& c : t.columns) {
    size_t src = class_id.at(uf.find(uf.slot(c.base, 0)));
    size_t dst = class_id.at(uf.find(uf.slot(c.base, c.height)));
    bc.col_src.push_back(src);
    bc.col_dst.push_back(dst);
    bc.col_height.push_back(c.height);
    bc.col_length.push_back(c.length);
    std::string label;
    if (alphabet_sys->is_subshift())
      for (Sym s : c.profile) label += alphabet_sys->sub().alphabet().name(s);
    else
      label = std::to_string(c.height);
    bc.col_label.push_back(label);
  }

  // internal soundness: the fibers of the quotient are exactly the closure's
  // classes; every slot maps to a unique complex cell
  require(class_id.size() <= uf.class_count(), Err::GlueMismatch, "class bookkeeping drifted");
  return bc;
}

BranchedComplex simplify(const BranchedComplex& c) {
  require(c.dim == 1, Err::BadSpec, "simplify applies to graph complexes");
  BranchedComplex out = c;
  size_t n = c.boundary_classes;
  std::vector<std::vector<size_t>> outgoing(n), incoming(n);
  for (size_t e = 0; e < c.col_src.size(); ++e) {
    outgoing[c.col_src[e]].push_back(e);
    incoming[c.col_dst[e]].push_back(e);
  }
  std::vector<bool> keep(n, false);
  for (size_t v = 0; v < n; ++v)
    keep[v] = outgoing[v].size() != 1 || incoming[v].size() != 1;
  // cycles with no branch vertex keep their least vertex as a basepoint
  std::vector<bool> seen(n, false);
  for (size_t v0 = 0; v0 < n; ++v0) {
    if (seen[v0] || keep[v0]) continue;
    size_t least = v0;
    size_t v = v0;
    bool branchless = true;
    std::vector<size_t> cyc;
    while (!seen[v]) {
      seen[v] = true;
      cyc.push_back(v);
      least = std::min(least, v);
      v = c.col_dst[outgoing[v][0]];
      if (keep[v]) { branchless = false; break; }
    }
    if (branchless) keep[least] = true;
  }

  std::vector<size_t> vid(n, SIZE_MAX);
  size_t next = 0;
  for (size_t v = 0; v < n; ++v)
    if (keep[v]) vid[v] = next++;
  out.vertices = next;
  out.edges.clear();
  out.column_pos.assign(c.col_src.size(), {SIZE_MAX, SIZE_MAX});
  for (size_t e0 = 0; e0 < c.col_src.size(); ++e0) {
    if (!keep[c.col_src[e0]]) continue;
    // walk the chain starting with column e0
    GraphEdge ge;
    ge.src = vid[c.col_src[e0]];
    ge.length = Rat(0);
    size_t e = e0;
    while (true) {
      ge.columns.push_back(e);
      ge.length += c.col_length[e];
      ge.steps += c.col_height[e];
      ge.label += (ge.label.empty() ? "" : "|") + c.col_label[e];
      size_t v = c.col_dst[e];
      if (keep[v]) {
        ge.dst = vid[v];
        break;
      }
      e = outgoing[v][0];
    }
    for (size_t i = 0; i < ge.columns.size(); ++i) out.column_pos[ge.columns[i]] = {out.edges.size(), i};
    out.edges.push_back(std::move(ge));
  }
  // deterministic edge order: by (src, dst, label)
  std::vector<size_t> order(out.edges.size());
  std::iota(order.begin(), order.end(), size_t(0));
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& ea = out.edges[a];
    const auto& eb = out.edges[b];
    return std::tie(ea.src, ea.dst, ea.label) < std::tie(eb.src, eb.dst, eb.label);
  });
  std::vector<GraphEdge> sorted;
  std::vector<size_t> where(out.edges.size());
  for (size_t i = 0; i < order.size(); ++i) {
    where[order[i]] = i;
    sorted.push_back(out.edges[order[i]]);
  }
  out.edges = std::move(sorted);
  for (auto& cp : out.column_pos)
    if (cp.first != SIZE_MAX) cp.first = where[cp.first];
  out.simplified = true;
  return out;
}

BranchedComplex torus_complex(const LevelData& lv) {
  auto sys = lv.V.system();
  require(!sys->is_subshift() && sys->odo().dimension() == 2, Err::BadSpec,
          "torus complexes come from Z^2 odometer levels");
  const auto& od = sys->odo();
  size_t level = lv.V.is_whole() ? 0 : lv.V.level();
  BranchedComplex bc;
  bc.dim = 2;
  bc.system = sys;
  bc.level = lv.level;
  bc.lattice = od.basis(level);
  bc.squares = od.index_at(level);
  bc.edges2 = 2 * bc.squares;
  bc.vertices2 = bc.squares;
  return bc;
}

// ---------------------------------------------------------------------------
// verification reports
// ---------------------------------------------------------------------------

CoveringReport check_leaf_covering(const TowerLevel& t, const CantorPoint& w0,
                                   const Rat& horizon) {
  CoveringReport rep;
  auto sys = t.system;
  // locate the entry of w0's journey: the most recent V-visit at or before 0
  long long k0 = 0;
  bool found = false;
  for (long long k = 0; k <= 1 << 16; ++k) {
    if (t.V.contains(w0.translated(-k))) {
      k0 = k;
      found = true;
      break;
    }
  }
  require(found, Err::DepthInsufficient, "basepoint leaf does not meet V backwards");
  CantorPoint x = w0.translated(-k0);
  Rat pos = -leaf_displacement(x, k0);
  (void)pos;
  Rat covered(0);
  long long guard = 1 << 22;
  while (covered < horizon && guard-- > 0) {
    // find the base block holding x; exactly one must contain it
    size_t hit = SIZE_MAX;
    for (size_t c = 0; c < t.bases.size(); ++c)
      if (t.bases[c].contains(x)) {
        require(hit == SIZE_MAX, Err::GlueMismatch, "point in two base blocks");
        hit = c;
      }
    require(hit != SIZE_MAX, Err::GlueMismatch, "leaf point outside every base block");
    const auto& col = t.columns[hit];
    // the column's cells tile the journey contiguously
    if (sys->is_subshift()) {
      const auto& sub = sys->sub();
      for (long long j = 0; j < col.height; ++j) {
        require(col.profile[static_cast<size_t>(j)] == x.coord(j), Err::GlueMismatch,
                "tile profile mismatch along the leaf");
        ++rep.cells;
      }
    } else {
      rep.cells += col.height;
    }
    covered += leaf_displacement(x, col.height);
    x = x.translated(col.height);
    require(t.V.contains(x), Err::GlueMismatch, "journey does not land in V");
  }
  rep.ok = covered >= horizon;
  rep.covered = covered;
  return rep;
}

ClassDiameterReport check_class_diameters(const TowerLevel& t) {
  ClassDiameterReport rep;
  rep.max_cell_slice = Rat(0);
  rep.max_class = Rat(0);
  auto sys = t.system;
  auto uf = equivalence_closure(t);
  std::map<size_t, ClopenSet> class_union;
  for (size_t c = 0; c < t.columns.size(); ++c) {
    const auto& B = t.bases[c];
    for (long long k = 0; k <= t.columns[c].height; ++k) {
      ClopenSet slice = sys->is_subshift() ? B.image(k) : B.image2({k, 0});
      if (k > 0 && k < t.columns[c].height)
        rep.max_cell_slice = std::max(rep.max_cell_slice, slice.diameter());
      size_t root = uf.find(uf.slot(c, k));
      auto it = class_union.find(root);
      if (it == class_union.end())
        class_union.emplace(root, slice);
      else
        it->second = unite(it->second, slice);
    }
  }
  for (auto& [root, u] : class_union)
    rep.max_class = std::max(rep.max_class, u.diameter());
  rep.within_bounds = rep.max_cell_slice <= t.slice_bound && rep.max_class <= t.class_bound;
  return rep;
}

}  // namespace mbx

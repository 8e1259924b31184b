#pragma once

#include <array>

#include "mbx/coding.hpp"

namespace mbx {

// Reeb column: a base block of the level's partition of V together with its
// first-return journey. Heights and symbol profiles are constant across the
// base block; the base partition refines the level's fine blocks by the
// journey profile when the alphabet alone does not force it.
struct ReebColumn {
  size_t base = 0;  // index into TowerLevel::bases
  long long height = 0;
  Rat length;
  std::vector<Sym> profile;    // tile symbols along the journey (subshift)
  std::vector<size_t> exits;   // bases met by the return slice
};

struct TowerLevel {
  SystemPtr system;
  size_t level = 1;
  ClopenSet V;
  std::vector<ClopenSet> bases;  // partition of V
  std::vector<ReebColumn> columns;
  Rat slice_bound;   // sharp per-level bound on cell slice diameters
  Rat class_bound;   // a-priori bound on equivalence-class diameters
};

// tower over an explicit base partition of V; heights, profiles, and exits
// are computed exactly (bases split by journey profile when needed)
TowerLevel tower_over(const ClopenSet& V, const std::vector<ClopenSet>& bases,
                      long long scan_cap = 1 << 20);

// tower over the level's fine blocks (the hierarchy pipeline)
TowerLevel build_tower(const LevelData& lv);

// Kakutani-Rokhlin tower over the first-return partition of V; this is the
// flavor whose collapsed complexes carry the classical transition matrices
TowerLevel return_tower(const ClopenSet& V);

// union-find over column boundary slots implementing the chain closure of
// the per-column end/start identifications
class EquivalenceStore {
 public:
  explicit EquivalenceStore(const std::vector<long long>& heights);
  size_t slot(size_t column, long long boundary) const;  // 0 <= boundary <= h
  size_t find(size_t s) const;
  void unite(size_t a, size_t b);
  size_t slots() const { return parent_.size(); }
  size_t class_count() const;
  std::vector<size_t> class_of_all() const;  // canonical class id per slot

 private:
  mutable std::vector<size_t> parent_;
  std::vector<size_t> offset_;
};

EquivalenceStore equivalence_closure(const TowerLevel& t);

struct GraphEdge {
  size_t src = 0, dst = 0;
  Rat length;
  long long steps = 0;
  std::string label;
  std::vector<size_t> columns;  // constituent columns, in order
};

// d=1: directed multigraph; d=2 (Z^2 odometer): the quotient torus square
// complex. The raw form (cells as unit edges) is kept as counts plus the
// class-level column graph; simplify() collapses valence-2 vertices.
struct BranchedComplex {
  int dim = 1;
  SystemPtr system;
  size_t level = 1;

  // raw counts: cells are edges, boundaries are vertices
  long long raw_edges = 0;
  long long raw_vertices = 0;
  size_t boundary_classes = 0;

  // class-level graph: one edge per column
  std::vector<size_t> col_src, col_dst;
  std::vector<long long> col_height;
  std::vector<Rat> col_length;
  std::vector<std::string> col_label;

  // simplified graph
  bool simplified = false;
  size_t vertices = 0;
  std::vector<GraphEdge> edges;
  std::vector<std::pair<size_t, size_t>> column_pos;  // column -> (edge, index in chain)

  // d=2 torus data: quotient lattice rows and cell counts
  std::array<long long, 4> lattice{1, 0, 0, 1};
  long long squares = 0, edges2 = 0, vertices2 = 0;

  long long euler_raw() const;
  long long euler_simplified() const;
  bool is_circle() const;  // simplified form is a single loop
};

// quotient of the tower by collapsing transversal fibers; GLUE_MISMATCH is an
// internal soundness failure and never fires for well-built towers
BranchedComplex collapse(const TowerLevel& t);

BranchedComplex simplify(const BranchedComplex& c);

// d=2 odometer levels quotient to tori directly
BranchedComplex torus_complex(const LevelData& lv);

struct CoveringReport {
  bool ok = false;
  Rat covered;        // leafwise length verified
  long long cells = 0;
};

// exact interval accounting of the basepoint leaf window [0, horizon)
CoveringReport check_leaf_covering(const TowerLevel& t, const CantorPoint& w0,
                                   const Rat& horizon);

struct ClassDiameterReport {
  Rat max_cell_slice;   // max transversal diameter over cell slices
  Rat max_class;        // max transversal diameter over boundary classes
  bool within_bounds = false;
};

ClassDiameterReport check_class_diameters(const TowerLevel& t);

}  // namespace mbx

#pragma once

#include <vector>

#include "mbx/delone.hpp"

namespace mbx {

// Voronoi cell of a net site; intervals for d=1, convex polygons for d=2.
// Cells are closed and may share boundary points. Cells clipped by the
// window boundary are not "interior" and are excluded from the lemma checks.
struct VoronoiCell {
  size_t site = 0;
  // d = 1
  Rat lo, hi;
  // d = 2
  Polygon poly;
  bool clipped = false;   // touches the window boundary
  bool interior = false;  // whole star stays inside the window
};

struct VoronoiDiagram {
  const DeloneNet* source = nullptr;
  int dim = 1;
  Rat window;
  std::vector<VoronoiCell> cells;
};

VoronoiDiagram cells(const DeloneNet& net);

struct StarNeighborhood {
  size_t site = 0;
  std::vector<size_t> vertex_set;  // sites whose cells touch cell(site)
  // union geometry: d=1 interval hull; d=2 the list of member cells
  Rat lo, hi;
  std::vector<Polygon> polys;
};

StarNeighborhood star(const VoronoiDiagram& vd, size_t site);

// Voronoi cell reconstructed as star  ∩  half-spaces over the vertex set
// only; exact equality with the direct cell is the point of the exercise
struct HalfspaceForm {
  Rat lo, hi;
  Polygon poly;
  bool equals_cell = false;
};

HalfspaceForm halfspace_form(const VoronoiDiagram& vd, size_t site);

struct CellBound {
  size_t site = 0;
  bool diameter_ok = false;   // diam(cell) <= 2 e_W
  bool inner_ball_ok = false; // ball(site, lambda1/2) inside the cell
  bool star_ball_ok = false;  // star inside ball(site, 3 e_W)
  bool star_interior_ok = false;  // cell inside the interior of its star
};

struct CellBoundsReport {
  std::vector<CellBound> per_cell;
  bool all_ok = false;
};

CellBoundsReport check_cell_bounds(const VoronoiDiagram& vd, const NetStats& st);

// geometry dump: one cell per line
std::string dump_cells(const VoronoiDiagram& vd);

// synthetic nets for geometry-only work (no dynamics attached)
DeloneNet synthetic_net(std::vector<Rat> positions, const Rat& radius);
DeloneNet synthetic_net2(std::vector<Vec2R> positions, const Rat& radius);

// Dual-route check: halfplane-clipped cells against brute-force nearest-site
// classification of a dense rational grid, plus the half-space identity on
// interior cells and exact tessellation accounting.
struct OracleOutcome {
  size_t nets = 0;
  size_t grid_points = 0;
  size_t mismatches = 0;
  size_t halfspace_failures = 0;
  size_t accounting_failures = 0;
};
OracleOutcome voronoi_oracle_run(uint64_t seed, size_t nets, size_t max_sites, size_t grid);

}  // namespace mbx

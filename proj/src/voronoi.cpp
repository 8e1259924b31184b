#include "mbx/voronoi.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace mbx {

VoronoiDiagram cells(const DeloneNet& net) {
  require(net.points.size() >= 2, Err::SingletonNet, "tessellation needs at least two sites");
  VoronoiDiagram vd;
  vd.source = &net;
  vd.dim = net.dim;
  vd.window = net.radius;
  size_t n = net.points.size();
  if (net.dim == 1) {
    for (size_t i = 0; i < n; ++i) {
      VoronoiCell c;
      c.site = i;
      c.lo = (i == 0) ? Rat(-net.radius) : Rat((net.points[i - 1].pos + net.points[i].pos) / 2);
      c.hi = (i + 1 == n) ? net.radius : Rat((net.points[i].pos + net.points[i + 1].pos) / 2);
      c.clipped = (i == 0) || (i + 1 == n);
      vd.cells.push_back(std::move(c));
    }
    for (size_t i = 0; i < n; ++i)
      vd.cells[i].interior = i >= 2 && i + 2 < n;  // both neighbors unclipped
    return vd;
  }
  for (size_t i = 0; i < n; ++i) {
    VoronoiCell c;
    c.site = i;
    Polygon p = box_polygon({Rat(0), Rat(0)}, net.radius);
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      p = clip(p, bisector_halfplane(net.points[i].pos2, net.points[j].pos2));
      if (p.empty()) break;
    }
    c.poly = canonical(p);
    // clipped iff some vertex sits on the window box boundary
    for (const auto& v : c.poly) {
      Rat dx = v.x - Rat(0), dy = v.y - Rat(0);
      (void)dx;
      (void)dy;
      if (v.x == -net.radius || v.x == net.radius || v.y == -net.radius || v.y == net.radius)
        c.clipped = true;
    }
    vd.cells.push_back(std::move(c));
  }
  // interior: the whole star is made of unclipped cells
  for (size_t i = 0; i < vd.cells.size(); ++i) {
    if (vd.cells[i].clipped || vd.cells[i].poly.empty()) continue;
    bool ok = true;
    for (size_t j = 0; j < vd.cells.size() && ok; ++j) {
      if (j == i || vd.cells[j].poly.empty()) continue;
      if (convex_touch(vd.cells[i].poly, vd.cells[j].poly) && vd.cells[j].clipped) ok = false;
    }
    vd.cells[i].interior = ok;
  }
  return vd;
}

StarNeighborhood star(const VoronoiDiagram& vd, size_t site) {
  require(site < vd.cells.size(), Err::BadSpec, "no such site");
  const auto& cell = vd.cells[site];
  require(!cell.clipped, Err::BoundarySite, "site's cell is clipped by the window");
  StarNeighborhood st;
  st.site = site;
  if (vd.dim == 1) {
    st.lo = cell.lo;
    st.hi = cell.hi;
    for (size_t j = 0; j < vd.cells.size(); ++j) {
      const auto& other = vd.cells[j];
      if (other.hi < cell.lo || other.lo > cell.hi) continue;
      st.vertex_set.push_back(j);
      st.lo = std::min(st.lo, other.lo);
      st.hi = std::max(st.hi, other.hi);
    }
    return st;
  }
  for (size_t j = 0; j < vd.cells.size(); ++j) {
    if (vd.cells[j].poly.empty()) continue;
    if (j == site || convex_touch(cell.poly, vd.cells[j].poly)) {
      st.vertex_set.push_back(j);
      st.polys.push_back(vd.cells[j].poly);
    }
  }
  return st;
}

HalfspaceForm halfspace_form(const VoronoiDiagram& vd, size_t site) {
  auto st = star(vd, site);
  const auto& cell = vd.cells[site];
  const auto& net = *vd.source;
  HalfspaceForm out;
  if (vd.dim == 1) {
    Rat lo = st.lo, hi = st.hi;
    for (size_t j : st.vertex_set) {
      if (j == site) continue;
      Rat mid = (net.points[site].pos + net.points[j].pos) / 2;
      if (net.points[j].pos > net.points[site].pos)
        hi = std::min(hi, mid);
      else
        lo = std::max(lo, mid);
    }
    out.lo = lo;
    out.hi = hi;
    out.equals_cell = (lo == cell.lo && hi == cell.hi);
    return out;
  }
  // pieces: each member cell clipped by the half-planes over the vertex set;
  // the piece at the site must equal the cell, the others must be flat
  bool ok = true;
  Polygon mine;
  for (size_t k = 0; k < st.vertex_set.size(); ++k) {
    size_t z = st.vertex_set[k];
    Polygon piece = vd.cells[z].poly;
    for (size_t j : st.vertex_set) {
      if (j == site) continue;
      piece = clip(piece, bisector_halfplane(net.points[site].pos2, net.points[j].pos2));
      if (piece.empty()) break;
    }
    if (z == site) {
      mine = piece;
      if (!poly_equal(piece, cell.poly)) ok = false;
    } else {
      if (area2(piece) != 0) ok = false;
      // flat leftovers must lie inside the cell (shared boundary)
      for (const auto& v : piece)
        if (!poly_contains(cell.poly, v)) ok = false;
    }
  }
  out.poly = mine;
  out.equals_cell = ok;
  return out;
}

namespace {

// minimal squared distance from an interior point to the polygon boundary
Rat boundary_dist2(const Polygon& p, const Vec2R& q) {
  Rat best(-1);
  for (size_t i = 0; i < p.size(); ++i) {
    Rat d = seg_dist2(q, p[i], p[(i + 1) % p.size()]);
    if (best < 0 || d < best) best = d;
  }
  return best;
}

}  // namespace

CellBoundsReport check_cell_bounds(const VoronoiDiagram& vd, const NetStats& st) {
  CellBoundsReport rep;
  rep.all_ok = true;
  const auto& net = *vd.source;
  Rat two_e = 2 * st.e_W, three_e = 3 * st.e_W;
  for (const auto& cell : vd.cells) {
    if (!cell.interior) continue;
    CellBound b;
    b.site = cell.site;
    if (vd.dim == 1) {
      Rat diam = cell.hi - cell.lo;
      b.diameter_ok = diam <= two_e;
      Rat site = net.points[cell.site].pos;
      Rat lam_half_sq = st.lambda1.squared() / 4;
      b.inner_ball_ok = LeafLength::from_value(site - cell.lo).squared() >= lam_half_sq &&
                        LeafLength::from_value(cell.hi - site).squared() >= lam_half_sq;
      auto sn = star(vd, cell.site);
      b.star_ball_ok = std::max(site - sn.lo, sn.hi - site) <= three_e;
      b.star_interior_ok = sn.lo < cell.lo && cell.hi < sn.hi;
    } else {
      const Vec2R& site = net.points[cell.site].pos2;
      b.diameter_ok = poly_diameter(cell.poly).leq(two_e);
      Rat bd = boundary_dist2(cell.poly, site);
      b.inner_ball_ok = bd * 4 >= st.lambda1.squared();
      auto sn = star(vd, cell.site);
      b.star_ball_ok = true;
      for (const auto& poly : sn.polys)
        for (const auto& v : poly)
          if (dist2(v, site) > three_e * three_e) b.star_ball_ok = false;
      // cell strictly inside the union: every edge of a member cell that
      // touches our cell must be a bisector edge shared with a member
      b.star_interior_ok = true;
      for (size_t k = 0; k < sn.vertex_set.size(); ++k) {
        size_t z = sn.vertex_set[k];
        const Polygon& zp = vd.cells[z].poly;
        for (size_t e = 0; e < zp.size(); ++e) {
          const Vec2R& u = zp[e];
          const Vec2R& v = zp[(e + 1) % zp.size()];
          // does the edge touch our cell?
          if (!convex_touch(cell.poly, Polygon{u, v})) continue;
          // find the opposing site of this edge
          bool matched = false;
          for (size_t j = 0; j < net.points.size() && !matched; ++j) {
            if (j == z) continue;
            auto h = bisector_halfplane(net.points[z].pos2, net.points[j].pos2);
            if (h.slack(u) == 0 && h.slack(v) == 0) {
              // shared Voronoi edge with site j; j must be in the star
              matched = std::find(sn.vertex_set.begin(), sn.vertex_set.end(), j) !=
                        sn.vertex_set.end();
            }
          }
          if (!matched) b.star_interior_ok = false;
        }
      }
    }
    rep.per_cell.push_back(b);
    rep.all_ok = rep.all_ok && b.diameter_ok && b.inner_ball_ok && b.star_ball_ok &&
                 b.star_interior_ok;
  }
  return rep;
}

DeloneNet synthetic_net(std::vector<Rat> positions, const Rat& radius) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  DeloneNet n;
  n.dim = 1;
  n.radius = radius;
  for (auto& p : positions) {
    NetPoint q;
    q.pos = p;
    n.points.push_back(std::move(q));
  }
  return n;
}

DeloneNet synthetic_net2(std::vector<Vec2R> positions, const Rat& radius) {
  std::sort(positions.begin(), positions.end(), [](const Vec2R& a, const Vec2R& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  DeloneNet n;
  n.dim = 2;
  n.radius = radius;
  for (auto& p : positions) {
    NetPoint q;
    q.pos2 = p;
    n.points.push_back(std::move(q));
  }
  return n;
}

OracleOutcome voronoi_oracle_run(uint64_t seed, size_t nets, size_t max_sites, size_t grid) {
  std::mt19937_64 rng(seed);
  OracleOutcome out;
  auto rnd_rat = [&](long lo, long hi, long den) {
    long span = (hi - lo) * den;
    return Rat(lo) + Rat(static_cast<long>(rng() % static_cast<unsigned long>(span + 1)), den);
  };
  for (size_t t = 0; t < nets; ++t) {
    bool two_d = (t % 2) == 1;
    size_t sites = 3 + rng() % (max_sites - 2);
    DeloneNet n;
    Rat R(12);
    if (!two_d) {
      std::vector<Rat> pos;
      for (size_t i = 0; i < sites; ++i) pos.push_back(rnd_rat(-10, 10, 8));
      n = synthetic_net(pos, R);
    } else {
      std::vector<Vec2R> pos;
      for (size_t i = 0; i < sites; ++i) pos.push_back({rnd_rat(0, 10, 4), rnd_rat(0, 10, 4)});
      n = synthetic_net2(pos, R);
      R = Rat(12);
    }
    if (n.points.size() < 2) continue;
    ++out.nets;
    auto vd = cells(n);
    // exact tessellation accounting
    if (vd.dim == 1) {
      Rat total(0);
      for (const auto& c : vd.cells) total += c.hi - c.lo;
      if (total != 2 * n.radius) ++out.accounting_failures;
    } else {
      Rat total(0);
      for (const auto& c : vd.cells) total += area2(c.poly);
      if (total != 2 * (2 * n.radius) * (2 * n.radius)) ++out.accounting_failures;
    }
    // brute-force nearest-site classification on a dense rational grid
    for (size_t gi = 0; gi <= grid; ++gi) {
      for (size_t gj = 0; gj <= (vd.dim == 1 ? 0 : grid); ++gj) {
        Vec2R g;
        Rat x = -n.radius + Rat(2 * static_cast<long>(gi), 1) * n.radius / Rat(static_cast<long>(grid));
        if (vd.dim == 1) {
          ++out.grid_points;
          Rat best;
          bool first = true;
          for (const auto& p : n.points) {
            Rat d = (x - p.pos) * (x - p.pos);
            if (first || d < best) best = d;
            first = false;
          }
          for (const auto& c : vd.cells) {
            Rat d = (x - n.points[c.site].pos) * (x - n.points[c.site].pos);
            bool in_cell = c.lo <= x && x <= c.hi;
            if (in_cell != (d == best)) ++out.mismatches;
          }
        } else {
          g = {x, -n.radius + Rat(2 * static_cast<long>(gj), 1) * n.radius / Rat(static_cast<long>(grid))};
          ++out.grid_points;
          Rat best;
          bool first = true;
          for (const auto& p : n.points) {
            Rat d = dist2(g, p.pos2);
            if (first || d < best) best = d;
            first = false;
          }
          for (const auto& c : vd.cells) {
            bool in_cell = poly_contains(c.poly, g);
            Rat d = dist2(g, n.points[c.site].pos2);
            if (in_cell != (d == best)) ++out.mismatches;
          }
        }
      }
    }
    // half-space identity on interior cells
    for (const auto& c : vd.cells) {
      if (!c.interior) continue;
      auto hf = halfspace_form(vd, c.site);
      if (!hf.equals_cell) ++out.halfspace_failures;
    }
  }
  return out;
}

std::string dump_cells(const VoronoiDiagram& vd) {
  std::ostringstream os;
  for (const auto& c : vd.cells) {
    os << c.site << ": ";
    if (vd.dim == 1)
      os << "[" << rat_str(c.lo) << ", " << rat_str(c.hi) << "]";
    else
      os << poly_str(c.poly);
    if (c.clipped) os << " (clipped)";
    os << "\n";
  }
  return os.str();
}

}  // namespace mbx

#include "mbx/delone.hpp"

#include <algorithm>
#include <sstream>

namespace mbx {

// ---------------------------------------------------------------------------
// exact rational plane primitives
// ---------------------------------------------------------------------------

Polygon box_polygon(const Vec2R& c, const Rat& h) {
  return {{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}};
}

Polygon clip(const Polygon& poly, const HalfPlane& h) {
  Polygon out;
  size_t n = poly.size();
  if (n == 0) return out;
  for (size_t i = 0; i < n; ++i) {
    const Vec2R& p = poly[i];
    const Vec2R& q = poly[(i + 1) % n];
    Rat sp = h.slack(p), sq = h.slack(q);
    if (sp >= 0) out.push_back(p);
    if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
      Rat t = sp / (sp - sq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return canonical(out);
}

Rat area2(const Polygon& p) {
  if (p.size() < 3) return Rat(0);
  Rat acc(0);
  for (size_t i = 0; i < p.size(); ++i) acc += cross(p[i], p[(i + 1) % p.size()]);
  return acc;
}

Polygon canonical(const Polygon& in) {
  Polygon p;
  for (const auto& v : in)
    if (p.empty() || !(p.back() == v)) p.push_back(v);
  while (p.size() >= 2 && p.front() == p.back()) p.pop_back();
  if (p.size() >= 3) {
    Polygon q;
    size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2R& a = p[(i + n - 1) % n];
      const Vec2R& b = p[i];
      const Vec2R& c = p[(i + 1) % n];
      if (cross(b - a, c - b) != 0) q.push_back(b);
    }
    if (!q.empty()) p = std::move(q);
  }
  if (p.empty()) return p;
  size_t best = 0;
  for (size_t i = 1; i < p.size(); ++i)
    if (p[i].x < p[best].x || (p[i].x == p[best].x && p[i].y < p[best].y)) best = i;
  std::rotate(p.begin(), p.begin() + static_cast<long>(best), p.end());
  return p;
}

bool poly_equal(const Polygon& a, const Polygon& b) { return canonical(a) == canonical(b); }

bool poly_contains(const Polygon& p, const Vec2R& q) {
  if (p.empty()) return false;
  if (p.size() == 1) return p[0] == q;
  if (p.size() == 2) return seg_dist2(q, p[0], p[1]) == 0;
  for (size_t i = 0; i < p.size(); ++i)
    if (cross(p[(i + 1) % p.size()] - p[i], q - p[i]) < 0) return false;
  return true;
}

LeafLength poly_diameter(const Polygon& p) {
  Rat best(0);
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j) best = std::max(best, dist2(p[i], p[j]));
  return LeafLength::from_squared(best);
}

Rat seg_dist2(const Vec2R& p, const Vec2R& a, const Vec2R& b) {
  Vec2R d = b - a;
  Rat dd = dot(d, d);
  if (dd == 0) return dist2(p, a);
  Rat t = dot(p - a, d) / dd;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  Vec2R proj{a.x + t * d.x, a.y + t * d.y};
  return dist2(p, proj);
}

bool convex_touch(const Polygon& a, const Polygon& b) {
  if (a.empty() || b.empty()) return false;
  if (b.size() >= 3) {
    Polygon cur = a;
    size_t n = b.size();
    for (size_t i = 0; i < n && !cur.empty(); ++i) {
      Vec2R e = b[(i + 1) % n] - b[i];
      HalfPlane h{{e.y, -e.x}, Rat(0)};  // keeps the left side of the edge
      h.c = h.n.x * b[i].x + h.n.y * b[i].y;
      cur = clip(cur, h);
    }
    return !cur.empty();
  }
  if (a.size() < 3 && b.size() >= a.size()) return convex_touch(b, a);
  if (b.size() == 1) return poly_contains(a, b[0]);
  // b is a segment
  if (poly_contains(a, b[0]) || poly_contains(a, b[1])) return true;
  auto ori = [](const Vec2R& u, const Vec2R& v, const Vec2R& w) {
    Rat c = cross(v - u, w - u);
    return c == 0 ? 0 : (c > 0 ? 1 : -1);
  };
  for (size_t i = 0; i < a.size(); ++i) {
    const Vec2R& p = a[i];
    const Vec2R& q = a[(i + 1) % a.size()];
    int o1 = ori(b[0], b[1], p), o2 = ori(b[0], b[1], q);
    int o3 = ori(p, q, b[0]), o4 = ori(p, q, b[1]);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && seg_dist2(p, b[0], b[1]) == 0) return true;
    if (o2 == 0 && seg_dist2(q, b[0], b[1]) == 0) return true;
  }
  return false;
}

std::string poly_str(const Polygon& p) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < p.size(); ++i)
    os << (i ? " " : "") << rat_str(p[i].x) << "," << rat_str(p[i].y);
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// nets
// ---------------------------------------------------------------------------

bool DeloneNet::has_step(long long n) const {
  for (const auto& p : points)
    if (p.steps == ZVec{n, 0}) return true;
  return false;
}

DeloneNet net(const CantorPoint& w, const ClopenSet& W, const Rat& R, size_t scan_depth) {
  require(w.system() == W.system(), Err::SystemMismatch, "net target from another system");
  require(!W.is_empty(), Err::EmptyInput, "empty net target");
  auto sys = w.system();
  DeloneNet out;
  out.center = w;
  out.W = W;
  out.radius = R;

  if (!sys->is_subshift() && sys->odo().dimension() == 2) {
    out.dim = 2;
    size_t level = W.is_whole() ? 1 : W.level();
    long long b = 1;
    while (Rat(b) < R) ++b;
    for (long long gx = -b; gx <= b; ++gx)
      for (long long gy = -b; gy <= b; ++gy) {
        if (Rat(gx * gx + gy * gy) > R * R) continue;
        auto y = w.translated2({gx, gy});
        if (!W.contains(y)) continue;
        NetPoint p;
        p.steps = {gx, gy};
        p.pos2 = {Rat(gx), Rat(gy)};
        p.label = ClopenSet::coset(sys, level, y.residue(level));
        out.points.push_back(std::move(p));
      }
    std::sort(out.points.begin(), out.points.end(),
              [](const NetPoint& a, const NetPoint& b2) { return a.steps < b2.steps; });
    return out;
  }

  auto f = filtration(w, W, R, scan_depth, Direction::TwoSided);
  size_t label_depth = 1;
  if (sys->is_subshift())
    label_depth = W.is_whole() ? 1 : std::max<size_t>(1, W.word_len());
  else
    label_depth = W.is_whole() ? 1 : W.level();
  for (const auto& g : f.germs) {
    NetPoint p;
    p.steps = {g.exponent, 0};
    p.pos = leaf_displacement(w, g.exponent);
    p.label = ClopenSet::point_cylinder(w.translated(g.exponent), label_depth);
    out.points.push_back(std::move(p));
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const NetPoint& a, const NetPoint& b) { return a.pos < b.pos; });
  return out;
}

NetStats stats(const DeloneNet& n, long long alpha_scan) {
  NetStats st;
  auto sys = n.center.system();
  require(n.points.size() >= 2, Err::SingletonNet, "stats need at least two net points");
  if (n.dim == 1) {
    Rat min_gap = n.points[1].pos - n.points[0].pos;
    Rat max_gap = min_gap;
    for (size_t i = 1; i + 1 < n.points.size(); ++i) {
      Rat g = n.points[i + 1].pos - n.points[i].pos;
      min_gap = std::min(min_gap, g);
      max_gap = std::max(max_gap, g);
    }
    st.lambda1 = LeafLength::from_value(min_gap);
    st.covering_radius = LeafLength::from_value(max_gap / 2);
    auto rs = induced_generators(n.W, alpha_scan);
    st.alpha_W = rs.alpha;
    st.e_W = rs.e_W;
    return st;
  }
  // d = 2: exact pairwise minimum; covering radius from the central cell
  Rat l2;
  bool first = true;
  for (size_t i = 0; i < n.points.size(); ++i)
    for (size_t j = i + 1; j < n.points.size(); ++j) {
      Rat d = dist2(n.points[i].pos2, n.points[j].pos2);
      if (first || d < l2) l2 = d;
      first = false;
    }
  st.lambda1 = LeafLength::from_squared(l2);
  size_t center = 0;
  for (size_t i = 0; i < n.points.size(); ++i)
    if (n.points[i].steps == ZVec{0, 0}) center = i;
  Polygon cell = box_polygon(n.points[center].pos2, n.radius);
  for (size_t j = 0; j < n.points.size(); ++j) {
    if (j == center) continue;
    cell = clip(cell, bisector_halfplane(n.points[center].pos2, n.points[j].pos2));
  }
  Rat cr(0);
  for (const auto& v : cell) cr = std::max(cr, dist2(v, n.points[center].pos2));
  st.covering_radius = LeafLength::from_squared(cr);
  // covering number in the |g|_1 word metric over the translation generators
  const auto& od = sys->odo();
  size_t level = n.W.is_whole() ? 0 : n.W.level();
  long long best = 0;
  for (const auto& r : od.residues(level)) {
    long long here = -1;
    for (long long s = 0; s <= alpha_scan && here < 0; ++s) {
      for (long long gx = -s; gx <= s && here < 0; ++gx) {
        long long rem = s - std::llabs(gx);
        for (long long gy : {-rem, rem}) {
          ZVec t = od.reduce(level, {r.x + gx, r.y + gy});
          bool inside = n.W.is_whole();
          if (!inside) {
            const auto& cells = n.W.residues();
            inside = std::binary_search(cells.begin(), cells.end(), t, [&](ZVec u, ZVec v) {
              return od.residue_id(level, u) < od.residue_id(level, v);
            });
          }
          if (inside) {
            here = s;
            break;
          }
          if (rem == 0) break;
        }
      }
    }
    require(here >= 0, Err::NotMinimal, "covering search exhausted");
    best = std::max(best, here);
  }
  st.alpha_W = best;
  st.e_W = Rat(2 * best + 1);
  return st;
}

Rat exact_lambda1(const ClopenSet& W, long long scan_cap) {
  // single forward cylinders admit an occurrence-gap shortcut: once the
  // language is complete out to len + maxgap, every return word of W is
  // realized between consecutive occurrences in the scanned prefix
  if (W.system()->is_subshift() && !W.is_whole() && W.anchor() == 0 && W.cell_count() == 1) {
    const auto& sub = W.system()->sub();
    size_t len = W.word_len();
    size_t pos = W.word_positions().front();
    size_t gmax = 0;
    while (true) {
      sub.ensure_language(len + gmax + 1);
      const auto& occ = sub.occurrences(pos, len);
      require(occ.size() >= 2, Err::NotMinimal, "no recurrence in scanned prefix");
      size_t g = 0;
      for (size_t i = 0; i + 1 < occ.size(); ++i) g = std::max(g, occ[i + 1] - occ[i]);
      if (g <= gmax) break;
      gmax = g;
    }
    const auto& occ = sub.occurrences(pos, len);
    Rat best;
    bool first = true;
    for (size_t i = 0; i + 1 < occ.size(); ++i) {
      Rat acc(0);
      for (size_t j = occ[i]; j < occ[i + 1]; ++j) acc += sub.tile(sub.symbol_at(j));
      if (first || acc < best) best = acc;
      first = false;
    }
    return best;
  }
  auto rs = induced_generators(W, scan_cap);
  Rat best = rs.min_lengths[0];
  for (const auto& l : rs.min_lengths) best = std::min(best, l);
  return best;
}

std::vector<LeafLength> lambda1_profile(const CantorPoint& w,
                                        const std::vector<ClopenSet>& levels, const Rat& R,
                                        size_t scan_depth) {
  std::vector<LeafLength> out;
  for (const auto& V : levels) {
    auto n = net(w, V, R, scan_depth);
    out.push_back(stats(n).lambda1);
  }
  return out;
}

std::string dump_net(const DeloneNet& n) {
  std::ostringstream os;
  for (const auto& p : n.points) {
    if (n.dim == 1)
      os << rat_str(p.pos);
    else
      os << "(" << p.steps.x << "," << p.steps.y << ")";
    os << ", " << p.label.render() << "\n";
  }
  return os.str();
}

}  // namespace mbx

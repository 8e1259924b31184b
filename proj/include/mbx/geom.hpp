#pragma once

#include <vector>

#include "mbx/rational.hpp"

namespace mbx {

struct Vec2R {
  Rat x, y;
  bool operator==(const Vec2R& o) const { return x == o.x && y == o.y; }
};

inline Vec2R operator+(const Vec2R& a, const Vec2R& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2R operator-(const Vec2R& a, const Vec2R& b) { return {a.x - b.x, a.y - b.y}; }
inline Rat dot(const Vec2R& a, const Vec2R& b) { return a.x * b.x + a.y * b.y; }
inline Rat cross(const Vec2R& a, const Vec2R& b) { return a.x * b.y - a.y * b.x; }
inline Rat dist2(const Vec2R& a, const Vec2R& b) { return dot(a - b, a - b); }

// closed half-plane {p : n . p <= c}
struct HalfPlane {
  Vec2R n;
  Rat c;
  bool contains(const Vec2R& p) const { return dot(n, p) <= c; }
  Rat slack(const Vec2R& p) const { return c - dot(n, p); }
};

// {p : |p - a|^2 <= |p - b|^2} as a half-plane
inline HalfPlane bisector_halfplane(const Vec2R& a, const Vec2R& b) {
  Vec2R n = {2 * (b.x - a.x), 2 * (b.y - a.y)};
  Rat c = dot(b, b) - dot(a, a);
  return {n, c};
}

// convex polygon, counterclockwise; empty vector = empty set; degenerate
// (point/segment) polygons are allowed
using Polygon = std::vector<Vec2R>;

Polygon box_polygon(const Vec2R& center, const Rat& halfwidth);
Polygon clip(const Polygon& poly, const HalfPlane& h);
// twice the signed area
Rat area2(const Polygon& p);
// canonical form: collinear vertices removed, duplicates merged, rotated to
// the lexicographically least vertex
Polygon canonical(const Polygon& p);
bool poly_equal(const Polygon& a, const Polygon& b);
bool poly_contains(const Polygon& p, const Vec2R& q);  // closed containment
LeafLength poly_diameter(const Polygon& p);
// squared distance from a point to a closed segment
Rat seg_dist2(const Vec2R& p, const Vec2R& a, const Vec2R& b);
// nonempty closed intersection test for convex polygons (touching counts)
bool convex_touch(const Polygon& a, const Polygon& b);

std::string poly_str(const Polygon& p);

}  // namespace mbx

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mbx/voronoi.hpp"

using namespace mbx;

namespace {

DeloneNet integer_net(long lo, long hi, Rat radius) {
  std::vector<Rat> pos;
  for (long k = lo; k <= hi; ++k) pos.push_back(Rat(k));
  return synthetic_net(pos, radius);
}

DeloneNet lattice_net2(long b, Rat radius) {
  std::vector<Vec2R> pos;
  for (long x = -b; x <= b; ++x)
    for (long y = -b; y <= b; ++y) pos.push_back({Rat(x), Rat(y)});
  return synthetic_net2(pos, radius);
}

size_t site_at(const DeloneNet& n, Rat p) {
  for (size_t i = 0; i < n.points.size(); ++i)
    if (n.points[i].pos == p) return i;
  REQUIRE(false);
  return 0;
}

size_t site_at2(const DeloneNet& n, Vec2R p) {
  for (size_t i = 0; i < n.points.size(); ++i)
    if (n.points[i].pos2 == p) return i;
  REQUIRE(false);
  return 0;
}

}  // namespace

TEST_CASE("interval cells") {
  auto n = integer_net(-6, 6, Rat(13, 2));
  auto vd = cells(n);
  auto c0 = vd.cells[site_at(n, Rat(0))];
  CHECK(c0.lo == Rat(-1, 2));
  CHECK(c0.hi == Rat(1, 2));
  CHECK(c0.interior);

  auto n2 = synthetic_net({Rat(0), Rat(1), Rat(3)}, Rat(5));
  auto vd2 = cells(n2);
  auto c1 = vd2.cells[site_at(n2, Rat(1))];
  CHECK(c1.lo == Rat(1, 2));
  CHECK(c1.hi == Rat(2));
}

TEST_CASE("lattice square cell") {
  auto n = lattice_net2(3, Rat(7, 2));
  auto vd = cells(n);
  auto c = vd.cells[site_at2(n, {Rat(0), Rat(0)})];
  Polygon unit_square = {{Rat(-1, 2), Rat(-1, 2)},
                         {Rat(1, 2), Rat(-1, 2)},
                         {Rat(1, 2), Rat(1, 2)},
                         {Rat(-1, 2), Rat(1, 2)}};
  CHECK(poly_equal(c.poly, unit_square));
  CHECK(c.interior);
}

TEST_CASE("stars") {
  auto n = integer_net(-6, 6, Rat(13, 2));
  auto vd = cells(n);
  auto st = star(vd, site_at(n, Rat(0)));
  REQUIRE(st.vertex_set.size() == 3);
  CHECK(n.points[st.vertex_set[0]].pos == Rat(-1));
  CHECK(n.points[st.vertex_set[1]].pos == Rat(0));
  CHECK(n.points[st.vertex_set[2]].pos == Rat(1));
  CHECK(st.lo == Rat(-3, 2));
  CHECK(st.hi == Rat(3, 2));

  // interval adjacency with uneven spacing
  auto n3 = synthetic_net({Rat(-9), Rat(-6), Rat(-3), Rat(0), Rat(1), Rat(3), Rat(6), Rat(9)},
                          Rat(10));
  auto vd3 = cells(n3);
  auto st3 = star(vd3, site_at(n3, Rat(1)));
  std::vector<Rat> touching;
  for (size_t j : st3.vertex_set) touching.push_back(n3.points[j].pos);
  CHECK(touching == std::vector<Rat>{Rat(0), Rat(1), Rat(3)});

  // corner-touching lattice squares count: 9 sites
  auto n2 = lattice_net2(3, Rat(7, 2));
  auto vd2 = cells(n2);
  auto st2 = star(vd2, site_at2(n2, {Rat(0), Rat(0)}));
  CHECK(st2.vertex_set.size() == 9);

  // boundary sites are rejected
  CHECK_THROWS_AS((void)star(vd, 0), Error);
}

TEST_CASE("half-space form equals the direct cell") {
  auto n = integer_net(-6, 6, Rat(13, 2));
  auto vd = cells(n);
  auto hf = halfspace_form(vd, site_at(n, Rat(0)));
  CHECK(hf.equals_cell);
  CHECK(hf.lo == Rat(-1, 2));
  CHECK(hf.hi == Rat(1, 2));

  auto n2 = lattice_net2(3, Rat(7, 2));
  auto vd2 = cells(n2);
  auto hf2 = halfspace_form(vd2, site_at2(n2, {Rat(0), Rat(0)}));
  CHECK(hf2.equals_cell);
  Polygon unit_square = {{Rat(-1, 2), Rat(-1, 2)},
                         {Rat(1, 2), Rat(-1, 2)},
                         {Rat(1, 2), Rat(1, 2)},
                         {Rat(-1, 2), Rat(1, 2)}};
  CHECK(poly_equal(hf2.poly, unit_square));
}

TEST_CASE("boundary sharing is symmetric") {
  auto n2 = lattice_net2(2, Rat(5, 2));
  auto vd2 = cells(n2);
  for (size_t i = 0; i < vd2.cells.size(); ++i) {
    if (vd2.cells[i].clipped) continue;
    auto sti = star(vd2, i);
    for (size_t j : sti.vertex_set) {
      if (vd2.cells[j].clipped) continue;
      auto stj = star(vd2, j);
      CHECK(std::find(stj.vertex_set.begin(), stj.vertex_set.end(), i) != stj.vertex_set.end());
    }
  }
}

TEST_CASE("cell bounds on dynamical lattice examples") {
  // dyadic 4Z net: cells have diameter 4 <= 2 e_W with e_W = 7
  auto dy = make_system(dyadic_spec());
  auto w0 = CantorPoint::basepoint(dy);
  auto W = ClopenSet::coset(dy, 2, {0, 0});
  auto n = net(w0, W, Rat(40), 256);
  auto st = stats(n);
  CHECK(st.e_W == Rat(7));
  auto vd = cells(n);
  auto rep = check_cell_bounds(vd, st);
  CHECK(rep.all_ok);
  CHECK(rep.per_cell.size() > 0);

  // integer net: the tight inner-ball case
  auto fib = make_system(fibonacci_rule());
  auto wf = CantorPoint::basepoint(fib);
  auto nf = net(wf, ClopenSet::whole(fib), Rat(8), 64);
  auto stf = stats(nf);
  CHECK(stf.e_W == Rat(1));
  auto vdf = cells(nf);
  auto repf = check_cell_bounds(vdf, stf);
  CHECK(repf.all_ok);

  // Z^2 lattice: star(0) is the 3x3 block of unit squares
  auto n2 = lattice_net2(3, Rat(7, 2));
  auto vd2 = cells(n2);
  auto sn = star(vd2, site_at2(n2, {Rat(0), Rat(0)}));
  Rat lox(0), hix(0), loy(0), hiy(0);
  for (const auto& poly : sn.polys)
    for (const auto& v : poly) {
      lox = std::min(lox, v.x);
      hix = std::max(hix, v.x);
      loy = std::min(loy, v.y);
      hiy = std::max(hiy, v.y);
    }
  CHECK(lox == Rat(-3, 2));
  CHECK(hix == Rat(3, 2));
  CHECK(loy == Rat(-3, 2));
  CHECK(hiy == Rat(3, 2));
}

TEST_CASE("clipping geometry primitives") {
  Polygon box = box_polygon({Rat(0), Rat(0)}, Rat(1));
  CHECK(area2(box) == Rat(8));
  auto half = clip(box, HalfPlane{{Rat(1), Rat(0)}, Rat(0)});
  CHECK(area2(half) == Rat(4));
  auto empty = clip(box, HalfPlane{{Rat(1), Rat(0)}, Rat(-2)});
  CHECK(empty.empty());
  CHECK(poly_contains(box, {Rat(1), Rat(1)}));
  CHECK_FALSE(poly_contains(box, {Rat(1), Rat(9, 8)}));
  CHECK(convex_touch(box, box_polygon({Rat(2), Rat(2)}, Rat(1))));       // corner touch
  CHECK_FALSE(convex_touch(box, box_polygon({Rat(3), Rat(0)}, Rat(1))));
  CHECK(poly_diameter(box).squared() == Rat(8));
}

TEST_CASE("random-net oracle: brute force agrees with the construction") {
  auto out = voronoi_oracle_run(7, 40, 12, 24);
  CHECK(out.nets == 40);
  CHECK(out.mismatches == 0);
  CHECK(out.halfspace_failures == 0);
  CHECK(out.accounting_failures == 0);
  // determinism of the seeded run
  auto again = voronoi_oracle_run(7, 40, 12, 24);
  CHECK(again.grid_points == out.grid_points);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "mbx/tower.hpp"

using namespace mbx;

namespace {

SystemPtr fib() {
  static SystemPtr s = make_system(fibonacci_rule());
  return s;
}

SystemPtr dyadic() {
  static SystemPtr s = make_system(dyadic_spec());
  return s;
}

std::multiset<long long> heights(const TowerLevel& t) {
  std::multiset<long long> out;
  for (const auto& c : t.columns) out.insert(c.height);
  return out;
}

}  // namespace

TEST_CASE("dyadic chain tower: constant heights and cyclic adjacency") {
  auto z = CantorPoint::basepoint(dyadic());
  auto V = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto lv = build_level(z, V, 2, 64);
  auto t = build_tower(lv);
  REQUIRE(t.columns.size() == 4);
  for (const auto& c : t.columns) {
    CHECK(c.height == 4);
    REQUIRE(c.exits.size() == 1);
  }
  // adjacency is one cycle through the four blocks
  std::set<size_t> visited;
  size_t cur = 0;
  for (int i = 0; i < 4; ++i) {
    visited.insert(cur);
    cur = t.columns[cur].exits[0];
  }
  CHECK(cur == 0);
  CHECK(visited.size() == 4);
}

TEST_CASE("Fibonacci [aa]-level return tower has heights {3, 5}") {
  auto V = ClopenSet::cylinder(fib(), "aa");
  auto t = return_tower(V);
  CHECK(heights(t) == std::multiset<long long>{3, 5});
  // and the hierarchy-style tower over the same level keeps the same set
  auto z = CantorPoint::basepoint(fib());
  auto lv = build_level(z, V, 1, 1 << 18);
  auto ft = build_tower(lv);
  std::set<long long> hs(heights(ft).begin(), heights(ft).end());
  CHECK(hs == std::set<long long>{3, 5});
}

TEST_CASE("trivial partition over the whole space: height-1 symbol columns") {
  auto t = tower_over(ClopenSet::whole(fib()), {ClopenSet::whole(fib())});
  REQUIRE(t.columns.size() == 2);  // one column per symbol
  for (const auto& c : t.columns) CHECK(c.height == 1);
}

TEST_CASE("collapse: dyadic single-block tower is a circle") {
  for (size_t l : {1, 2, 3}) {
    auto V = ClopenSet::coset(dyadic(), l, {0, 0});
    auto t = tower_over(V, {V});
    REQUIRE(t.columns.size() == 1);
    CHECK(t.columns[0].height == (1LL << l));
    auto bc = collapse(t);
    CHECK(bc.raw_edges == (1LL << l));
    CHECK(bc.raw_vertices == (1LL << l));
    CHECK(bc.boundary_classes == 1);
    auto s = simplify(bc);
    CHECK(s.is_circle());
    REQUIRE(s.edges.size() == 1);
    CHECK(s.edges[0].length == Rat(1LL << l));
    CHECK(bc.euler_raw() == s.euler_simplified());
  }
}

TEST_CASE("equivalence closure on the dyadic level-2 tower") {
  auto V = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto t = tower_over(V, {V});
  auto uf = equivalence_closure(t);
  // 5 boundary slots, ends glued: 4 distinct vertex classes; 4 edge cells
  CHECK(uf.slots() == 5);
  CHECK(uf.class_count() == 4);
  auto bc = collapse(t);
  CHECK(bc.raw_edges == 4);
  CHECK(bc.raw_vertices == 4);
}

TEST_CASE("collapse and simplify: Fibonacci [aa]-level wedge") {
  auto t = return_tower(ClopenSet::cylinder(fib(), "aa"));
  auto bc = collapse(t);
  // both columns start and end in the single glued class over V
  CHECK(bc.boundary_classes == 1);
  auto s = simplify(bc);
  CHECK(s.vertices == 1);
  REQUIRE(s.edges.size() == 2);
  std::multiset<Rat> lens{s.edges[0].length, s.edges[1].length};
  CHECK(lens == std::multiset<Rat>{Rat(3), Rat(5)});
  CHECK(s.euler_simplified() == -1);
  CHECK(bc.euler_raw() == -1);
  CHECK_FALSE(s.is_circle());
}

TEST_CASE("single column of height 1 collapses to a loop") {
  auto V = ClopenSet::coset(dyadic(), 1, {0, 0});
  // height-2 single column; and a height-1 single loop via the whole space
  auto t1 = tower_over(ClopenSet::whole(dyadic()), {ClopenSet::whole(dyadic())});
  REQUIRE(t1.columns.size() == 1);
  CHECK(t1.columns[0].height == 1);
  auto s = simplify(collapse(t1));
  CHECK(s.vertices == 1);
  REQUIRE(s.edges.size() == 1);
  CHECK(s.edges[0].src == s.edges[0].dst);
  (void)V;
}

TEST_CASE("simplify is idempotent") {
  auto t = return_tower(ClopenSet::cylinder(fib(), "a"));
  auto s = simplify(collapse(t));
  auto s2 = simplify(s);
  CHECK(s.vertices == s2.vertices);
  CHECK(s.edges.size() == s2.edges.size());
  for (size_t i = 0; i < s.edges.size(); ++i) {
    CHECK(s.edges[i].length == s2.edges[i].length);
    CHECK(s.edges[i].src == s2.edges[i].src);
    CHECK(s.edges[i].dst == s2.edges[i].dst);
  }
}

TEST_CASE("leaf covering: exact interval accounting") {
  auto w0 = CantorPoint::basepoint(fib());
  auto t = return_tower(ClopenSet::cylinder(fib(), "aa"));
  auto rep = check_leaf_covering(t, w0, Rat(200));
  CHECK(rep.ok);
  CHECK(rep.covered >= Rat(200));

  auto z = CantorPoint::basepoint(dyadic());
  auto lv = build_level(z, ClopenSet::coset(dyadic(), 2, {0, 0}), 2, 64);
  auto td = build_tower(lv);
  auto repd = check_leaf_covering(td, z, Rat(64));
  CHECK(repd.ok);
}

TEST_CASE("class diameters stay within the per-level bounds") {
  auto z = CantorPoint::basepoint(dyadic());
  auto lv = build_level(z, ClopenSet::coset(dyadic(), 2, {0, 0}), 2, 64);
  auto t = build_tower(lv);
  auto rep = check_class_diameters(t);
  CHECK(rep.within_bounds);

  auto w0 = CantorPoint::basepoint(fib());
  auto lvf = build_level(w0, ClopenSet::cylinder(fib(), "a"), 1, 1 << 18);
  auto tf = build_tower(lvf);
  auto repf = check_class_diameters(tf);
  CHECK(repf.within_bounds);
  CHECK(repf.max_cell_slice <= tf.slice_bound);
}

TEST_CASE("quotient soundness: collapse fibers match the closure classes") {
  auto t = return_tower(ClopenSet::cylinder(fib(), "a"));
  auto uf = equivalence_closure(t);
  auto bc = collapse(t);
  // boundary classes in the complex = closure classes restricted to ends
  std::set<size_t> roots;
  for (size_t c = 0; c < t.columns.size(); ++c) {
    roots.insert(uf.find(uf.slot(c, 0)));
    roots.insert(uf.find(uf.slot(c, t.columns[c].height)));
  }
  CHECK(roots.size() == bc.boundary_classes);
  // interior slots are singletons
  for (size_t c = 0; c < t.columns.size(); ++c)
    for (long long k = 1; k < t.columns[c].height; ++k)
      CHECK(uf.find(uf.slot(c, k)) == uf.slot(c, k));
}

TEST_CASE("torus complex of a Z^2 odometer level") {
  OdometerSpec sp;
  sp.dimension = 2;
  sp.bases.push_back({2, 0, 0, 2});
  sp.bases.push_back({4, 0, 0, 4});
  auto sys = make_system(sp);
  auto z = CantorPoint::basepoint(sys);
  auto lv = build_level(z, ClopenSet::coset(sys, 1, {0, 0}), 1, 64);
  auto bc = torus_complex(lv);
  CHECK(bc.dim == 2);
  CHECK(bc.squares == 4);
  CHECK(bc.edges2 == 8);
  CHECK(bc.vertices2 == 4);
  CHECK(bc.euler_raw() == 0);
}

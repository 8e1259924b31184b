#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mbx/holonomy.hpp"

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

ClopenSet cyl(const std::string& w) { return ClopenSet::cylinder(fib(), w); }

std::vector<long long> exponents(const Filtration& f) {
  std::vector<long long> out;
  for (const auto& g : f.germs) out.push_back(g.exponent);
  return out;
}

}  // namespace

TEST_CASE("apply") {
  auto w0 = CantorPoint::basepoint(fib());
  auto s1 = make_shift(fib(), 1, ClopenSet::whole(fib()));
  auto y = apply(s1, w0);
  std::string pre;
  for (long long i = 0; i < 4; ++i) pre += fib()->sub().alphabet().name(y.coord(i));
  CHECK(pre == "baab");

  auto id = make_shift(fib(), 0, ClopenSet::whole(fib()));
  CHECK(apply(id, w0).same_cylinder(w0, 64));

  // odometer carry: 3 + 1 = 4 is coset 0 mod 4 and coset 4 mod 8
  auto p3 = CantorPoint::orbit(dyadic(), 3);
  auto plus1 = make_translation(dyadic(), {1, 0}, ClopenSet::whole(dyadic()));
  auto q = apply(plus1, p3);
  CHECK(q.residue(2) == ZVec{0, 0});
  CHECK(q.residue(3) == ZVec{4, 0});

  auto offdomain = make_shift(fib(), 1, cyl("b"));
  CHECK_THROWS_AS((void)apply(offdomain, w0), Error);
}

TEST_CASE("compose computes exact maximal domains") {
  auto h1 = make_shift(fib(), 1, cyl("ab"));
  auto h2 = make_shift(fib(), 1, cyl("b"));
  auto c = compose(h2, h1);
  CHECK(c.power() == 2);
  CHECK(c.domain.same_set(cyl("ab")));

  auto g = make_shift(fib(), 1, cyl("a"));
  auto gg = compose(g, g);
  CHECK(gg.power() == 2);
  CHECK(gg.domain.same_set(cyl("aa")));

  auto inv = inverse(h1);
  auto round = compose(inv, h1);
  CHECK(round.power() == 0);
  CHECK(round.domain.same_set(h1.domain));

  // composing onto a disjoint target is empty
  auto bad = make_shift(fib(), 0, cyl("aa"));
  auto far = make_shift(fib(), 0, cyl("ba"));
  CHECK_THROWS_AS((void)compose(far, bad), Error);
}

TEST_CASE("germ equality is exponent equality") {
  auto w0 = CantorPoint::basepoint(fib());
  auto a = make_shift(fib(), 2, cyl("aba"));
  auto b = make_shift(fib(), 2, cyl("ab"));
  CHECK(germ_equal(a, b, w0));
  auto c = make_shift(fib(), 3, cyl("ab"));
  CHECK_FALSE(germ_equal(b, c, w0));
  auto id = make_shift(fib(), 0, ClopenSet::whole(fib()));
  CHECK_FALSE(germ_equal(id, c, w0));
}

TEST_CASE("filtration examples") {
  auto w0 = CantorPoint::basepoint(fib());
  auto f = filtration(w0, cyl("a"), Rat(3), 64, Direction::Forward);
  CHECK(exponents(f) == std::vector<long long>{0, 2, 3});

  // two-sided: left word ends ...abaababa, so backward hits at -1 and -3
  auto f2 = filtration(w0, cyl("a"), Rat(3), 64, Direction::TwoSided);
  CHECK(exponents(f2) == std::vector<long long>{-3, -1, 0, 2, 3});

  auto f0 = filtration(w0, cyl("a"), Rat(0), 64, Direction::TwoSided);
  CHECK(exponents(f0) == std::vector<long long>{0});
  auto f0b = filtration(w0, cyl("b"), Rat(0), 64, Direction::TwoSided);
  CHECK(f0b.germs.empty());

  auto z = CantorPoint::basepoint(dyadic());
  auto W = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto fd = filtration(z, W, Rat(8), 64, Direction::Forward);
  CHECK(exponents(fd) == std::vector<long long>{0, 4, 8});
  auto fd2 = filtration(z, W, Rat(8), 64, Direction::TwoSided);
  CHECK(exponents(fd2) == std::vector<long long>{-8, -4, 0, 4, 8});

  CHECK_THROWS_AS((void)filtration(w0, cyl("a"), Rat(100), 10, Direction::Forward), Error);
}

TEST_CASE("filtration germs carry maximal domains and the length bounds") {
  auto w0 = CantorPoint::basepoint(fib());
  auto f = filtration(w0, cyl("a"), Rat(6), 64, Direction::TwoSided);
  Rat maxt = fib()->max_tile(), mint = fib()->min_tile();
  for (const auto& g : f.germs) {
    // domain is the full preimage of the target
    CHECK(g.domain.same_set(cyl("a").image(-g.exponent)));
    CHECK(g.domain.contains(w0));
    // word length of sigma^n is |n|; Lemma-style two-sided bounds
    Rat word(std::abs(g.exponent));
    CHECK(g.path_length / (2 * maxt) <= word);
    CHECK(word <= 1 + g.path_length / mint);
  }
}

TEST_CASE("induced generators: Fibonacci returns of [a]") {
  auto rs = induced_generators(cyl("a"));
  REQUIRE(rs.generators.size() == 2);
  CHECK(rs.generators[0].power() == 1);
  CHECK(rs.generators[0].domain.same_set(cyl("aa")));
  CHECK(rs.generators[1].power() == 2);
  CHECK(rs.generators[1].domain.same_set(cyl("ab")));
  CHECK(rs.alpha == 1);
  CHECK(rs.e_W == Rat(3));
  rs.domain_partition().validate();
}

TEST_CASE("induced generators: odometer and whole-space cases") {
  auto even = ClopenSet::coset(dyadic(), 1, {0, 0});
  auto rs = induced_generators(even);
  REQUIRE(rs.generators.size() == 1);
  CHECK(rs.generators[0].power() == 2);
  CHECK(rs.generators[0].domain.same_set(even));

  auto rx = induced_generators(ClopenSet::whole(fib()));
  REQUIRE(rx.generators.size() == 1);
  CHECK(rx.generators[0].power() == 1);
  CHECK(rx.generators[0].domain.is_whole());
  CHECK(rx.alpha == 0);

  auto mod4 = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto r4 = induced_generators(mod4);
  CHECK(r4.alpha == 3);
  CHECK(r4.e_W == Rat(7));
}

TEST_CASE("groupoid laws on random elements") {
  std::mt19937_64 rng(5);
  const auto& sub = fib()->sub();
  auto rnd_elem = [&]() {
    size_t depth = 1 + rng() % 6;
    auto lang = sub.language(depth);
    std::vector<size_t> pick;
    for (size_t p : lang)
      if (rng() % 2) pick.push_back(p);
    if (pick.empty()) pick.push_back(lang[rng() % lang.size()]);
    long long n = static_cast<long long>(rng() % 9) - 4;
    return make_shift(fib(), n, ClopenSet::from_words(fib(), 0, depth, pick));
  };
  int composed = 0;
  for (int it = 0; it < 300; ++it) {
    auto a = rnd_elem(), b = rnd_elem(), c = rnd_elem();
    // inverse law
    auto r = compose(inverse(a), a);
    CHECK(r.power() == 0);
    CHECK(r.domain.same_set(a.domain));
    // associativity where defined
    try {
      auto left = compose(c, compose(b, a));
      auto right = compose(compose(c, b), a);
      CHECK(left.power() == right.power());
      CHECK(left.domain.same_set(right.domain));
      ++composed;
    } catch (const Error& e) {
      CHECK(e.code() == Err::EmptyComposition);
    }
  }
  CHECK(composed > 20);
}

TEST_CASE("maximal domain matches brute force on composition chains") {
  std::mt19937_64 rng(17);
  const auto& sub = fib()->sub();
  auto rnd_elem = [&]() {
    size_t depth = 1 + rng() % 4;
    auto lang = sub.language(depth);
    std::vector<size_t> pick;
    for (size_t p : lang)
      if (rng() % 2) pick.push_back(p);
    if (pick.empty()) pick.push_back(lang[rng() % lang.size()]);
    long long n = static_cast<long long>(rng() % 7) - 3;
    return make_shift(fib(), n, ClopenSet::from_words(fib(), 0, depth, pick));
  };
  int done = 0;
  for (int it = 0; it < 120 && done < 60; ++it) {
    size_t chain = 2 + rng() % 4;
    std::vector<HolonomyElement> hs;
    for (size_t i = 0; i < chain; ++i) hs.push_back(rnd_elem());
    HolonomyElement acc = hs[0];
    bool empty = false;
    try {
      for (size_t i = 1; i < chain; ++i) acc = compose(hs[i], acc);
    } catch (const Error&) {
      empty = true;
    }
    if (empty) continue;
    ++done;
    // brute force: classify sample points by the chain-forced window
    long long K = 24;
    std::vector<size_t> survived;
    for (size_t p = static_cast<size_t>(K); p < 4000; ++p) {
      auto x = CantorPoint::orbit(fib(), static_cast<long long>(p));
      bool ok = true;
      long long shift = 0;
      for (const auto& h : hs) {
        if (!h.domain.contains(x.translated(shift))) { ok = false; break; }
        shift += h.power();
      }
      if (ok) survived.push_back(p - static_cast<size_t>(K));
    }
    auto brute = ClopenSet::from_words(fib(), -K, static_cast<size_t>(2 * K), survived);
    CHECK(acc.domain.same_set(brute));
  }
  CHECK(done >= 40);
}

TEST_CASE("trivial isotropy at the basepoint") {
  auto w0 = CantorPoint::basepoint(fib());
  auto W = ClopenSet::point_cylinder(w0, 40);
  auto f = filtration(w0, W, Rat(50), 256, Direction::TwoSided);
  for (const auto& g : f.germs) {
    if (g.exponent == 0) continue;
    // the germ lands in the small cylinder but never back at w0 itself
    size_t cap = 64 + static_cast<size_t>(8 * std::abs(g.exponent));
    CHECK_FALSE(w0.translated(g.exponent).same_cylinder(w0, cap));
  }
  CHECK(f.has_exponent(0));
}

TEST_CASE("filtration elements factor through first returns") {
  auto w0 = CantorPoint::basepoint(fib());
  auto rs = induced_generators(cyl("a"));
  auto f = filtration(w0, cyl("a"), Rat(12), 128, Direction::Forward);
  for (const auto& g : f.germs) {
    long long acc = 0;
    while (acc < g.exponent) {
      auto x = w0.translated(acc);
      bool stepped = false;
      for (const auto& gen : rs.generators)
        if (gen.domain.contains(x)) {
          acc += gen.power();
          stepped = true;
          break;
        }
      REQUIRE(stepped);
    }
    CHECK(acc == g.exponent);
  }
}

TEST_CASE("classification evidence") {
  auto rf = classify_at_depth(fib(), 8, Rat(1, 2));
  CHECK(rf.expansive);
  auto rd = classify_at_depth(dyadic(), 8, Rat(1, 2));
  CHECK(rd.equicontinuous);
  CHECK_THROWS_AS((void)classify_at_depth(fib(), 0, Rat(1, 2)), Error);
}

TEST_CASE("filtration dump format") {
  auto w0 = CantorPoint::basepoint(fib());
  auto f = filtration(w0, cyl("a"), Rat(3), 64, Direction::Forward);
  CHECK(dump_filtration(f) ==
        "0, 0, {[a]}\n"
        "2, 2, {[a]@2}\n"
        "3, 3, {[a]@3}\n");
}

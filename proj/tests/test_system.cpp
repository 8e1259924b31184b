#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mbx/system.hpp"

using namespace mbx;

namespace {

// independent oracle: iterate the substitution naively on the seed symbol
std::string iterate_naive(const SubstitutionRule& r, const std::string& seed, int times) {
  std::string cur = seed;
  for (int i = 0; i < times; ++i) {
    std::string next;
    for (char c : cur) {
      Sym s = *r.alphabet.find(std::string(1, c));
      for (Sym t : r.images[s]) next += r.alphabet.name(t);
    }
    cur = next;
  }
  return cur;
}

}  // namespace

TEST_CASE("validation accepts Fibonacci as primitive and aperiodic") {
  auto rep = validate_system(fibonacci_rule());
  CHECK(rep.accepted);
  CHECK(rep.primitive);
  CHECK(rep.aperiodic);
}

TEST_CASE("validation rejects the constant rule with REJECT_PERIODIC") {
  SubstitutionRule r;
  r.alphabet.symbols = {"a"};
  r.images = {{0, 0}};
  r.tile_lengths = {Rat(1)};
  auto rep = validate_system(r);
  CHECK_FALSE(rep.accepted);
  CHECK(rep.primitive);
  CHECK(rep.witness.find("REJECT_PERIODIC") == 0);
}

TEST_CASE("validation rejects a reducible rule with REJECT_NOT_PRIMITIVE") {
  SubstitutionRule r;  // b never reaches a
  r.alphabet.symbols = {"a", "b"};
  r.images = {{0, 1}, {1, 1}};
  r.tile_lengths = {Rat(1), Rat(1)};
  auto rep = validate_system(r);
  CHECK_FALSE(rep.accepted);
  CHECK_FALSE(rep.primitive);
  CHECK(rep.witness.find("REJECT_NOT_PRIMITIVE") == 0);
}

TEST_CASE("dyadic odometer chain is always accepted") {
  auto rep = validate_system(dyadic_spec());
  CHECK(rep.accepted);
}

TEST_CASE("fixed point prefixes") {
  auto fib = SubshiftSystem::create(fibonacci_rule());
  CHECK(fixed_point_prefix(*fib, 5) == "abaab");
  CHECK(fixed_point_prefix(*fib, 1) == "a");
  // oracle: three substitution iterations from the seed
  CHECK(fixed_point_prefix(*fib, 13) == iterate_naive(fibonacci_rule(), "a", 6).substr(0, 13));

  auto tm = SubshiftSystem::create(thue_morse_rule());
  CHECK(fixed_point_prefix(*tm, 8) == "abbabaab");
}

TEST_CASE("two-sided extension is a legal substitution-invariant word") {
  auto fib = SubshiftSystem::create(fibonacci_rule());
  // left extension: limit of S^2k(b) right-aligned; spot-check the boundary
  // ... x_-3 x_-2 x_-1 | x_0 x_1 ... must have every factor legal
  for (long long i = -40; i < 40; ++i) {
    std::string w;
    for (long long j = i; j < i + 3; ++j) w += fib->alphabet().name(fib->coord(j));
    CHECK(w.find("bb") == std::string::npos);
    CHECK(w != "aaa");
  }
  // seed search picks the least legal pair (a.a); left word is lim S^2k(a),
  // which ends ...abaababa
  CHECK(fib->alphabet().name(fib->coord(-1)) == "a");
  CHECK(fib->alphabet().name(fib->coord(-2)) == "b");
  CHECK(fib->alphabet().name(fib->coord(-3)) == "a");
  // invariance of the two-sided point under S^2: S^2(x) realigned at the
  // origin must reproduce x (spot check through a window)
  auto s2 = [&](std::string w) {
    std::string out;
    for (char c : w) out += (c == 'a') ? "aba" : "ab";
    return out;
  };
  std::string left;
  for (long long j = -12; j < 0; ++j) left += fib->alphabet().name(fib->coord(j));
  std::string img = s2(left);  // image of coordinates [-12,0) ends at the origin
  for (size_t j = 1; j <= img.size() && j <= 12; ++j)
    CHECK(img[img.size() - j] == fib->alphabet().name(fib->coord(-(long long)j))[0]);
}

TEST_CASE("metric distance") {
  auto sys = make_system(fibonacci_rule());
  auto w0 = CantorPoint::basepoint(sys);
  CHECK(metric_distance(w0, w0, 64) == Rat(0));

  // prefixes aba... vs abb...: the fixed point starts abaab; sigma^1 gives baab...,
  // sigma^3 gives ab a b a...  find two orbit points with prefixes ab a vs ab b
  // x = w0 (abaab...), y = sigma^3(w0) = ab abaababaab..?  compute honestly:
  auto y = w0.translated(3);  // prefix of sigma^3: a b a b ...
  // w0: a b a a ..., y: a b a b ... -> first disagreement at coordinate 3
  CHECK(metric_distance(w0, y, 64) == pow2(-3));

  auto z = w0.translated(1);  // b a a b...
  CHECK(metric_distance(w0, z, 64) == Rat(1));

  auto dy = make_system(dyadic_spec());
  auto p = CantorPoint::basepoint(dy);
  auto q = p.translated(8);  // same mod 8, different mod 16
  CHECK(metric_distance(p, q, 64) == Rat(1, 8));
}

TEST_CASE("language enumeration") {
  auto fib = SubshiftSystem::create(fibonacci_rule());
  auto l2 = language_words(*fib, 2);
  CHECK(l2 == std::vector<std::string>{"aa", "ab", "ba"});
  auto l1 = language_words(*fib, 1);
  CHECK(l1 == std::vector<std::string>{"a", "b"});

  auto tm = SubshiftSystem::create(thue_morse_rule());
  auto l3 = language_words(*tm, 3);
  CHECK(l3.size() == 6);
  CHECK(std::find(l3.begin(), l3.end(), "aaa") == l3.end());
  CHECK(std::find(l3.begin(), l3.end(), "bbb") == l3.end());
}

TEST_CASE("language closure under prefix and suffix") {
  for (auto rule : {fibonacci_rule(), thue_morse_rule()}) {
    auto sys = SubshiftSystem::create(rule);
    for (size_t n = 1; n <= 12; ++n) {
      auto wn = language_words(*sys, n);
      std::set<std::string> shorter;
      for (auto& w : language_words(*sys, n + 1)) {
        shorter.insert(w.substr(0, n));
        shorter.insert(w.substr(1));
      }
      for (auto& w : shorter)
        CHECK(std::find(wn.begin(), wn.end(), w) != wn.end());
    }
  }
}

TEST_CASE("ultrametric inequality on sampled triples") {
  auto sys = make_system(fibonacci_rule());
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    auto x = CantorPoint::orbit(sys, static_cast<long long>(rng() % 500));
    auto y = CantorPoint::orbit(sys, static_cast<long long>(rng() % 500));
    auto z = CantorPoint::orbit(sys, static_cast<long long>(rng() % 500));
    Rat dxz = metric_distance(x, z, 48);
    Rat dxy = metric_distance(x, y, 48);
    Rat dyz = metric_distance(y, z, 48);
    CHECK(dxz <= std::max(dxy, dyz));
  }
}

TEST_CASE("minimality proxy: linear repetitivity at small depths") {
  auto fib = SubshiftSystem::create(fibonacci_rule());
  for (size_t n = 1; n <= 8; ++n) {
    for (size_t p : fib->language(n)) {
      // find the largest gap between occurrences in a long window
      const auto& occ = fib->occurrences(p, n);
      REQUIRE(occ.size() >= 2);
      size_t gap = occ.front() + n;  // first occurrence bound
      for (size_t i = 1; i < occ.size(); ++i) gap = std::max(gap, occ[i] - occ[i - 1]);
      CHECK(gap <= 40 * n);  // finite, desk-scale bound
      // every window of length gap + n contains the word
      size_t window = gap + n;
      for (size_t start = 0; start + window < 4000; start += 97) {
        bool found = false;
        for (size_t q = start; q + n <= start + window; ++q)
          if (fib->same_word(q, p, n)) { found = true; break; }
        CHECK(found);
      }
    }
  }
}

// Every nonzero shift moves the basepoint: by minimality deep prefixes do
// recur (p_64 recurs at k = 55 in Fibonacci), so a fixed 64-deep window
// cannot separate all k <= 256; the disagreement scan is adaptive instead.
TEST_CASE("freeness: no shift k <= 256 fixes the basepoint") {
  auto sys = make_system(fibonacci_rule());
  auto w0 = CantorPoint::basepoint(sys);
  for (long long k = 1; k <= 256; ++k) {
    size_t cap = 64 + static_cast<size_t>(8 * k);
    CHECK_FALSE(w0.translated(k).same_cylinder(w0, cap));
  }
}

TEST_CASE("odometer residue arithmetic with carry") {
  auto dy = make_system(dyadic_spec());
  auto p = CantorPoint::orbit(dy, 3);
  auto q = p.translated(1);  // 3 + 1 = 4: coset 0 mod 4, coset 4 mod 8
  CHECK(q.residue(2) == ZVec{0, 0});
  CHECK(q.residue(3) == ZVec{4, 0});
}

TEST_CASE("Z^2 odometer residues") {
  OdometerSpec s;
  s.dimension = 2;
  s.bases.push_back({2, 0, 0, 2});
  s.bases.push_back({4, 0, 0, 4});
  auto rep = validate_system(s);
  CHECK(rep.accepted);
  auto sys = OdometerSystem::create(s);
  CHECK(sys->index_at(1) == 4);
  CHECK(sys->index_at(2) == 16);
  CHECK(sys->reduce(1, {5, -3}) == ZVec{1, 1});
  CHECK(sys->children(1, {1, 1}).size() == 4);
}

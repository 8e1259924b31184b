#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mbx/delone.hpp"

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

SystemPtr z2() {
  static SystemPtr s = [] {
    OdometerSpec sp;
    sp.dimension = 2;
    sp.bases.push_back({2, 0, 0, 2});
    sp.bases.push_back({4, 0, 0, 4});
    return make_system(sp);
  }();
  return s;
}

std::vector<Rat> positions(const DeloneNet& n) {
  std::vector<Rat> out;
  for (const auto& p : n.points) out.push_back(p.pos);
  return out;
}

// independent oracle: derive the two-sided Fibonacci extension by iterating
// S^2 on the seed pair (a.a) directly
std::string left_word_oracle(int steps) {
  std::string left = "a";
  auto s2 = [](const std::string& w) {
    std::string out;
    for (char c : w) out += (c == 'a') ? "aba" : "ab";
    return out;
  };
  for (int i = 0; i < steps; ++i) left = s2(left);
  return left;  // coordinates ..., -2, -1 are the trailing symbols
}

}  // namespace

TEST_CASE("dyadic net of the mod-4 coset") {
  auto w0 = CantorPoint::basepoint(dyadic());
  auto W = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto n = net(w0, W, Rat(10), 64);
  CHECK(positions(n) == std::vector<Rat>{-8, -4, 0, 4, 8});
}

TEST_CASE("Fibonacci net of [a] at radius 5") {
  auto w0 = CantorPoint::basepoint(fib());
  auto n = net(w0, ClopenSet::cylinder(fib(), "a"), Rat(5), 64);
  // forward: positions of 'a' in abaab(a...) at 0,2,3,5
  // backward: from the two-sided extension, computed by the oracle below
  std::string left = left_word_oracle(6);
  std::vector<Rat> expect;
  for (int k = 5; k >= 1; --k)
    if (left[left.size() - static_cast<size_t>(k)] == 'a') expect.push_back(Rat(-k));
  for (long long k : {0, 2, 3, 5}) expect.push_back(Rat(k));
  CHECK(positions(n) == expect);
  // and the oracle's backward hits are {-5,-3,-1}
  CHECK(expect.size() == 7);
  CHECK(expect[0] == Rat(-5));
  CHECK(expect[1] == Rat(-3));
  CHECK(expect[2] == Rat(-1));
}

TEST_CASE("net over the whole space is every integer in the window") {
  auto w0 = CantorPoint::basepoint(fib());
  auto n = net(w0, ClopenSet::whole(fib()), Rat(4), 64);
  CHECK(positions(n) == std::vector<Rat>{-4, -3, -2, -1, 0, 1, 2, 3, 4});
}

TEST_CASE("stats: Fibonacci [a]") {
  auto w0 = CantorPoint::basepoint(fib());
  auto n = net(w0, ClopenSet::cylinder(fib(), "a"), Rat(30), 256);
  auto st = stats(n);
  CHECK(st.lambda1.exact_value() == Rat(1));
  CHECK(st.covering_radius.exact_value() == Rat(1));  // max gap 2
  CHECK(st.alpha_W == 1);
  CHECK(st.e_W == Rat(3));
}

TEST_CASE("stats: dyadic mod-4 coset") {
  auto w0 = CantorPoint::basepoint(dyadic());
  auto W = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto n = net(w0, W, Rat(30), 256);
  auto st = stats(n);
  CHECK(st.lambda1.exact_value() == Rat(4));
  CHECK(st.covering_radius.exact_value() == Rat(2));
  CHECK(st.alpha_W == 3);
  CHECK(st.e_W == Rat(7));
  CHECK_THROWS_AS((void)stats(net(w0, W, Rat(1), 64)), Error);
}

TEST_CASE("Z^2 net and stats") {
  auto w0 = CantorPoint::basepoint(z2());
  auto n = net(w0, ClopenSet::whole(z2()), Rat(3), 64);
  CHECK(n.dim == 2);
  CHECK(n.points.size() == 29);  // lattice points with x^2+y^2 <= 9
  auto st = stats(n);
  CHECK(st.lambda1.exact_value() == Rat(1));
  CHECK(st.covering_radius.squared() == Rat(1, 2));
  CHECK(st.alpha_W == 0);

  auto c = ClopenSet::coset(z2(), 1, {0, 0});
  auto n2 = net(w0, c, Rat(4), 64);
  auto st2 = stats(n2);
  CHECK(st2.lambda1.exact_value() == Rat(2));
  CHECK(st2.covering_radius.squared() == Rat(2));
  CHECK(st2.alpha_W == 2);  // residue (1,1) needs |g|_1 = 2
}

TEST_CASE("lambda1 profiles") {
  auto wd = CantorPoint::basepoint(dyadic());
  std::vector<ClopenSet> chain;
  for (size_t k = 1; k <= 3; ++k) chain.push_back(ClopenSet::coset(dyadic(), k, {0, 0}));
  auto prof = lambda1_profile(wd, chain, Rat(40), 256);
  REQUIRE(prof.size() == 3);
  CHECK(prof[0].exact_value() == Rat(2));
  CHECK(prof[1].exact_value() == Rat(4));
  CHECK(prof[2].exact_value() == Rat(8));

  auto wf = CantorPoint::basepoint(fib());
  std::vector<ClopenSet> lv = {ClopenSet::cylinder(fib(), "a"), ClopenSet::cylinder(fib(), "aa")};
  auto pf = lambda1_profile(wf, lv, Rat(40), 256);
  CHECK(pf[0].exact_value() == Rat(1));
  CHECK(pf[1].exact_value() == Rat(3));

  auto same = lambda1_profile(wf, {lv[0], lv[0]}, Rat(40), 256);
  CHECK(same[0] == same[1]);

  // exact global lambda1 agrees with the windowed value here
  CHECK(exact_lambda1(ClopenSet::cylinder(fib(), "aa")) == Rat(3));
}

TEST_CASE("Delone window property and Lemma-style covering bound") {
  auto w0 = CantorPoint::basepoint(fib());
  for (const char* word : {"a", "aa", "ab"}) {
    auto W = ClopenSet::cylinder(fib(), word);
    auto n = net(w0, W, Rat(60), 512);
    auto st = stats(n);
    // separation: consecutive gaps >= lambda1 (exact)
    for (size_t i = 0; i + 1 < n.points.size(); ++i) {
      Rat g = n.points[i + 1].pos - n.points[i].pos;
      CHECK(LeafLength::from_value(g) >= st.lambda1);
    }
    // covering: every leaf position in the middle of the window is within
    // covering_radius of the net
    CHECK(st.covering_radius.leq(Rat(2) * st.e_W));
    // e_W-density bound: covering radius <= (2 alpha + 1) max_tile
    CHECK(st.covering_radius.leq(st.e_W));
  }
}

TEST_CASE("window consistency") {
  auto w0 = CantorPoint::basepoint(fib());
  auto W = ClopenSet::cylinder(fib(), "a");
  auto big = net(w0, W, Rat(9), 128);
  auto small = net(w0, W, Rat(4), 128);
  std::vector<Rat> trimmed;
  for (const auto& p : big.points)
    if (p.pos >= Rat(-4) && p.pos <= Rat(4)) trimmed.push_back(p.pos);
  CHECK(trimmed == positions(small));
}

TEST_CASE("net dump is stable") {
  auto w0 = CantorPoint::basepoint(dyadic());
  auto W = ClopenSet::coset(dyadic(), 2, {0, 0});
  auto n = net(w0, W, Rat(8), 64);
  CHECK(dump_net(n) ==
        "-8, {0 mod 4}\n"
        "-4, {0 mod 4}\n"
        "0, {0 mod 4}\n"
        "4, {0 mod 4}\n"
        "8, {0 mod 4}\n");
}

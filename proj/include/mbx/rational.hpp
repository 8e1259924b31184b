#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace mbx {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// 2^k for k of either sign.
inline Rat pow2(long k) {
  Int one = 1;
  if (k >= 0) return Rat(one << k);
  return Rat(one, one << (-k));
}

inline std::string rat_str(const Rat& r) {
  if (boost::multiprecision::denominator(r) == 1)
    return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

// Parses "p", "p/q", or a plain decimal integer string. Returns nullopt on junk.
std::optional<Rat> rat_parse(const std::string& s);

// floor(num/den) for exact integers.
inline Int floor_div(const Int& num, const Int& den) {
  Int q = num / den, r = num % den;
  if (r != 0 && ((r < 0) != (den < 0))) --q;
  return q;
}

inline long to_long(const Int& v) { return static_cast<long>(v); }

// Exact square root if the rational is a perfect square of a rational.
std::optional<Rat> rat_sqrt_exact(const Rat& r);

// A nonnegative length compared through its square, so that Euclidean lengths
// of rational vectors stay exact even when irrational.
class LeafLength {
 public:
  LeafLength() : sq_(0) {}
  static LeafLength from_value(const Rat& v) { return LeafLength(v * v); }
  static LeafLength from_squared(const Rat& s) { return LeafLength(s); }

  const Rat& squared() const { return sq_; }
  std::optional<Rat> exact_value() const { return rat_sqrt_exact(sq_); }

  bool operator<(const LeafLength& o) const { return sq_ < o.sq_; }
  bool operator==(const LeafLength& o) const { return sq_ == o.sq_; }
  bool operator<=(const LeafLength& o) const { return sq_ <= o.sq_; }
  bool operator>(const LeafLength& o) const { return sq_ > o.sq_; }
  bool operator>=(const LeafLength& o) const { return sq_ >= o.sq_; }

  // compare with a nonnegative rational value
  bool less_than(const Rat& v) const { return sq_ < v * v; }
  bool greater_than(const Rat& v) const { return sq_ > v * v; }
  bool leq(const Rat& v) const { return sq_ <= v * v; }

  std::string str() const;

 private:
  explicit LeafLength(const Rat& s) : sq_(s) {}
  Rat sq_;
};

}  // namespace mbx

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mbx/error.hpp"
#include "mbx/rational.hpp"

namespace mbx {

using Sym = uint8_t;

struct Alphabet {
  std::vector<std::string> symbols;  // index is the internal Sym

  size_t size() const { return symbols.size(); }
  std::optional<Sym> find(const std::string& name) const;
  const std::string& name(Sym s) const { return symbols.at(s); }
  void validate() const;
};

struct SubstitutionRule {
  Alphabet alphabet;
  std::vector<std::vector<Sym>> images;  // per symbol
  std::vector<Rat> tile_lengths;         // per symbol, positive

  void validate_shape() const;
  // counts of symbol b in the image of a: M[b][a]
  std::vector<std::vector<Int>> matrix() const;
  bool primitive() const;
};

struct OdometerSpec {
  int dimension = 1;  // 1 or 2
  // d=1: moduli of the subgroup chain m_1 | m_2 | ..., strictly increasing.
  std::vector<long long> moduli;
  // d=2: row-major 2x2 integer bases; rows are generators of the subgroup.
  std::vector<std::array<long long, 4>> bases;
  // optional: extend the chain past its explicit tail by this integer factor
  long long extend_ratio = 0;

  void validate_shape() const;
};

struct ValidationReport {
  bool accepted = false;
  bool primitive = false;
  bool aperiodic = false;
  std::string witness;  // human-readable evidence
};

class SubshiftSystem;
class OdometerSystem;

class System : public std::enable_shared_from_this<System> {
 public:
  enum class Kind { Subshift, OdometerZ, OdometerZ2 };
  virtual ~System() = default;
  virtual Kind kind() const = 0;
  virtual std::string describe() const = 0;

  bool is_subshift() const { return kind() == Kind::Subshift; }
  const SubshiftSystem& sub() const;
  const OdometerSystem& odo() const;

  // max tile length (odometers: 1)
  virtual Rat max_tile() const = 0;
  virtual Rat min_tile() const = 0;
};

using SystemPtr = std::shared_ptr<const System>;

// Word-class index over an ever-growing scanned prefix of the substitution
// fixed point.  Uses rank-doubling tables so that any factor, addressed as
// (position, length) into the prefix, gets an O(1) total order and O(1)
// canonical id.
class PrefixIndex {
 public:
  void build(const std::vector<Sym>& s, size_t alphabet_size);
  size_t size() const { return n_; }

  // total-order key of the word s[pos, pos+len); valid if pos+len <= size()
  std::pair<int32_t, int32_t> key(size_t pos, size_t len) const;
  bool same(size_t p, size_t q, size_t len) const { return key(p, len) == key(q, len); }
  bool less(size_t p, size_t q, size_t len) const;

 private:
  size_t n_ = 0;
  std::vector<std::vector<int32_t>> rank_;
  std::vector<size_t> level_len_;
};

class SubshiftSystem final : public System {
 public:
  static std::shared_ptr<const SubshiftSystem> create(SubstitutionRule rule);

  Kind kind() const override { return Kind::Subshift; }
  std::string describe() const override;
  Rat max_tile() const override;
  Rat min_tile() const override;

  const SubstitutionRule& rule() const { return rule_; }
  const Alphabet& alphabet() const { return rule_.alphabet; }

  // coordinate of the two-sided fixed point; i may be negative
  Sym coord(long long i) const;
  Rat tile(Sym s) const { return rule_.tile_lengths[s]; }

  // factors of the subshift language, length n, as canonical prefix positions
  std::vector<size_t> language(size_t n) const;
  size_t language_count(size_t n) const;

  // canonical position (first occurrence in the scanned prefix) of the word at
  // (pos, len); requires the word to lie in the scanned prefix
  size_t canon(size_t pos, size_t len) const;
  // first occurrence of the word of length len sitting at signed leaf offset
  // `off` of the fixed point (off may be negative)
  size_t canon_at_offset(long long off, size_t len) const;

  bool same_word(size_t p, size_t q, size_t len) const { return index_.same(p, q, len); }
  bool less_word(size_t p, size_t q, size_t len) const { return index_.less(p, q, len); }

  // all occurrence positions of the word (pos,len) in the scanned prefix
  const std::vector<size_t>& occurrences(size_t pos, size_t len) const;

  std::string spell(size_t pos, size_t len) const;
  // raw symbol at a scanned-prefix position
  Sym symbol_at(size_t pos) const { return fwd_.at(pos); }
  // canonical position of an explicit word, if legal
  std::optional<size_t> find_word(const std::vector<Sym>& w) const;

  // make sure the scanned prefix is long enough that the set of length-n
  // factors is provably complete; throws DepthInsufficient past the cap
  void ensure_language(size_t n) const;
  size_t scanned_length() const { return fwd_.size(); }

  const PrefixIndex& index() const { return index_; }

 private:
  SubshiftSystem() = default;
  void grow(size_t target_len) const;
  void rebuild_index() const;

  SubstitutionRule rule_;
  Sym fwd_seed_ = 0, bwd_seed_ = 0;
  int seed_power_ = 1;  // S^k fixes both seeds
  mutable std::vector<Sym> fwd_;
  mutable std::vector<size_t> stage_lens_;  // fwd_ sizes after each substitution stage
  mutable std::vector<Sym> bwd_;            // bwd_[i] = coordinate -(i+1)
  mutable PrefixIndex index_;
  mutable std::map<size_t, size_t> complete_len_;  // n -> prefix length at which provably complete
  mutable std::map<std::pair<std::pair<int32_t, int32_t>, size_t>, std::vector<size_t>> occ_cache_;
  mutable std::set<size_t> occ_built_;
  mutable std::map<size_t, std::vector<size_t>> lang_cache_;
  mutable std::map<std::pair<size_t, size_t>, size_t> stage_count_cache_;
};

struct ZVec {
  long long x = 0, y = 0;
  bool operator==(const ZVec& o) const = default;
  auto operator<=>(const ZVec& o) const = default;
};

class OdometerSystem final : public System {
 public:
  static std::shared_ptr<const OdometerSystem> create(OdometerSpec spec);

  Kind kind() const override;
  std::string describe() const override;
  Rat max_tile() const override { return Rat(1); }
  Rat min_tile() const override { return Rat(1); }

  int dimension() const { return spec_.dimension; }
  const OdometerSpec& spec() const { return spec_; }

  // number of chain levels available (level 0 = whole group)
  size_t depth_cap() const;
  // index [Z^d : G_k]
  long long index_at(size_t level) const;
  // canonical residue of v modulo G_k
  ZVec reduce(size_t level, ZVec v) const;
  // all residues mod G_k, in canonical order
  std::vector<ZVec> residues(size_t level) const;
  // residues of G_{k+1} inside residue r of G_k
  std::vector<ZVec> children(size_t level, ZVec r) const;
  // numeric id of a residue within residues(level)
  long long residue_id(size_t level, ZVec r) const;

  // d=1 modulus at level (level >= 1)
  long long modulus(size_t level) const;
  // d=2 reduced basis rows at level
  std::array<long long, 4> basis(size_t level) const;

 private:
  OdometerSystem() = default;
  void ensure_level(size_t level) const;

  OdometerSpec spec_;
  // Hermite-normal-form data per level (d=2): a,b,0,d with a>0, d>0, 0<=b<a? we
  // keep rows (a,b),(0,d) with 0 <= b < d after reduction
  mutable std::vector<std::array<long long, 4>> hnf_;
  mutable std::vector<long long> idx_;
};

// A transversal point. Subshift points are leafwise translates of the
// two-sided fixed point (the basepoint orbit is dense, so sampled points are
// drawn from it). Odometer points carry an explicit residue chain.
class CantorPoint {
 public:
  static CantorPoint basepoint(SystemPtr sys);
  static CantorPoint orbit(SystemPtr sys, long long shift);        // subshift / d=1 odometer
  static CantorPoint orbit2(SystemPtr sys, ZVec shift);            // d=2 odometer
  static CantorPoint odo_point(SystemPtr sys, std::vector<ZVec> residue_chain);

  const SystemPtr& system() const { return sys_; }

  // subshift: symbol at coordinate i of the point
  Sym coord(long long i) const;
  // odometer: residue at chain level k
  ZVec residue(size_t level) const;

  bool is_orbit() const { return residues_.empty(); }
  long long offset() const { return off_.x; }
  ZVec offset2() const { return off_; }

  CantorPoint translated(long long n) const;  // shift/translation along the leaf
  CantorPoint translated2(ZVec g) const;

  // depth-k cylinder data; see metric_distance
  bool same_cylinder(const CantorPoint& other, size_t depth) const;

 private:
  SystemPtr sys_;
  ZVec off_{0, 0};
  std::vector<ZVec> residues_;  // nonempty for explicit odometer points
};

// ---- module operations ----

ValidationReport validate_system(const SubstitutionRule& rule, long period_bound = 64);
ValidationReport validate_system(const OdometerSpec& spec);

// first n symbols of the substitution fixed point, as display string
std::string fixed_point_prefix(const SubshiftSystem& sys, size_t n);

// 2^-k ultrametric at first disagreement, 0 if equal through depth_cap
Rat metric_distance(const CantorPoint& x, const CantorPoint& y, size_t depth_cap);

// legal words of length n, spelled out, lexicographic
std::vector<std::string> language_words(const SubshiftSystem& sys, size_t n);

SystemPtr make_system(const SubstitutionRule& rule);
SystemPtr make_system(const OdometerSpec& spec);

// convenience builders used all over the tests
SubstitutionRule fibonacci_rule();
SubstitutionRule thue_morse_rule();
OdometerSpec dyadic_spec(size_t depth = 40);

}  // namespace mbx

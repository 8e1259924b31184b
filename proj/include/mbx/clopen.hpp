#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbx/system.hpp"

namespace mbx {

// Exact clopen subsets of the transversal.
//
// Subshift sets are stored on a coordinate window [anchor, anchor+len) as the
// list of legal words pinned there; holonomy transport is then a pure anchor
// shift. Odometer sets are residue lists at a chain level. Both forms are
// closed under the Boolean operations, which expand operands to a common
// window/level first.
//
// Metric convention: the ultrametric sees coordinates >= 0 (respectively
// chain levels). Diameters are measured on the stated window: a depth-k
// cylinder has diameter exactly 2^-k, and constraints at negative
// coordinates are resolved through the language before measuring.
class ClopenSet {
 public:
  ClopenSet() = default;

  static ClopenSet whole(SystemPtr sys);
  static ClopenSet empty(SystemPtr sys);
  // subshift: cylinder at the given anchor from an explicit word
  static ClopenSet cylinder(SystemPtr sys, const std::string& word, long long anchor = 0);
  static ClopenSet from_words(SystemPtr sys, long long anchor, size_t len,
                              std::vector<size_t> word_positions);
  // subshift: depth-n cylinder containing a point, anchored at 0
  static ClopenSet point_cylinder(const CantorPoint& p, size_t depth);
  // odometer: single coset / residue list at a chain level
  static ClopenSet coset(SystemPtr sys, size_t level, ZVec residue);
  static ClopenSet from_residues(SystemPtr sys, size_t level, std::vector<ZVec> residues);

  const SystemPtr& system() const { return sys_; }
  bool valid() const { return sys_ != nullptr; }
  bool is_empty() const;
  bool is_whole() const;

  bool contains(const CantorPoint& p) const;
  bool subset_of(const ClopenSet& o) const;
  bool intersects(const ClopenSet& o) const;
  bool same_set(const ClopenSet& o) const;

  // exact transport: image under sigma^n (subshift) or +g (odometer)
  ClopenSet image(long long n) const;
  ClopenSet image2(ZVec g) const;
  ClopenSet preimage(long long n) const { return image(-n); }

  Rat diameter() const;

  // subshift payload (valid when the system is a subshift)
  long long anchor() const { return anchor_; }
  size_t word_len() const { return len_; }
  const std::vector<size_t>& word_positions() const { return words_; }
  // odometer payload
  size_t level() const { return level_; }
  const std::vector<ZVec>& residues() const { return cells_; }

  // expansion to an explicit window / level (exact, language-aware)
  ClopenSet expanded(long long anchor, size_t len) const;
  ClopenSet at_level(size_t level) const;

  // number of cells in the stored form
  size_t cell_count() const;

  // canonical textual rendering, stable across runs
  std::string render() const;

  // lexicographically least cell, used for canonical partition order
  std::string least_cell_key() const;

 private:
  void normalize(bool collapse = true);

  SystemPtr sys_;
  // subshift
  long long anchor_ = 0;
  size_t len_ = 0;
  bool all_ = false;
  std::vector<size_t> words_;  // canonical positions, sorted lexicographically
  // odometer
  size_t level_ = 0;
  std::vector<ZVec> cells_;  // sorted by residue id
};

ClopenSet intersect(const ClopenSet& a, const ClopenSet& b);
ClopenSet unite(const ClopenSet& a, const ClopenSet& b);
ClopenSet subtract(const ClopenSet& a, const ClopenSet& b);

// exact min distance between disjoint nonempty sets (first-disagreement metric)
Rat distance(const ClopenSet& a, const ClopenSet& b);

struct Partition {
  ClopenSet ambient;
  std::vector<ClopenSet> blocks;

  size_t size() const { return blocks.size(); }
  const ClopenSet& operator[](size_t i) const { return blocks[i]; }

  // index of the block containing p
  std::optional<size_t> block_of(const CantorPoint& p) const;
  std::optional<size_t> block_containing(const ClopenSet& s) const;

  // checks pairwise disjointness and that the union is the ambient set
  void validate() const;
};

// canonical order: lexicographic by least cell; when `front` is given, the
// block containing that point is moved first
Partition make_partition(ClopenSet ambient, std::vector<ClopenSet> blocks,
                         const CantorPoint* front = nullptr);

Partition refine_common(const Partition& p, const Partition& q);

}  // namespace mbx

#pragma once

#include <vector>

#include "mbx/delone.hpp"

namespace mbx {

// Dynamical coding of the transversal: nested clopen levels V_l, their
// W-partitions, and the refinements into constant-code blocks that the Reeb
// towers are built over.

// code of a block over a filtration's germ list: entry per exponent, the
// 1-based index of the partition block the image lands in, or 0 when it
// leaves the ambient set entirely
struct CodeWord {
  std::vector<std::pair<long long, size_t>> entries;  // (exponent, block index)
  bool operator==(const CodeWord& o) const = default;
  std::string str() const;
};

// errors: BLOCK_SPLIT if some germ maps the block across two partition
// blocks or half out of the ambient set
CodeWord code(const ClopenSet& block, const Filtration& filt, const Partition& part);

// partition of W_block into the maximal clopen sets whose forward itinerary
// at resolution {part's blocks, outside} is constant for all shifts of path
// length <= R; the block containing w comes first
Partition refine_by_code(const ClopenSet& W_block, const CantorPoint& w, const Partition& part,
                         const Rat& R, size_t scan_depth);

struct LevelConstants {
  Rat eps;                // min(1, distance(V, complement))
  long long alpha = 0;    // forward covering number of V
  Rat theta;              // (2 alpha + 1) max_tile
  Rat R_prime, R;         // coding radii: R' = 2 theta + max_tile, R = 2 R'
  Rat delta_hat_domain;   // min(eps, diam(V)/2); W-blocks stay below it
  Rat delta_hat_slice;    // sharp Reeb-slice diameter bound at this level
  Rat eta;                // exact min distance between distinct W-blocks
  Rat zeta;               // sharp local-constancy threshold
  Rat lambda1;            // exact global separation of the V-net
};

struct LevelData {
  size_t level = 1;
  ClopenSet V;
  Partition Wblocks;                              // W(l;i)
  std::vector<Partition> code_blocks;             // per i: V(l;i,j), radius R'
  std::vector<std::vector<Partition>> fine_blocks;  // per (i,j): V(l;i,j,k), radius R
  std::vector<CodeWord> code_words;               // dense code per code block (flattened)
  std::vector<CodeWord> fine_words;               // dense code per fine block (flattened)
  LevelConstants constants;

  std::vector<ClopenSet> flat_code_blocks() const;
  std::vector<ClopenSet> flat_fine_blocks() const;
  // first-return steps of each fine block to V (constant per block)
  std::vector<long long> fine_heights;
};

struct CodingHierarchy {
  SystemPtr system;
  CantorPoint basepoint;
  std::vector<LevelData> levels;
  bool dynamic = false;  // built by the nested selection rule (lambda1 > R_{l-1})
};

LevelData build_level(const CantorPoint& w0, const ClopenSet& V, size_t level_index,
                      size_t scan_depth);

// nested construction: V_{l+1} is the smallest-depth cylinder around w0
// inside V(l;1,1,1) with lambda1 > R_l and diameter at most diam(V_l)/2
CodingHierarchy build_hierarchy(const SystemPtr& sys, size_t depth, const ClopenSet& V1,
                                size_t scan_depth);

// levels driven by an explicit descending chain (the odometer's own subgroup
// chain, or substitution deflation depths); no growth condition imposed
CodingHierarchy build_chain_hierarchy(const SystemPtr& sys, const std::vector<ClopenSet>& chain,
                                      size_t scan_depth);

// the canonical chain for a system: subgroup levels 1..L for odometers,
// return-structure threshold depths for substitutions
std::vector<ClopenSet> canonical_chain(const SystemPtr& sys, size_t L);

void validate_level(const LevelData& lv, const CantorPoint& w0);
void validate_hierarchy(const CodingHierarchy& h);

std::string dump_hierarchy(const CodingHierarchy& h);

}  // namespace mbx

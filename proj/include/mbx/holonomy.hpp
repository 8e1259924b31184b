#pragma once

#include <vector>

#include "mbx/clopen.hpp"

namespace mbx {

// A pseudogroup element: a shift power (subshift), or a translation
// (odometer), carried on an exact clopen domain.
struct HolonomyElement {
  SystemPtr system;
  ZVec exponent{0, 0};  // (n,0) for subshifts and d=1 odometers
  ClopenSet domain;

  long long power() const { return exponent.x; }
  bool is_identity() const { return exponent == ZVec{0, 0}; }
};

HolonomyElement make_shift(SystemPtr sys, long long n, ClopenSet domain);
HolonomyElement make_translation(SystemPtr sys, ZVec g, ClopenSet domain);

CantorPoint apply(const HolonomyElement& h, const CantorPoint& x);
// maximal-domain composite h2 after h1
HolonomyElement compose(const HolonomyElement& h2, const HolonomyElement& h1);
HolonomyElement inverse(const HolonomyElement& h);
bool germ_equal(const HolonomyElement& h1, const HolonomyElement& h2, const CantorPoint& w);

// signed leafwise displacement of sigma^n at w (sum of tile lengths);
// its absolute value is the path length of the germ
Rat leaf_displacement(const CantorPoint& w, long long n);

enum class Direction { Forward, Backward, TwoSided };

struct Germ {
  long long exponent = 0;
  Rat path_length;
  ClopenSet domain;  // maximal clopen domain whose image stays in the target
};

struct Filtration {
  CantorPoint basepoint;
  ClopenSet target;
  Rat radius;
  Direction direction = Direction::TwoSided;
  std::vector<Germ> germs;  // ordered by exponent

  bool has_exponent(long long n) const;
};

// all germs at w with range in W and path length <= R
Filtration filtration(const CantorPoint& w, const ClopenSet& W, const Rat& R,
                      size_t scan_depth, Direction dir = Direction::TwoSided);

// first-return system of the forward action on W
struct ReturnSystem {
  ClopenSet W;
  std::vector<HolonomyElement> generators;  // domains partition W
  std::vector<Rat> min_lengths, max_lengths;
  long long max_return_steps = 0;
  long long min_return_steps = 0;
  long long alpha = 0;    // least N with X covered by forward translates of W
  Rat e_W;                // (2 alpha + 1) * max tile
  Rat beta_radius;        // certified generation radius

  Partition domain_partition() const;
};

ReturnSystem induced_generators(const ClopenSet& W, long long scan_cap = 1 << 22);

struct ClassifyReport {
  bool expansive = false;
  bool equicontinuous = false;
  Rat eps;
  size_t depth = 0;
  std::string detail;
};

// finite-depth dynamics evidence; throws INCONCLUSIVE when neither
// certificate can be produced at this depth
ClassifyReport classify_at_depth(const SystemPtr& sys, size_t depth, const Rat& eps);

// textual dump: one germ per line "exponent, path_length, domain"
std::string dump_filtration(const Filtration& f);

}  // namespace mbx

#pragma once

#include <vector>

#include "mbx/geom.hpp"
#include "mbx/holonomy.hpp"

namespace mbx {

struct NetPoint {
  ZVec steps{0, 0};   // shift exponent (d=1) or lattice vector (d=2)
  Rat pos;            // leafwise displacement along the leaf (d=1)
  Vec2R pos2;         // position in the leaf plane (d=2)
  ClopenSet label;    // transversal cylinder around the image point
};

struct DeloneNet {
  CantorPoint center;
  ClopenSet W;
  Rat radius;
  int dim = 1;
  std::vector<NetPoint> points;  // sorted by position

  bool has_step(long long n) const;
};

// return vectors v with |path(v)| <= R and sigma^v(w) in W (two-sided);
// d=2 odometers: lattice vectors in the closed Euclidean disk of radius R
DeloneNet net(const CantorPoint& w, const ClopenSet& W, const Rat& R, size_t scan_depth);

struct NetStats {
  LeafLength lambda1;          // min pairwise gap inside the window
  LeafLength covering_radius;  // exact covering radius of the window
  long long alpha_W = 0;
  Rat e_W;
};

// alpha_scan caps the covering search (NOT_MINIMAL past it)
NetStats stats(const DeloneNet& n, long long alpha_scan = 1 << 22);

// exact global separation constant of N_w^W: the least first-return length
Rat exact_lambda1(const ClopenSet& W, long long scan_cap = 1 << 22);

// lambda1 per nested level, measured on the basepoint leaf within window R
std::vector<LeafLength> lambda1_profile(const CantorPoint& w,
                                        const std::vector<ClopenSet>& levels, const Rat& R,
                                        size_t scan_depth);

// sorted dump: one net point per line "vector, label"
std::string dump_net(const DeloneNet& n);

}  // namespace mbx

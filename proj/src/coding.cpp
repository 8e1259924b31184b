#include "mbx/coding.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mbx {

std::string CodeWord::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < entries.size(); ++i)
    os << (i ? " " : "") << entries[i].first << ":" << entries[i].second;
  os << ")";
  return os.str();
}

CodeWord code(const ClopenSet& block, const Filtration& filt, const Partition& part) {
  CodeWord cw;
  auto sys = block.system();
  for (const auto& g : filt.germs) {
    ClopenSet img = sys->is_subshift() ? block.image(g.exponent) : block.image2({g.exponent, 0});
    if (!img.intersects(part.ambient)) {
      cw.entries.push_back({g.exponent, 0});
      continue;
    }
    require(img.subset_of(part.ambient), Err::BlockSplit,
            "image straddles the ambient boundary at exponent " + std::to_string(g.exponent));
    auto idx = part.block_containing(img);
    require(idx.has_value(), Err::BlockSplit,
            "image meets two partition blocks at exponent " + std::to_string(g.exponent));
    cw.entries.push_back({g.exponent, *idx + 1});
  }
  return cw;
}

namespace {

long long steps_within(const SystemPtr& sys, const Rat& R) {
  Rat steps = R / sys->min_tile();
  return to_long(floor_div(boost::multiprecision::numerator(steps),
                           boost::multiprecision::denominator(steps)));
}

// classifier of forward slices against a partition: maps the cell at a given
// shift to the 1-based block index, or 0 when it leaves the ambient set
struct SliceClassifier {
  const SystemPtr sys;
  size_t depth = 0;  // common cell depth/level of the partition blocks
  std::map<std::pair<int32_t, int32_t>, size_t> word_to_block;  // subshift
  std::map<long long, size_t> residue_to_block;                 // odometer

  static SliceClassifier build(const Partition& part) {
    SliceClassifier c{part.ambient.system()};
    if (c.sys->is_subshift()) {
      const auto& sub = c.sys->sub();
      size_t d = 1;
      for (const auto& b : part.blocks)
        if (!b.is_whole())
          d = std::max(d, static_cast<size_t>(
                              std::max<long long>(1, b.anchor() + (long long)b.word_len())));
      if (!part.ambient.is_whole())
        d = std::max(d, static_cast<size_t>(std::max<long long>(
                            1, part.ambient.anchor() + (long long)part.ambient.word_len())));
      c.depth = d;
      for (size_t i = 0; i < part.blocks.size(); ++i) {
        auto e = part.blocks[i].expanded(std::min(0LL, part.blocks[i].is_whole()
                                                           ? 0LL
                                                           : part.blocks[i].anchor()),
                                         d);
        require(e.anchor() == 0, Err::BadSpec, "partition blocks must be forward-anchored");
        for (size_t p : e.word_positions()) c.word_to_block[sub.index().key(p, d)] = i + 1;
      }
    } else {
      const auto& od = c.sys->odo();
      size_t lvl = part.ambient.is_whole() ? 0 : part.ambient.level();
      for (const auto& b : part.blocks) lvl = std::max(lvl, b.is_whole() ? 0 : b.level());
      if (lvl == 0) lvl = 1;
      c.depth = lvl;
      for (size_t i = 0; i < part.blocks.size(); ++i) {
        auto e = part.blocks[i].at_level(lvl);
        for (const auto& r : e.residues()) c.residue_to_block[od.residue_id(lvl, r)] = i + 1;
      }
    }
    return c;
  }

  size_t classify_word(size_t pos) const {  // word at (pos, depth)
    auto it = word_to_block.find(sys->sub().index().key(pos, depth));
    return it == word_to_block.end() ? 0 : it->second;
  }
  size_t classify_residue(ZVec r) const {
    const auto& od = sys->odo();
    auto it = residue_to_block.find(od.residue_id(depth, od.reduce(depth, r)));
    return it == residue_to_block.end() ? 0 : it->second;
  }
};

}  // namespace

Partition refine_by_code(const ClopenSet& W_block, const CantorPoint& w, const Partition& part,
                         const Rat& R, size_t scan_depth) {
  auto sys = W_block.system();
  require(part.ambient.system() == sys, Err::SystemMismatch, "partition from another system");
  long long N = std::max<long long>(0, steps_within(sys, R));
  auto cls = SliceClassifier::build(part);

  std::vector<ClopenSet> blocks;
  if (sys->is_subshift()) {
    const auto& sub = sys->sub();
    require(W_block.is_whole() || W_block.anchor() == 0, Err::BadSpec,
            "code refinement expects forward-anchored blocks");
    size_t D = static_cast<size_t>(N) + cls.depth;
    require(D <= scan_depth, Err::DepthInsufficient,
            "code depth " + std::to_string(D) + " exceeds scan depth " +
                std::to_string(scan_depth));
    auto e = W_block.is_whole() ? ClopenSet::whole(sys).expanded(0, D)
                                : W_block.expanded(0, D);
    const auto& cyls = e.word_positions();
    std::vector<std::vector<size_t>> classes{std::vector<size_t>(cyls.begin(), cyls.end())};
    std::vector<std::vector<size_t>> buckets(part.blocks.size() + 1);
    for (long long n = 0; n <= N; ++n) {
      std::vector<std::vector<size_t>> next;
      for (auto& cl : classes) {
        if (cl.size() == 1) {
          next.push_back(std::move(cl));
          continue;
        }
        for (size_t p : cl) buckets[cls.classify_word(p + static_cast<size_t>(n))].push_back(p);
        for (auto& b : buckets)
          if (!b.empty()) {
            next.push_back(b);
            b.clear();
          }
      }
      classes = std::move(next);
    }
    for (auto& cl : classes) blocks.push_back(ClopenSet::from_words(sys, 0, D, cl));
  } else {
    const auto& od = sys->odo();
    size_t lvl = std::max<size_t>(cls.depth, W_block.is_whole() ? 1 : W_block.level());
    require(lvl <= scan_depth, Err::DepthInsufficient, "chain level exceeds scan depth");
    auto e = W_block.at_level(lvl);
    std::vector<std::vector<ZVec>> classes{e.residues()};
    std::vector<std::vector<ZVec>> buckets(part.blocks.size() + 1);
    for (long long n = 0; n <= N; ++n) {
      std::vector<std::vector<ZVec>> next;
      for (auto& cl : classes) {
        if (cl.size() == 1) {
          next.push_back(std::move(cl));
          continue;
        }
        for (const auto& r : cl) buckets[cls.classify_residue({r.x + n, r.y})].push_back(r);
        for (auto& b : buckets)
          if (!b.empty()) {
            next.push_back(b);
            b.clear();
          }
      }
      classes = std::move(next);
    }
    for (auto& cl : classes) blocks.push_back(ClopenSet::from_residues(sys, lvl, cl));
  }
  CantorPoint front = w;
  return make_partition(W_block, std::move(blocks), &front);
}

namespace {

// dense forward itinerary of a block at the resolution {partition, outside},
// recorded sparsely as the nonzero entries
CodeWord dense_code(const ClopenSet& block, const SliceClassifier& cls, long long N) {
  CodeWord cw;
  auto sys = block.system();
  if (sys->is_subshift()) {
    size_t p = block.word_positions().front();
    for (long long n = 0; n <= N; ++n) {
      size_t e = cls.classify_word(p + static_cast<size_t>(n));
      if (e != 0) cw.entries.push_back({n, e});
    }
  } else {
    ZVec r = block.residues().front();
    for (long long n = 0; n <= N; ++n) {
      size_t e = cls.classify_residue({r.x + n, r.y});
      if (e != 0) cw.entries.push_back({n, e});
    }
  }
  return cw;
}

}  // namespace

std::vector<ClopenSet> LevelData::flat_code_blocks() const {
  std::vector<ClopenSet> out;
  for (const auto& p : code_blocks)
    for (const auto& b : p.blocks) out.push_back(b);
  return out;
}

std::vector<ClopenSet> LevelData::flat_fine_blocks() const {
  std::vector<ClopenSet> out;
  for (const auto& fam : fine_blocks)
    for (const auto& p : fam)
      for (const auto& b : p.blocks) out.push_back(b);
  return out;
}

LevelData build_level(const CantorPoint& w0, const ClopenSet& V, size_t level_index,
                      size_t scan_depth) {
  auto sys = V.system();
  LevelData lv;
  lv.level = level_index;
  lv.V = V;

  auto rs = induced_generators(V);
  LevelConstants& c = lv.constants;
  c.alpha = rs.alpha;
  c.theta = Rat(2 * rs.alpha + 1) * sys->max_tile();
  c.R_prime = 2 * c.theta + sys->max_tile();
  c.R = 2 * c.R_prime;
  c.lambda1 = rs.min_lengths[0];
  for (const auto& l : rs.min_lengths) c.lambda1 = std::min(c.lambda1, l);
  c.eps = V.is_whole() ? Rat(1) : distance(V, subtract(ClopenSet::whole(sys), V));
  c.delta_hat_domain = std::min(c.eps, Rat(V.diameter() / 2));

  // W-partition: refine V two steps past its own depth, deeper if needed for
  // kappa >= 2 and the domain margin
  std::vector<ClopenSet> wblocks;
  if (sys->is_subshift()) {
    const auto& sub = sys->sub();
    size_t d_W = V.is_whole() ? 2 : static_cast<size_t>(V.anchor() + (long long)V.word_len()) + 2;
    if (!V.is_whole()) {
      // extensions of V's word may be forced for a long stretch; jump to the
      // first depth where they branch instead of probing one depth at a time
      size_t len = V.word_len();
      size_t pos = V.word_positions().front();
      sub.ensure_language(len + 1);
      const auto& occ = sub.occurrences(pos, len);
      size_t common = sub.scanned_length();
      for (size_t i = 1; i < occ.size(); ++i) {
        size_t lo = 0, hi = std::min(common - len, sub.scanned_length() - occ[i] - len);
        hi = std::min(hi, sub.scanned_length() - occ[0] - len);
        while (lo < hi) {
          size_t mid = (lo + hi + 1) / 2;
          if (sub.same_word(occ[0] + len, occ[i] + len, mid))
            lo = mid;
          else
            hi = mid - 1;
        }
        common = std::min(common, len + lo);
      }
      d_W = std::max(d_W, common + 1);
    }
    for (;; ++d_W) {
      require(d_W <= scan_depth, Err::DepthInsufficient, "W-partition depth exceeds scan depth");
      if (pow2(-static_cast<long>(d_W)) >= c.delta_hat_domain) continue;
      auto e = V.is_whole() ? ClopenSet::whole(sys).expanded(0, d_W) : V.expanded(0, d_W);
      if (e.word_positions().size() < 2) continue;
      wblocks.clear();
      bool fine_enough = true;
      for (size_t p : e.word_positions()) {
        wblocks.push_back(ClopenSet::from_words(sys, 0, d_W, {p}));
        // canonical diameters can exceed 2^-d_W when extensions are forced
        if (!(wblocks.back().diameter() < c.delta_hat_domain)) fine_enough = false;
      }
      if (fine_enough) break;
    }
  } else {
    size_t k_W = (V.is_whole() ? 0 : V.level()) + 2;
    while (pow2(-static_cast<long>(k_W)) >= c.delta_hat_domain) ++k_W;
    auto e = V.at_level(k_W);
    for (const auto& r : e.residues())
      wblocks.push_back(ClopenSet::coset(sys, k_W, r));
  }
  lv.Wblocks = make_partition(V, std::move(wblocks), &w0);
  for (const auto& b : lv.Wblocks.blocks)
    require(b.diameter() < c.delta_hat_domain, Err::LevelStall,
            "W-block too coarse: diam " + rat_str(b.diameter()) + " vs margin " +
                rat_str(c.delta_hat_domain));

  // eta: exact minimum distance between distinct W-blocks
  c.eta = Rat(1);
  for (size_t i = 0; i < lv.Wblocks.size(); ++i)
    for (size_t j = i + 1; j < lv.Wblocks.size(); ++j)
      c.eta = std::min(c.eta, distance(lv.Wblocks[i], lv.Wblocks[j]));

  // code and fine refinements
  auto cls = SliceClassifier::build(lv.Wblocks);
  long long N_fine = steps_within(sys, c.R);
  for (const auto& wb : lv.Wblocks.blocks) {
    lv.code_blocks.push_back(refine_by_code(wb, w0, lv.Wblocks, c.R_prime, scan_depth));
    std::vector<Partition> fams;
    for (const auto& cb : lv.code_blocks.back().blocks)
      fams.push_back(refine_by_code(cb, w0, lv.Wblocks, c.R, scan_depth));
    lv.fine_blocks.push_back(std::move(fams));
  }
  for (const auto& p : lv.code_blocks)
    for (const auto& b : p.blocks)
      lv.code_words.push_back(dense_code(b, cls, steps_within(sys, c.R_prime)));
  for (const auto& fam : lv.fine_blocks)
    for (const auto& p : fam)
      for (const auto& b : p.blocks) {
        lv.fine_words.push_back(dense_code(b, cls, N_fine));
        // first-return step: the least positive exponent landing back in V
        long long h = 0;
        for (const auto& [n, e] : lv.fine_words.back().entries)
          if (n >= 1) { h = n; break; }
        require(h >= 1, Err::NonconstantHeight, "no return within the coding radius");
        lv.fine_heights.push_back(h);
      }

  // zeta: the sharp constancy threshold
  if (sys->is_subshift()) {
    const auto& sub = sys->sub();
    auto fine = lv.flat_fine_blocks();
    size_t D = fine.front().word_len();
    std::map<std::pair<int32_t, int32_t>, size_t> owner;
    for (size_t i = 0; i < fine.size(); ++i)
      for (size_t p : fine[i].word_positions()) owner[sub.index().key(p, D)] = i;
    auto e = V.is_whole() ? ClopenSet::whole(sys).expanded(0, D) : V.expanded(0, D);
    size_t max_lcp = 0;
    const auto& cyls = e.word_positions();
    for (size_t i = 0; i + 1 < cyls.size(); ++i) {
      if (owner[sub.index().key(cyls[i], D)] == owner[sub.index().key(cyls[i + 1], D)]) continue;
      size_t lo = 0, hi = D;
      while (lo < hi) {
        size_t mid = (lo + hi + 1) / 2;
        if (sub.same_word(cyls[i], cyls[i + 1], mid)) lo = mid; else hi = mid - 1;
      }
      max_lcp = std::max(max_lcp, lo);
    }
    c.zeta = pow2(-static_cast<long>(std::min(D, max_lcp + 1)));
  } else {
    size_t lvl = lv.flat_fine_blocks().front().level();
    c.zeta = pow2(-static_cast<long>(lvl));
  }

  // sharp Reeb-slice diameter bound: block diameters double per floor
  {
    auto fine = lv.flat_fine_blocks();
    Rat best(0);
    for (size_t i = 0; i < fine.size(); ++i) {
      Rat d = fine[i].diameter();
      long long h = lv.fine_heights[i];
      Rat slice = d * pow2(h - 1);
      if (sys->is_subshift()) best = std::max(best, std::min(Rat(1), slice));
      else best = std::max(best, d);  // translations preserve diameters
    }
    c.delta_hat_slice = best;
  }
  return lv;
}

void validate_level(const LevelData& lv, const CantorPoint& w0) {
  lv.Wblocks.validate();
  for (const auto& p : lv.code_blocks) p.validate();
  for (const auto& fam : lv.fine_blocks)
    for (const auto& p : fam) p.validate();
  // nesting and basepoint placement
  for (size_t i = 0; i < lv.code_blocks.size(); ++i)
    for (const auto& b : lv.code_blocks[i].blocks)
      require(b.subset_of(lv.Wblocks[i]), Err::BadSpec, "code block escapes its W-block");
  if (lv.V.contains(w0)) {
    require(lv.Wblocks[0].contains(w0), Err::BadSpec, "basepoint W-block must come first");
    require(lv.code_blocks[0].blocks[0].contains(w0), Err::BadSpec,
            "basepoint code block must come first");
    require(lv.fine_blocks[0][0].blocks[0].contains(w0), Err::BadSpec,
            "basepoint fine block must come first");
  }
  // distinct codes per refinement family
  size_t off = 0;
  for (const auto& p : lv.code_blocks) {
    for (size_t a = 0; a < p.blocks.size(); ++a)
      for (size_t b = a + 1; b < p.blocks.size(); ++b)
        require(!(lv.code_words[off + a] == lv.code_words[off + b]), Err::BadSpec,
                "equal codes inside one W-block");
    off += p.blocks.size();
  }
}

CodingHierarchy build_hierarchy(const SystemPtr& sys, size_t depth, const ClopenSet& V1,
                                size_t scan_depth) {
  CodingHierarchy h;
  h.system = sys;
  h.basepoint = CantorPoint::basepoint(sys);
  h.dynamic = true;
  require(depth >= 1, Err::BadSpec, "hierarchy depth must be >= 1");
  require(V1.contains(h.basepoint), Err::BadSpec, "V1 must contain the basepoint");
  ClopenSet V = V1;
  for (size_t l = 1; l <= depth; ++l) {
    h.levels.push_back(build_level(h.basepoint, V, l, scan_depth));
    validate_level(h.levels.back(), h.basepoint);
    if (l == depth) break;
    const auto& lv = h.levels.back();
    const ClopenSet& home = lv.fine_blocks[0][0].blocks[0];
    Rat target = lv.constants.R;
    Rat half_diam = Rat(lv.V.diameter() / 2);
    bool found = false;
    if (sys->is_subshift()) {
      // the predicate is monotone in the depth, so gallop out and bisect
      auto good = [&](size_t d) {
        auto cand = ClopenSet::point_cylinder(h.basepoint, d);
        if (!cand.subset_of(home)) return false;
        if (cand.diameter() > half_diam) return false;
        return exact_lambda1(cand) > target;
      };
      size_t hi = std::max<size_t>(home.word_len(), 2);
      while (hi <= scan_depth && !good(hi)) hi *= 2;
      if (hi <= scan_depth) {
        size_t a = 1, b = hi;
        while (a < b) {
          size_t mid = (a + b) / 2;
          if (good(mid))
            b = mid;
          else
            a = mid + 1;
        }
        V = ClopenSet::point_cylinder(h.basepoint, a);
        found = true;
      }
    } else {
      const auto& od = sys->odo();
      for (size_t k = (lv.V.is_whole() ? 1 : lv.V.level() + 1); k <= od.depth_cap(); ++k) {
        auto cand = ClopenSet::coset(sys, k, h.basepoint.residue(k));
        if (!cand.subset_of(home)) continue;
        if (cand.diameter() > half_diam) continue;
        if (exact_lambda1(cand) <= target) continue;
        V = cand;
        found = true;
        break;
      }
    }
    require(found, Err::LevelStall, "no next level inside the scan cap");
  }
  validate_hierarchy(h);
  return h;
}

CodingHierarchy build_chain_hierarchy(const SystemPtr& sys, const std::vector<ClopenSet>& chain,
                                      size_t scan_depth) {
  CodingHierarchy h;
  h.system = sys;
  h.basepoint = CantorPoint::basepoint(sys);
  h.dynamic = false;
  require(!chain.empty(), Err::BadSpec, "empty chain");
  for (size_t l = 0; l < chain.size(); ++l) {
    if (l > 0)
      require(chain[l].subset_of(chain[l - 1]), Err::BadSpec, "chain must descend");
    h.levels.push_back(build_level(h.basepoint, chain[l], l + 1, scan_depth));
    validate_level(h.levels.back(), h.basepoint);
  }
  return h;
}

std::vector<ClopenSet> canonical_chain(const SystemPtr& sys, size_t L) {
  std::vector<ClopenSet> chain;
  if (!sys->is_subshift()) {
    auto w0 = CantorPoint::basepoint(sys);
    for (size_t k = 1; k <= L; ++k)
      chain.push_back(ClopenSet::coset(sys, k, w0.residue(k)));
    return chain;
  }
  // substitution systems: prefix depths where the return-word structure of
  // the prefix cylinder changes (one deflation step per level)
  auto w0 = CantorPoint::basepoint(sys);
  const auto& sub = sys->sub();
  auto structure = [&](size_t d) {
    // distinct return words of the depth-d prefix, as (gap, word class)
    size_t pos = sub.canon_at_offset(0, d);
    size_t gmax = 0;
    while (true) {
      sub.ensure_language(d + gmax + 1);
      const auto& occ = sub.occurrences(pos, d);
      size_t g = 0;
      for (size_t i = 0; i + 1 < occ.size(); ++i) g = std::max(g, occ[i + 1] - occ[i]);
      if (g <= gmax) break;
      gmax = g;
    }
    const auto& occ = sub.occurrences(pos, d);
    std::vector<std::pair<size_t, std::pair<int32_t, int32_t>>> rets;
    for (size_t i = 0; i + 1 < occ.size(); ++i) {
      size_t g = occ[i + 1] - occ[i];
      rets.push_back({g, sub.index().key(occ[i], g)});
    }
    std::sort(rets.begin(), rets.end());
    rets.erase(std::unique(rets.begin(), rets.end()), rets.end());
    return rets;
  };
  size_t d = 1;
  auto cur = structure(d);
  chain.push_back(ClopenSet::point_cylinder(w0, d));
  while (chain.size() < L) {
    ++d;
    auto s = structure(d);
    if (s != cur) {
      chain.push_back(ClopenSet::point_cylinder(w0, d));
      cur = s;
    }
  }
  return chain;
}

void validate_hierarchy(const CodingHierarchy& h) {
  for (size_t l = 1; l < h.levels.size(); ++l) {
    const auto& prev = h.levels[l - 1];
    const auto& cur = h.levels[l];
    require(cur.V.subset_of(prev.fine_blocks[0][0].blocks[0]), Err::NotNested,
            "V_{l+1} must sit inside V(l;1,1,1)");
    if (h.dynamic) {
      require(cur.V.diameter() * 2 <= prev.V.diameter(), Err::BadSpec,
              "level diameters must at least halve");
      require(cur.constants.lambda1 > prev.constants.R, Err::BadSpec,
              "lambda1 must exceed the previous coding radius");
    }
  }
}

std::string dump_hierarchy(const CodingHierarchy& h) {
  std::ostringstream os;
  os << "system: " << h.system->describe() << "\n";
  os << "mode: " << (h.dynamic ? "dynamic" : "chain") << "\n";
  for (const auto& lv : h.levels) {
    const auto& c = lv.constants;
    os << "level " << lv.level << ": V=" << lv.V.render() << "\n";
    os << "  alpha=" << c.alpha << " theta=" << rat_str(c.theta) << " R'=" << rat_str(c.R_prime)
       << " R=" << rat_str(c.R) << " eps=" << rat_str(c.eps)
       << " delta_dom=" << rat_str(c.delta_hat_domain)
       << " delta_slice=" << rat_str(c.delta_hat_slice) << " eta=" << rat_str(c.eta)
       << " zeta=" << rat_str(c.zeta) << " lambda1=" << rat_str(c.lambda1) << "\n";
    os << "  W-blocks:";
    for (const auto& b : lv.Wblocks.blocks) os << " " << b.render();
    os << "\n";
    size_t wi = 0;
    for (const auto& p : lv.code_blocks) {
      os << "  codes of W(" << lv.level << ";" << (wi + 1) << "):";
      for (const auto& b : p.blocks) os << " " << b.render();
      os << "\n";
      ++wi;
    }
  }
  return os.str();
}

}  // namespace mbx

#include "mbx/holonomy.hpp"

#include <algorithm>
#include <sstream>

namespace mbx {

HolonomyElement make_shift(SystemPtr sys, long long n, ClopenSet domain) {
  require(domain.system() == sys, Err::SystemMismatch, "domain from another system");
  HolonomyElement h;
  h.system = std::move(sys);
  h.exponent = {n, 0};
  h.domain = std::move(domain);
  return h;
}

HolonomyElement make_translation(SystemPtr sys, ZVec g, ClopenSet domain) {
  require(domain.system() == sys, Err::SystemMismatch, "domain from another system");
  HolonomyElement h;
  h.system = std::move(sys);
  h.exponent = g;
  h.domain = std::move(domain);
  return h;
}

CantorPoint apply(const HolonomyElement& h, const CantorPoint& x) {
  require(h.system == x.system(), Err::SystemMismatch, "point from another system");
  require(h.domain.contains(x), Err::OutOfDomain, "point outside the element's domain");
  return x.translated2(h.exponent);
}

HolonomyElement compose(const HolonomyElement& h2, const HolonomyElement& h1) {
  require(h1.system == h2.system, Err::SystemMismatch, "composition across systems");
  HolonomyElement out;
  out.system = h1.system;
  out.exponent = {h1.exponent.x + h2.exponent.x, h1.exponent.y + h2.exponent.y};
  // {x in dom(h1) : h1(x) in dom(h2)}
  ClopenSet pulled = h1.system->is_subshift()
                         ? h2.domain.image(-h1.exponent.x)
                         : h2.domain.image2({-h1.exponent.x, -h1.exponent.y});
  out.domain = intersect(h1.domain, pulled);
  require(!out.domain.is_empty(), Err::EmptyComposition, "maximal domain is empty");
  return out;
}

HolonomyElement inverse(const HolonomyElement& h) {
  HolonomyElement out;
  out.system = h.system;
  out.exponent = {-h.exponent.x, -h.exponent.y};
  out.domain = h.system->is_subshift() ? h.domain.image(h.exponent.x) : h.domain.image2(h.exponent);
  return out;
}

bool germ_equal(const HolonomyElement& h1, const HolonomyElement& h2, const CantorPoint& w) {
  require(h1.domain.contains(w) && h2.domain.contains(w), Err::OutOfDomain,
          "germ comparison needs the point in both domains");
  // the tracked actions are free, so germs at a point are determined by the
  // translation exponent
  return h1.exponent == h2.exponent;
}

Rat leaf_displacement(const CantorPoint& w, long long n) {
  if (!w.system()->is_subshift()) return Rat(n);
  const auto& sub = w.system()->sub();
  Rat acc(0);
  if (n >= 0)
    for (long long j = 0; j < n; ++j) acc += sub.tile(w.coord(j));
  else
    for (long long j = n; j < 0; ++j) acc -= sub.tile(w.coord(j));
  return acc;
}

bool Filtration::has_exponent(long long n) const {
  for (const auto& g : germs)
    if (g.exponent == n) return true;
  return false;
}

Filtration filtration(const CantorPoint& w, const ClopenSet& W, const Rat& R,
                      size_t scan_depth, Direction dir) {
  require(w.system() == W.system(), Err::SystemMismatch, "target from another system");
  require(!W.is_empty(), Err::EmptyInput, "empty filtration target");
  Filtration f;
  f.basepoint = w;
  f.target = W;
  f.radius = R;
  f.direction = dir;

  auto sys = w.system();
  Rat steps = R / sys->min_tile();
  long long n_max = to_long(floor_div(boost::multiprecision::numerator(steps),
                                      boost::multiprecision::denominator(steps)));
  size_t w_extent = 0;
  if (sys->is_subshift())
    w_extent = W.is_whole() ? 1 : static_cast<size_t>(
        std::max<long long>(1, W.anchor() + static_cast<long long>(W.word_len())));
  else
    w_extent = W.is_whole() ? 0 : W.level();
  require(static_cast<size_t>(std::max<long long>(n_max, 0)) + w_extent <= scan_depth,
          Err::DepthInsufficient,
          "scan depth " + std::to_string(scan_depth) + " cannot decide membership out to " +
              std::to_string(n_max + static_cast<long long>(w_extent)));

  auto try_add = [&](long long n) {
    Rat len = leaf_displacement(w, n);
    if (len < 0) len = -len;
    if (len > R) return false;
    if (W.contains(w.translated(n))) {
      Germ g;
      g.exponent = n;
      g.path_length = len;
      g.domain = sys->is_subshift() ? W.image(-n) : W.image2({-n, 0});
      f.germs.push_back(std::move(g));
    }
    return true;
  };
  if (dir != Direction::Backward)
    for (long long n = 0; try_add(n); ++n) {}
  if (dir != Direction::Forward)
    for (long long n = (dir == Direction::Backward ? 0 : -1); try_add(n); --n) {}
  std::sort(f.germs.begin(), f.germs.end(),
            [](const Germ& a, const Germ& b) { return a.exponent < b.exponent; });
  f.germs.erase(
      std::unique(f.germs.begin(), f.germs.end(),
                  [](const Germ& a, const Germ& b) { return a.exponent == b.exponent; }),
      f.germs.end());
  return f;
}

Partition ReturnSystem::domain_partition() const {
  std::vector<ClopenSet> blocks;
  for (const auto& g : generators) blocks.push_back(g.domain);
  return make_partition(W, std::move(blocks));
}

ReturnSystem induced_generators(const ClopenSet& W, long long scan_cap) {
  require(!W.is_empty(), Err::EmptyInput, "induced generators need a nonempty set");
  auto sys = W.system();
  require(sys->is_subshift() || sys->odo().dimension() == 1, Err::BadSpec,
          "first-return systems are one-dimensional");
  ReturnSystem rs;
  rs.W = W;

  // Single forward cylinders: read the return structure off consecutive
  // occurrences in the scanned prefix. Every legal first-return word shows
  // up between consecutive occurrences once the language is complete out to
  // len + maxgap, so this is exact and avoids per-step window expansions.
  if (sys->is_subshift() && !W.is_whole() && W.anchor() == 0 && W.cell_count() == 1) {
    const auto& sub = sys->sub();
    size_t len = W.word_len();
    size_t pos = W.word_positions().front();
    size_t gmax = 0;
    while (true) {
      sub.ensure_language(len + gmax + 1);
      const auto& occ = sub.occurrences(pos, len);
      require(occ.size() >= 2, Err::NotMinimal, "no recurrence in scanned prefix");
      size_t g = 0;
      for (size_t i = 0; i + 1 < occ.size(); ++i) g = std::max(g, occ[i + 1] - occ[i]);
      if (g <= gmax) break;
      gmax = g;
    }
    require(static_cast<long long>(gmax) <= scan_cap, Err::NotMinimal,
            "no return within " + std::to_string(scan_cap) + " steps");
    const auto& occ = sub.occurrences(pos, len);
    std::map<size_t, std::vector<size_t>> by_gap;  // gap -> domain word positions
    for (size_t i = 0; i + 1 < occ.size(); ++i)
      by_gap[occ[i + 1] - occ[i]].push_back(occ[i]);
    for (auto& [g, starts] : by_gap) {
      ClopenSet dom = ClopenSet::from_words(sys, 0, len + g, std::move(starts));
      Rat mn, mx;
      bool first = true;
      for (size_t p : dom.word_positions()) {
        Rat acc(0);
        for (size_t j = 0; j < g; ++j) acc += sub.tile(sub.symbol_at(p + j));
        if (first || acc < mn) mn = acc;
        if (first || acc > mx) mx = acc;
        first = false;
      }
      rs.generators.push_back(make_shift(sys, static_cast<long long>(g), std::move(dom)));
      rs.min_lengths.push_back(mn);
      rs.max_lengths.push_back(mx);
      rs.max_return_steps = std::max(rs.max_return_steps, static_cast<long long>(g));
      rs.min_return_steps =
          rs.min_return_steps == 0 ? static_cast<long long>(g)
                                   : std::min(rs.min_return_steps, static_cast<long long>(g));
    }
    rs.alpha = rs.max_return_steps - 1;
    rs.e_W = Rat(2 * rs.alpha + 1) * sys->max_tile();
    rs.beta_radius = rs.e_W;
    for (const auto& l : rs.max_lengths)
      require(l <= rs.e_W, Err::NotMinimal, "return length exceeds the certified radius");
    return rs;
  }

  ClopenSet remaining = W;
  for (long long n = 1; !remaining.is_empty(); ++n) {
    require(n <= scan_cap, Err::NotMinimal,
            "no return within " + std::to_string(scan_cap) + " steps");
    ClopenSet back = sys->is_subshift() ? W.image(-n) : W.image2({-n, 0});
    ClopenSet dom = intersect(remaining, back);
    if (dom.is_empty()) continue;
    remaining = subtract(remaining, dom);
    // exact min/max return path length over the domain
    Rat mn(0), mx(0);
    if (sys->is_subshift()) {
      const auto& sub = sys->sub();
      long long lo = std::min(dom.is_whole() ? 0 : dom.anchor(), 0LL);
      long long hi = std::max(
          dom.is_whole() ? 1 : dom.anchor() + static_cast<long long>(dom.word_len()),
          n);
      ClopenSet e = dom.expanded(lo, static_cast<size_t>(hi - lo));
      bool first = true;
      for (size_t p : e.word_positions()) {
        Rat acc(0);
        for (long long j = 0; j < n; ++j)
          acc += sub.tile(sub.symbol_at(p + static_cast<size_t>(-lo) + static_cast<size_t>(j)));
        if (first || acc < mn) mn = acc;
        if (first || acc > mx) mx = acc;
        first = false;
      }
    } else {
      mn = mx = Rat(n);
    }
    rs.generators.push_back(make_shift(sys, n, dom));
    rs.min_lengths.push_back(mn);
    rs.max_lengths.push_back(mx);
    rs.max_return_steps = std::max(rs.max_return_steps, n);
    rs.min_return_steps = rs.min_return_steps == 0 ? n : std::min(rs.min_return_steps, n);
  }
  // forward covering: the first entry time of any point into W is at most
  // max_return_steps - 1, and that bound is attained just past the longest
  // return journey
  rs.alpha = rs.max_return_steps - 1;
  rs.e_W = Rat(2 * rs.alpha + 1) * sys->max_tile();
  rs.beta_radius = rs.e_W;
  for (const auto& l : rs.max_lengths)
    require(l <= rs.e_W, Err::NotMinimal, "return length exceeds the certified radius");
  return rs;
}

ClassifyReport classify_at_depth(const SystemPtr& sys, size_t depth, const Rat& eps) {
  require(depth >= 1, Err::Inconclusive, "no elements scanned at depth 0");
  ClassifyReport rep;
  rep.eps = eps;
  rep.depth = depth;
  std::vector<ClopenSet> cells;
  if (sys->is_subshift()) {
    for (size_t p : sys->sub().language(depth))
      cells.push_back(ClopenSet::from_words(sys, 0, depth, {p}));
  } else {
    for (ZVec r : sys->odo().residues(depth)) cells.push_back(ClopenSet::coset(sys, depth, r));
  }
  long long d = static_cast<long long>(depth);

  // expansive certificate: every pair of distinct cells is pushed at least
  // eps apart by some element of word length <= depth
  bool expansive = true;
  for (size_t i = 0; i < cells.size() && expansive; ++i)
    for (size_t j = i + 1; j < cells.size() && expansive; ++j) {
      bool separated = false;
      for (long long n = -d; n <= d && !separated; ++n) {
        ClopenSet a = cells[i].image(n), b = cells[j].image(n);
        if (!a.intersects(b) && distance(a, b) >= eps) separated = true;
      }
      expansive = separated;
    }
  if (expansive) {
    rep.expansive = true;
    rep.detail = "all distinct depth-" + std::to_string(depth) + " cells separated to >= " +
                 rat_str(eps);
    return rep;
  }

  // equicontinuity certificate: scanned elements preserve cell diameters
  bool equi = true;
  for (const auto& c : cells) {
    Rat base = c.diameter();
    for (long long n = -d; n <= d && equi; ++n)
      if (c.image(n).diameter() != base) equi = false;
    if (!equi) break;
  }
  if (equi) {
    rep.equicontinuous = true;
    rep.detail = "all elements of word length <= " + std::to_string(depth) +
                 " preserve depth-" + std::to_string(depth) + " cell diameters";
    return rep;
  }
  fail(Err::Inconclusive, "neither certificate found at depth " + std::to_string(depth));
}

std::string dump_filtration(const Filtration& f) {
  std::ostringstream os;
  for (const auto& g : f.germs)
    os << g.exponent << ", " << rat_str(g.path_length) << ", " << g.domain.render() << "\n";
  return os.str();
}

}  // namespace mbx

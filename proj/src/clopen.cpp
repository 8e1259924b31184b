#include "mbx/clopen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace mbx {

namespace {

void check_same_system(const ClopenSet& a, const ClopenSet& b) {
  require(a.system() == b.system(), Err::SystemMismatch,
          "clopen sets from different systems");
}

}  // namespace

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

ClopenSet ClopenSet::whole(SystemPtr sys) {
  ClopenSet s;
  s.sys_ = std::move(sys);
  s.all_ = true;
  return s;
}

ClopenSet ClopenSet::empty(SystemPtr sys) {
  ClopenSet s;
  s.sys_ = std::move(sys);
  return s;
}

ClopenSet ClopenSet::cylinder(SystemPtr sys, const std::string& word, long long anchor) {
  const auto& sub = sys->sub();
  std::vector<Sym> w;
  for (char c : word) {
    auto s = sub.alphabet().find(std::string(1, c));
    require(s.has_value(), Err::BadSpec, "unknown symbol in cylinder word");
    w.push_back(*s);
  }
  auto pos = sub.find_word(w);
  require(pos.has_value(), Err::BadSpec, "cylinder word is not in the language: " + word);
  ClopenSet s;
  s.sys_ = std::move(sys);
  s.anchor_ = anchor;
  s.len_ = w.size();
  s.words_ = {*pos};
  return s;
}

ClopenSet ClopenSet::from_words(SystemPtr sys, long long anchor, size_t len,
                                std::vector<size_t> word_positions) {
  ClopenSet s;
  s.sys_ = std::move(sys);
  s.anchor_ = anchor;
  s.len_ = len;
  s.words_ = std::move(word_positions);
  s.normalize();
  return s;
}

ClopenSet ClopenSet::point_cylinder(const CantorPoint& p, size_t depth) {
  auto sys = p.system();
  if (sys->is_subshift()) {
    if (depth == 0) return whole(sys);
    require(p.is_orbit(), Err::BadSpec, "subshift points are orbit points");
    size_t pos = sys->sub().canon_at_offset(p.offset(), depth);
    ClopenSet s;
    s.sys_ = sys;
    s.anchor_ = 0;
    s.len_ = depth;
    s.words_ = {pos};
    return s;
  }
  return coset(sys, depth, p.residue(depth));
}

ClopenSet ClopenSet::coset(SystemPtr sys, size_t level, ZVec residue) {
  const auto& od = sys->odo();
  ClopenSet s;
  s.sys_ = sys;
  s.level_ = level;
  s.cells_ = {od.reduce(level, residue)};
  if (level == 0) {
    s.all_ = true;
    s.cells_.clear();
  }
  return s;
}

ClopenSet ClopenSet::from_residues(SystemPtr sys, size_t level, std::vector<ZVec> residues) {
  ClopenSet s;
  s.sys_ = std::move(sys);
  s.level_ = level;
  s.cells_ = std::move(residues);
  s.normalize();
  return s;
}

void ClopenSet::normalize(bool collapse) {
  if (all_) return;
  if (sys_->is_subshift()) {
    const auto& sub = sys_->sub();
    if (words_.empty()) return;
    for (auto& p : words_) p = sub.canon(p, len_);
    std::sort(words_.begin(), words_.end(),
              [&](size_t a, size_t b) { return sub.less_word(a, b, len_); });
    words_.erase(std::unique(words_.begin(), words_.end(),
                             [&](size_t a, size_t b) { return sub.same_word(a, b, len_); }),
                 words_.end());
    if (collapse && words_.size() == sub.language_count(len_)) {
      all_ = true;
      words_.clear();
      len_ = 0;
      anchor_ = 0;
    }
  } else {
    const auto& od = sys_->odo();
    if (cells_.empty()) return;
    for (auto& c : cells_) c = od.reduce(level_, c);
    std::sort(cells_.begin(), cells_.end(), [&](ZVec a, ZVec b) {
      return od.residue_id(level_, a) < od.residue_id(level_, b);
    });
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    if (collapse && cells_.size() == static_cast<size_t>(od.index_at(level_))) {
      all_ = true;
      cells_.clear();
      level_ = 0;
    }
  }
}

bool ClopenSet::is_empty() const {
  if (all_) return false;
  return sys_->is_subshift() ? words_.empty() : cells_.empty();
}

bool ClopenSet::is_whole() const { return all_; }

size_t ClopenSet::cell_count() const {
  if (all_) return 1;
  return sys_->is_subshift() ? words_.size() : cells_.size();
}

// ---------------------------------------------------------------------------
// expansion
// ---------------------------------------------------------------------------

ClopenSet ClopenSet::expanded(long long anchor, size_t len) const {
  const auto& sub = sys_->sub();
  ClopenSet out;
  out.sys_ = sys_;
  out.anchor_ = anchor;
  out.len_ = len;
  if (all_) {
    out.words_ = sub.language(len);
    out.normalize(false);
    return out;
  }
  if (words_.empty()) return out;
  require(anchor <= anchor_ &&
              anchor + static_cast<long long>(len) >= anchor_ + static_cast<long long>(len_),
          Err::BadSpec, "expansion window must contain the current window");
  sub.ensure_language(len);
  size_t left = static_cast<size_t>(anchor_ - anchor);
  std::vector<size_t> acc;
  for (size_t w : words_) {
    for (size_t q : sub.occurrences(w, len_)) {
      if (q < left) continue;
      size_t start = q - left;
      if (start + len > sub.scanned_length()) continue;
      acc.push_back(start);
    }
  }
  out.words_ = std::move(acc);
  out.normalize(false);
  require(!out.is_empty(), Err::DepthInsufficient,
          "window expansion found no occurrences; scanned prefix too short");
  return out;
}

ClopenSet ClopenSet::at_level(size_t level) const {
  const auto& od = sys_->odo();
  ClopenSet out;
  out.sys_ = sys_;
  out.level_ = level;
  if (all_) {
    out.cells_ = od.residues(level);
    out.normalize(false);
    return out;
  }
  if (cells_.empty()) return out;
  require(level >= level_, Err::BadSpec, "level refinement must go down the chain");
  for (const auto& r : od.residues(level))
    if (std::binary_search(cells_.begin(), cells_.end(), od.reduce(level_, r),
                           [&](ZVec a, ZVec b) {
                             return od.residue_id(level_, a) < od.residue_id(level_, b);
                           }))
      out.cells_.push_back(r);
  out.normalize(false);
  return out;
}

namespace {

struct CommonForm {
  ClopenSet a, b;
  long long anchor = 0;
  size_t len = 0, level = 0;
  bool subshift = false;
};

CommonForm to_common(const ClopenSet& x, const ClopenSet& y) {
  check_same_system(x, y);
  CommonForm c;
  c.subshift = x.system()->is_subshift();
  if (c.subshift) {
    long long lo = 0, hi = 1;
    bool seen = false;
    for (const ClopenSet* s : {&x, &y}) {
      if (s->is_whole() || s->is_empty()) continue;
      long long a = s->anchor(), b = s->anchor() + static_cast<long long>(s->word_len());
      lo = seen ? std::min(lo, a) : a;
      hi = seen ? std::max(hi, b) : b;
      seen = true;
    }
    if (hi <= lo) hi = lo + 1;
    c.anchor = lo;
    c.len = static_cast<size_t>(hi - lo);
    c.a = x.is_empty() ? x : x.expanded(lo, c.len);
    c.b = y.is_empty() ? y : y.expanded(lo, c.len);
  } else {
    size_t la = (x.is_whole() || x.is_empty()) ? 0 : x.level();
    size_t lb = (y.is_whole() || y.is_empty()) ? 0 : y.level();
    c.level = std::max(la, lb);
    c.a = x.is_empty() ? x : x.at_level(c.level);
    c.b = y.is_empty() ? y : y.at_level(c.level);
  }
  return c;
}

template <class Less, class Eq>
std::vector<size_t> merge_op(const std::vector<size_t>& a, const std::vector<size_t>& b,
                             Less less, Eq, int op) {
  // op: 0 = intersect, 1 = union, 2 = difference
  std::vector<size_t> out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i == a.size()) {
      if (op == 1) out.push_back(b[j]);
      ++j;
    } else if (j == b.size()) {
      if (op != 0) out.push_back(a[i]);
      ++i;
    } else if (less(a[i], b[j])) {
      if (op != 0) out.push_back(a[i]);
      ++i;
    } else if (less(b[j], a[i])) {
      if (op == 1) out.push_back(b[j]);
      ++j;
    } else {
      if (op != 2) out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
  return out;
}

std::vector<ZVec> merge_op_cells(const std::vector<ZVec>& a, const std::vector<ZVec>& b,
                                 const OdometerSystem& od, size_t level, int op) {
  auto less = [&](ZVec u, ZVec v) {
    return od.residue_id(level, u) < od.residue_id(level, v);
  };
  std::vector<ZVec> out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i == a.size()) {
      if (op == 1) out.push_back(b[j]);
      ++j;
    } else if (j == b.size()) {
      if (op != 0) out.push_back(a[i]);
      ++i;
    } else if (less(a[i], b[j])) {
      if (op != 0) out.push_back(a[i]);
      ++i;
    } else if (less(b[j], a[i])) {
      if (op == 1) out.push_back(b[j]);
      ++j;
    } else {
      if (op != 2) out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
  return out;
}

ClopenSet boolean_op(const ClopenSet& x, const ClopenSet& y, int op) {
  auto c = to_common(x, y);
  if (c.subshift) {
    const auto& sub = x.system()->sub();
    auto less = [&](size_t a, size_t b) { return sub.less_word(a, b, c.len); };
    auto eq = [&](size_t a, size_t b) { return sub.same_word(a, b, c.len); };
    return ClopenSet::from_words(
        x.system(), c.anchor, c.len,
        merge_op(c.a.word_positions(), c.b.word_positions(), less, eq, op));
  }
  const auto& od = x.system()->odo();
  return ClopenSet::from_residues(
      x.system(), c.level,
      merge_op_cells(c.a.residues(), c.b.residues(), od, c.level, op));
}

}  // namespace

ClopenSet intersect(const ClopenSet& a, const ClopenSet& b) { return boolean_op(a, b, 0); }
ClopenSet unite(const ClopenSet& a, const ClopenSet& b) { return boolean_op(a, b, 1); }
ClopenSet subtract(const ClopenSet& a, const ClopenSet& b) { return boolean_op(a, b, 2); }

bool ClopenSet::subset_of(const ClopenSet& o) const {
  if (is_empty()) return true;
  if (o.is_whole()) return true;
  if (is_whole()) return o.is_whole();
  return intersect(*this, o).same_set(*this);
}

bool ClopenSet::intersects(const ClopenSet& o) const {
  if (is_empty() || o.is_empty()) return false;
  if (is_whole() || o.is_whole()) return true;
  return !intersect(*this, o).is_empty();
}

bool ClopenSet::same_set(const ClopenSet& o) const {
  auto c = to_common(*this, o);
  if (c.subshift) {
    const auto& sub = sys_->sub();
    const auto& wa = c.a.word_positions();
    const auto& wb = c.b.word_positions();
    if (c.a.is_whole() || c.b.is_whole()) return c.a.is_whole() == c.b.is_whole();
    if (wa.size() != wb.size()) return false;
    for (size_t i = 0; i < wa.size(); ++i)
      if (!sub.same_word(wa[i], wb[i], c.len)) return false;
    return true;
  }
  if (c.a.is_whole() || c.b.is_whole()) return c.a.is_whole() == c.b.is_whole();
  return c.a.residues() == c.b.residues();
}

bool ClopenSet::contains(const CantorPoint& p) const {
  require(p.system() == sys_, Err::SystemMismatch, "point from another system");
  if (all_) return true;
  if (sys_->is_subshift()) {
    if (words_.empty()) return false;
    const auto& sub = sys_->sub();
    size_t pos = sub.canon_at_offset(p.offset() + anchor_, len_);
    return std::binary_search(words_.begin(), words_.end(), pos,
                              [&](size_t a, size_t b) { return sub.less_word(a, b, len_); });
  }
  const auto& od = sys_->odo();
  ZVec r = p.residue(level_);
  return std::binary_search(cells_.begin(), cells_.end(), r, [&](ZVec a, ZVec b) {
    return od.residue_id(level_, a) < od.residue_id(level_, b);
  });
}

// ---------------------------------------------------------------------------
// transport
// ---------------------------------------------------------------------------

ClopenSet ClopenSet::image(long long n) const {
  if (sys_->is_subshift()) {
    ClopenSet out = *this;
    if (!all_ && !words_.empty()) out.anchor_ -= n;
    return out;
  }
  return image2({n, 0});
}

ClopenSet ClopenSet::image2(ZVec g) const {
  const auto& od = sys_->odo();
  ClopenSet out = *this;
  for (auto& c : out.cells_) c = od.reduce(level_, {c.x + g.x, c.y + g.y});
  out.normalize();
  return out;
}

// ---------------------------------------------------------------------------
// metric
// ---------------------------------------------------------------------------

namespace {

// longest common prefix of the two words starting at relative index `from`
size_t lcp_from(const SubshiftSystem& sub, size_t p, size_t q, size_t len, size_t from) {
  if (from >= len) return 0;
  size_t lo = 0, hi = len - from;
  while (lo < hi) {
    size_t mid = (lo + hi + 1) / 2;
    if (sub.same_word(p + from, q + from, mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

Rat ClopenSet::diameter() const {
  if (is_empty()) return Rat(0);
  if (all_) return Rat(1);
  if (sys_->is_subshift()) {
    const auto& sub = sys_->sub();
    long long end = anchor_ + static_cast<long long>(len_);
    if (end <= 0) return Rat(1);
    ClopenSet e = anchor_ > 0 ? expanded(0, static_cast<size_t>(end)) : *this;
    size_t from = static_cast<size_t>(-e.anchor_);
    Rat best(0);
    if (e.words_.size() >= 2) {
      size_t lcp = lcp_from(sub, e.words_.front(), e.words_.back(), e.len_, from);
      best = pow2(-static_cast<long>(lcp));
    }
    // Each member cylinder contributes the diameter of its canonical
    // (maximally merged) form: the prefix that already pins the rest of the
    // window ends at 1 + the longest prefix shared with any other legal word.
    const auto& lang = sub.language(e.len_);
    for (size_t w : e.words_) {
      auto it = std::lower_bound(lang.begin(), lang.end(), w, [&](size_t a, size_t b) {
        return sub.less_word(a, b, e.len_);
      });
      size_t shared = 0;
      if (it != lang.begin()) shared = std::max(shared, lcp_from(sub, *(it - 1), w, e.len_, 0));
      if (it + 1 != lang.end()) shared = std::max(shared, lcp_from(sub, *(it + 1), w, e.len_, 0));
      long depth = e.anchor_ + static_cast<long>(shared) + 1;
      if (static_cast<size_t>(shared) + 1 > e.len_) depth = e.anchor_ + static_cast<long>(e.len_);
      Rat v = depth <= 0 ? Rat(1) : pow2(-depth);
      best = std::max(best, v);
    }
    return best;
  }
  const auto& od = sys_->odo();
  for (size_t j = level_; j > 0; --j) {
    bool same = true;
    for (const auto& c : cells_)
      if (od.reduce(j, c) != od.reduce(j, cells_.front())) {
        same = false;
        break;
      }
    if (same) return pow2(-static_cast<long>(j));
  }
  return Rat(1);
}

Rat distance(const ClopenSet& a, const ClopenSet& b) {
  check_same_system(a, b);
  require(!a.is_empty() && !b.is_empty(), Err::EmptyInput, "distance needs nonempty sets");
  require(!a.intersects(b), Err::BadSpec, "distance needs disjoint sets");
  if (a.system()->is_subshift()) {
    const auto& sub = a.system()->sub();
    long long lo = std::min({a.anchor(), b.anchor(), 0LL});
    long long hi = std::max(a.anchor() + static_cast<long long>(a.word_len()),
                            b.anchor() + static_cast<long long>(b.word_len()));
    size_t len = static_cast<size_t>(hi - lo);
    ClopenSet ea = a.expanded(lo, len), eb = b.expanded(lo, len);
    size_t from = static_cast<size_t>(-lo);
    // the max cross-pair lcp is attained at lexicographically adjacent pairs
    struct Item {
      size_t pos;
      int side;
    };
    std::vector<Item> all;
    for (size_t p : ea.word_positions()) all.push_back({p, 0});
    for (size_t p : eb.word_positions()) all.push_back({p, 1});
    std::sort(all.begin(), all.end(), [&](const Item& u, const Item& v) {
      return sub.less_word(u.pos, v.pos, len);
    });
    size_t best = 0;
    bool cross = false;
    for (size_t i = 0; i + 1 < all.size(); ++i)
      if (all[i].side != all[i + 1].side) {
        cross = true;
        best = std::max(best, lcp_from(sub, all[i].pos, all[i + 1].pos, len, from));
      }
    require(cross, Err::EmptyInput, "no word pairs to compare");
    if (best == len - from) return Rat(0);  // separated only at negative coordinates
    return pow2(-static_cast<long>(best));
  }
  const auto& od = a.system()->odo();
  size_t la = a.is_whole() ? 0 : a.level(), lb = b.is_whole() ? 0 : b.level();
  size_t level = std::max(la, lb);
  ClopenSet ea = a.at_level(level), eb = b.at_level(level);
  for (size_t j = level; j > 0; --j) {
    std::set<long long> ida;
    for (const auto& c : ea.residues()) ida.insert(od.residue_id(j, od.reduce(j, c)));
    for (const auto& c : eb.residues())
      if (ida.count(od.residue_id(j, od.reduce(j, c)))) return pow2(-static_cast<long>(j));
  }
  return Rat(1);
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

namespace {

// collapse full sibling families into their parent cylinders; returns
// (position, length) pairs, or a single (0,0) for the whole space
std::vector<std::pair<size_t, size_t>> merged_cylinders(const SubshiftSystem& sub,
                                                        std::vector<size_t> words, size_t len) {
  std::vector<std::pair<size_t, size_t>> done;
  std::map<size_t, std::vector<size_t>> by_len;
  by_len[len] = std::move(words);
  while (!by_len.empty()) {
    auto it = std::prev(by_len.end());
    size_t l = it->first;
    auto ws = it->second;
    by_len.erase(it);
    if (l == 0) return {{0, 0}};
    std::sort(ws.begin(), ws.end(), [&](size_t a, size_t b) { return sub.less_word(a, b, l); });
    ws.erase(std::unique(ws.begin(), ws.end(),
                         [&](size_t a, size_t b) { return sub.same_word(a, b, l); }),
             ws.end());
    if (l == 1) {
      if (ws.size() == sub.language_count(1)) return {{0, 0}};
      for (size_t p : ws) done.push_back({p, 1});
      continue;
    }
    std::map<std::pair<int32_t, int32_t>, std::vector<size_t>> groups;
    for (size_t p : ws) groups[sub.index().key(p, l - 1)].push_back(p);
    for (auto& [k, g] : groups) {
      size_t parent = sub.canon(g.front(), l - 1);
      std::set<std::pair<int32_t, int32_t>> exts;
      for (size_t q : sub.occurrences(parent, l - 1))
        if (q + l <= sub.scanned_length()) exts.insert(sub.index().key(q, l));
      if (g.size() == exts.size()) {
        if (l - 1 == 0) return {{0, 0}};
        by_len[l - 1].push_back(parent);
      } else {
        for (size_t p : g) done.push_back({p, l});
      }
    }
  }
  return done;
}

}  // namespace

std::string ClopenSet::render() const {
  if (all_) return "X";
  if (is_empty()) return "{}";
  std::ostringstream os;
  if (sys_->is_subshift()) {
    const auto& sub = sys_->sub();
    if (len_ > 48) {  // digest form for deep internal sets
      uint64_t h = 1469598103934665603ull;
      for (size_t p : words_)
        for (size_t j = 0; j < len_; ++j)
          h = (h ^ static_cast<uint64_t>(sub.spell(p + j, 1)[0])) * 1099511628211ull;
      os << "{anchor=" << anchor_ << ",len=" << len_ << ",n=" << words_.size() << ",digest="
         << std::hex << h << "}";
      return os.str();
    }
    auto cyls = merged_cylinders(sub, words_, len_);
    if (cyls.size() == 1 && cyls[0].second == 0) return "X";
    std::vector<std::string> parts;
    for (auto [p, l] : cyls) {
      std::string t = "[" + sub.spell(p, l) + "]";
      if (anchor_ != 0) t += "@" + std::to_string(anchor_);
      parts.push_back(t);
    }
    std::sort(parts.begin(), parts.end());
    os << "{";
    for (size_t i = 0; i < parts.size(); ++i) os << (i ? " " : "") << parts[i];
    os << "}";
    return os.str();
  }
  const auto& od = sys_->odo();
  std::vector<std::pair<size_t, ZVec>> items;
  {
    std::map<size_t, std::vector<ZVec>> by_level;
    by_level[level_] = cells_;
    while (!by_level.empty()) {
      auto it = std::prev(by_level.end());
      size_t l = it->first;
      auto cs = it->second;
      by_level.erase(it);
      if (l == 0) return "X";
      std::sort(cs.begin(), cs.end());
      cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
      std::map<long long, std::vector<ZVec>> groups;
      for (auto c : cs) groups[od.residue_id(l - 1, od.reduce(l - 1, c))].push_back(c);
      for (auto& [key, g] : groups) {
        size_t fam = od.children(l - 1, od.reduce(l - 1, g.front())).size();
        if (g.size() == fam) {
          if (l - 1 == 0) return "X";
          by_level[l - 1].push_back(od.reduce(l - 1, g.front()));
        } else {
          for (auto c : g) items.push_back({l, c});
        }
      }
    }
  }
  std::sort(items.begin(), items.end(), [&](auto& a, auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return od.residue_id(a.first, a.second) < od.residue_id(b.first, b.second);
  });
  std::vector<std::string> parts;
  for (auto& [l, c] : items) {
    std::ostringstream t;
    if (od.dimension() == 1)
      t << c.x << " mod " << od.modulus(l);
    else {
      auto h = od.basis(l);
      t << "(" << c.x << "," << c.y << ") mod [" << h[0] << " 0; " << h[2] << " " << h[3] << "]";
    }
    parts.push_back(t.str());
  }
  os << "{";
  for (size_t i = 0; i < parts.size(); ++i) os << (i ? ", " : "") << parts[i];
  os << "}";
  return os.str();
}

std::string ClopenSet::least_cell_key() const {
  if (all_) return "";
  if (is_empty()) return "~empty";
  if (sys_->is_subshift()) {
    const auto& sub = sys_->sub();
    std::string k = sub.spell(words_.front(), len_);
    return std::to_string(anchor_) + "@" + k;
  }
  const auto& od = sys_->odo();
  char buf[64];
  snprintf(buf, sizeof buf, "%020lld", od.residue_id(level_, cells_.front()));
  return buf;
}

// ---------------------------------------------------------------------------
// partitions
// ---------------------------------------------------------------------------

std::optional<size_t> Partition::block_of(const CantorPoint& p) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].contains(p)) return i;
  return std::nullopt;
}

std::optional<size_t> Partition::block_containing(const ClopenSet& s) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (s.subset_of(blocks[i])) return i;
  return std::nullopt;
}

void Partition::validate() const {
  for (const auto& b : blocks) {
    require(!b.is_empty(), Err::BadSpec, "partition blocks must be nonempty");
    require(b.system() == ambient.system(), Err::SystemMismatch, "mixed systems in partition");
  }
  // disjoint + covering, checked as one exact cell-count comparison at the
  // common refinement: the multiset of block cells must equal the ambient's
  if (ambient.system()->is_subshift()) {
    const auto& sub = ambient.system()->sub();
    long long lo = 0;
    long long hi = 1;
    for (const auto& b : blocks) {
      if (b.is_whole()) continue;
      lo = std::min(lo, b.anchor());
      hi = std::max(hi, b.anchor() + static_cast<long long>(b.word_len()));
    }
    if (!ambient.is_whole()) {
      lo = std::min(lo, ambient.anchor());
      hi = std::max(hi, ambient.anchor() + static_cast<long long>(ambient.word_len()));
    }
    size_t len = static_cast<size_t>(hi - lo);
    std::vector<size_t> all;
    for (const auto& b : blocks) {
      auto e = b.expanded(lo, len);
      all.insert(all.end(), e.word_positions().begin(), e.word_positions().end());
    }
    size_t total = all.size();
    std::sort(all.begin(), all.end(),
              [&](size_t a, size_t b2) { return sub.less_word(a, b2, len); });
    all.erase(std::unique(all.begin(), all.end(),
                          [&](size_t a, size_t b2) { return sub.same_word(a, b2, len); }),
              all.end());
    require(all.size() == total, Err::BadSpec, "partition blocks overlap");
    auto amb = ambient.expanded(lo, len);
    require(all.size() == amb.word_positions().size(), Err::BadSpec,
            "partition does not cover its ambient set");
    for (size_t i = 0; i < all.size(); ++i)
      require(sub.same_word(all[i], amb.word_positions()[i], len), Err::BadSpec,
              "partition does not cover its ambient set");
  } else {
    const auto& od = ambient.system()->odo();
    size_t level = ambient.is_whole() ? 0 : ambient.level();
    for (const auto& b : blocks) level = std::max(level, b.is_whole() ? 0 : b.level());
    std::vector<ZVec> all;
    for (const auto& b : blocks) {
      auto e = b.at_level(level);
      all.insert(all.end(), e.residues().begin(), e.residues().end());
    }
    size_t total = all.size();
    auto less = [&](ZVec a, ZVec b2) {
      return od.residue_id(level, a) < od.residue_id(level, b2);
    };
    std::sort(all.begin(), all.end(), less);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    require(all.size() == total, Err::BadSpec, "partition blocks overlap");
    auto amb = ambient.at_level(level);
    require(all == amb.residues(), Err::BadSpec, "partition does not cover its ambient set");
  }
}

Partition make_partition(ClopenSet ambient, std::vector<ClopenSet> blocks,
                         const CantorPoint* front) {
  Partition p;
  p.ambient = std::move(ambient);
  p.blocks = std::move(blocks);
  std::sort(p.blocks.begin(), p.blocks.end(), [](const ClopenSet& a, const ClopenSet& b) {
    return a.least_cell_key() < b.least_cell_key();
  });
  if (front) {
    for (size_t i = 0; i < p.blocks.size(); ++i)
      if (p.blocks[i].contains(*front)) {
        std::rotate(p.blocks.begin(), p.blocks.begin() + i, p.blocks.begin() + i + 1);
        break;
      }
  }
  p.validate();
  return p;
}

Partition refine_common(const Partition& p, const Partition& q) {
  require(p.ambient.same_set(q.ambient), Err::AmbientMismatch,
          "common refinement needs equal ambient sets");
  std::vector<ClopenSet> blocks;
  for (const auto& a : p.blocks)
    for (const auto& b : q.blocks) {
      auto c = intersect(a, b);
      if (!c.is_empty()) blocks.push_back(c);
    }
  return make_partition(p.ambient, std::move(blocks));
}

}  // namespace mbx

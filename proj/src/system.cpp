#include "mbx/system.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace mbx {

const char* err_name(Err e) {
  switch (e) {
    case Err::SystemMismatch: return "SYSTEM_MISMATCH";
    case Err::AmbientMismatch: return "AMBIENT_MISMATCH";
    case Err::OutOfDomain: return "OUT_OF_DOMAIN";
    case Err::EmptyComposition: return "EMPTY_COMPOSITION";
    case Err::DepthInsufficient: return "DEPTH_INSUFFICIENT";
    case Err::NotMinimal: return "NOT_MINIMAL";
    case Err::RejectPeriodic: return "REJECT_PERIODIC";
    case Err::RejectNotPrimitive: return "REJECT_NOT_PRIMITIVE";
    case Err::NoSeed: return "NO_SEED";
    case Err::BlockSplit: return "BLOCK_SPLIT";
    case Err::LevelStall: return "LEVEL_STALL";
    case Err::NonconstantHeight: return "NONCONSTANT_HEIGHT";
    case Err::GlueMismatch: return "GLUE_MISMATCH";
    case Err::NotNested: return "NOT_NESTED";
    case Err::SingletonNet: return "SINGLETON_NET";
    case Err::BoundarySite: return "BOUNDARY_SITE";
    case Err::EmptyInput: return "EMPTY_INPUT";
    case Err::LevelMismatch: return "LEVEL_MISMATCH";
    case Err::DimensionDrift: return "DIMENSION_DRIFT";
    case Err::Inconclusive: return "INCONCLUSIVE";
    case Err::BadSpec: return "BAD_SPEC";
  }
  return "UNKNOWN";
}

std::optional<Rat> rat_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto ok_int = [](const std::string& t) {
    if (t.empty()) return false;
    size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      if (!ok_int(s)) return std::nullopt;
      return Rat(Int(s));
    }
    std::string p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!ok_int(p) || !ok_int(q)) return std::nullopt;
    Int den(q);
    if (den == 0) return std::nullopt;
    return Rat(Int(p), den);
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<Rat> rat_sqrt_exact(const Rat& r) {
  if (r < 0) return std::nullopt;
  Int num = boost::multiprecision::numerator(r);
  Int den = boost::multiprecision::denominator(r);
  Int sn = boost::multiprecision::sqrt(num);
  Int sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rat(sn, sd);
}

std::string LeafLength::str() const {
  if (auto v = exact_value()) return rat_str(*v);
  return "sqrt(" + rat_str(sq_) + ")";
}

// ---------------------------------------------------------------------------
// Alphabet / rules
// ---------------------------------------------------------------------------

std::optional<Sym> Alphabet::find(const std::string& name) const {
  for (size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == name) return static_cast<Sym>(i);
  return std::nullopt;
}

void Alphabet::validate() const {
  require(!symbols.empty(), Err::BadSpec, "alphabet must be nonempty");
  for (size_t i = 0; i < symbols.size(); ++i)
    for (size_t j = i + 1; j < symbols.size(); ++j)
      require(symbols[i] != symbols[j], Err::BadSpec, "duplicate symbol " + symbols[i]);
  require(symbols.size() < 250, Err::BadSpec, "alphabet too large");
}

void SubstitutionRule::validate_shape() const {
  alphabet.validate();
  require(images.size() == alphabet.size(), Err::BadSpec, "missing substitution images");
  require(tile_lengths.size() == alphabet.size(), Err::BadSpec, "missing tile lengths");
  for (size_t s = 0; s < images.size(); ++s) {
    require(!images[s].empty(), Err::BadSpec, "empty image for " + alphabet.name(Sym(s)));
    for (Sym t : images[s])
      require(t < alphabet.size(), Err::BadSpec, "image symbol out of range");
    require(tile_lengths[s] > 0, Err::BadSpec, "tile lengths must be positive");
  }
}

std::vector<std::vector<Int>> SubstitutionRule::matrix() const {
  size_t k = alphabet.size();
  std::vector<std::vector<Int>> m(k, std::vector<Int>(k, 0));
  for (size_t a = 0; a < k; ++a)
    for (Sym b : images[a]) m[b][a] += 1;
  return m;
}

bool SubstitutionRule::primitive() const {
  size_t k = alphabet.size();
  auto m = matrix();
  auto mul = [&](const std::vector<std::vector<Int>>& x, const std::vector<std::vector<Int>>& y) {
    std::vector<std::vector<Int>> r(k, std::vector<Int>(k, 0));
    for (size_t i = 0; i < k; ++i)
      for (size_t l = 0; l < k; ++l)
        if (x[i][l] != 0)
          for (size_t j = 0; j < k; ++j) r[i][j] += x[i][l] * y[l][j];
    return r;
  };
  auto positive = [&](const std::vector<std::vector<Int>>& x) {
    for (auto& row : x)
      for (auto& v : row)
        if (v == 0) return false;
    return true;
  };
  auto p = m;
  for (size_t e = 1; e <= k * k; ++e) {
    if (positive(p)) return true;
    p = mul(p, m);
  }
  return false;
}

void OdometerSpec::validate_shape() const {
  require(dimension == 1 || dimension == 2, Err::BadSpec, "odometer dimension must be 1 or 2");
  if (dimension == 1) {
    require(!moduli.empty(), Err::BadSpec, "chain must be nonempty");
    long long prev = 1;
    for (long long m : moduli) {
      require(m > 1, Err::BadSpec, "chain moduli must exceed 1");
      require(m % prev == 0 && m > prev, Err::BadSpec, "chain must be strictly descending subgroups");
      prev = m;
    }
    require(extend_ratio == 0 || extend_ratio > 1, Err::BadSpec, "extend_ratio must exceed 1");
  } else {
    require(!bases.empty(), Err::BadSpec, "chain must be nonempty");
  }
}

// ---------------------------------------------------------------------------
// PrefixIndex
// ---------------------------------------------------------------------------

void PrefixIndex::build(const std::vector<Sym>& s, size_t alphabet_size) {
  n_ = s.size();
  rank_.clear();
  level_len_.clear();
  if (n_ == 0) return;
  std::vector<int32_t> r(n_);
  for (size_t i = 0; i < n_; ++i) r[i] = s[i];
  rank_.push_back(r);
  level_len_.push_back(1);
  (void)alphabet_size;
  std::vector<size_t> order(n_);
  for (size_t len = 1; len < n_; len *= 2) {
    const auto& prev = rank_.back();
    size_t m = n_ - std::min(n_, 2 * len) + 1;  // positions with a full 2*len word
    if (2 * len > n_) break;
    size_t cnt = n_ - 2 * len + 1;
    order.resize(cnt);
    std::iota(order.begin(), order.end(), size_t(0));
    auto keyof = [&](size_t p) {
      return std::pair<int32_t, int32_t>(prev[p], prev[p + len]);
    };
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return keyof(a) < keyof(b); });
    std::vector<int32_t> nr(cnt);
    int32_t id = 0;
    for (size_t i = 0; i < cnt; ++i) {
      if (i > 0 && keyof(order[i]) != keyof(order[i - 1])) ++id;
      nr[order[i]] = id;
    }
    rank_.push_back(std::move(nr));
    level_len_.push_back(2 * len);
    (void)m;
  }
}

std::pair<int32_t, int32_t> PrefixIndex::key(size_t pos, size_t len) const {
  if (len == 0) return {-1, -1};
  size_t k = 0;
  while (k + 1 < level_len_.size() && level_len_[k + 1] <= len) ++k;
  size_t step = level_len_[k];
  return {rank_[k][pos], rank_[k][pos + len - step]};
}

bool PrefixIndex::less(size_t p, size_t q, size_t len) const {
  return key(p, len) < key(q, len);
}

// ---------------------------------------------------------------------------
// SubshiftSystem
// ---------------------------------------------------------------------------

namespace {

std::vector<Sym> apply_rule(const SubstitutionRule& rule, const std::vector<Sym>& w, int power) {
  std::vector<Sym> cur = w;
  for (int it = 0; it < power; ++it) {
    std::vector<Sym> next;
    next.reserve(cur.size() * 2);
    for (Sym s : cur)
      next.insert(next.end(), rule.images[s].begin(), rule.images[s].end());
    cur = std::move(next);
  }
  return cur;
}

size_t scan_cap() {
  if (const char* c = std::getenv("MBF_SCAN_DEPTH_CAP")) {
    long v = std::atol(c);
    if (v > 0) return static_cast<size_t>(v);
  }
  return size_t(1) << 21;  // symbols of scanned prefix
}

}  // namespace

std::shared_ptr<const SubshiftSystem> SubshiftSystem::create(SubstitutionRule rule) {
  rule.validate_shape();
  auto sys = std::shared_ptr<SubshiftSystem>(new SubshiftSystem());
  sys->rule_ = std::move(rule);
  const auto& r = sys->rule_;
  size_t k = r.alphabet.size();

  // cycle length of the first-letter map through each symbol
  auto cycle_of = [&](Sym start, bool first) -> std::pair<Sym, int> {
    // returns a symbol on the cycle reachable from start, and the cycle length
    auto step = [&](Sym s) { return first ? r.images[s].front() : r.images[s].back(); };
    std::vector<int> seen(k, -1);
    Sym cur = start;
    int t = 0;
    while (seen[cur] < 0) {
      seen[cur] = t++;
      cur = step(cur);
    }
    return {cur, t - seen[cur]};
  };

  // candidate forward seeds: symbols a with first(S^c(a)) = a
  std::vector<std::pair<Sym, int>> fwd_cands, bwd_cands;
  for (size_t s = 0; s < k; ++s) {
    auto [cf, lf] = cycle_of(Sym(s), true);
    if (cf == s) fwd_cands.push_back({Sym(s), lf});
    auto [cb, lb] = cycle_of(Sym(s), false);
    if (cb == s) bwd_cands.push_back({Sym(s), lb});
  }
  require(!fwd_cands.empty() && !bwd_cands.empty(), Err::NoSeed,
          "no symbol generates a fixed or periodic point");

  // prefer lexicographically-least seeds; power = lcm of the two cycle lengths
  for (auto [fa, fl] : fwd_cands) {
    for (auto [bb, bl] : bwd_cands) {
      int power = std::lcm(fl, bl);
      // the juncture word (bb, fa) must be legal; check on a scratch prefix
      std::vector<Sym> probe = apply_rule(r, {fa}, power);
      for (int it = 0; it < 6 && probe.size() < 4096; ++it) probe = apply_rule(r, probe, power);
      bool legal = false;
      for (size_t i = 0; i + 1 < probe.size(); ++i)
        if (probe[i] == bb && probe[i + 1] == fa) { legal = true; break; }
      if (!legal) continue;
      sys->fwd_seed_ = fa;
      sys->bwd_seed_ = bb;
      sys->seed_power_ = power;
      sys->fwd_ = {fa};
      sys->bwd_ = {bb};
      sys->grow(4096);
      return sys;
    }
  }
  fail(Err::NoSeed, "no legal two-sided seed pair");
}

void SubshiftSystem::grow(size_t target_len) const {
  size_t cap = scan_cap();
  require(target_len <= cap, Err::DepthInsufficient,
          "requested scan length " + std::to_string(target_len) +
              " exceeds cap " + std::to_string(cap));
  bool grew = false;
  while (fwd_.size() < target_len) {
    fwd_ = apply_rule(rule_, fwd_, seed_power_);
    stage_lens_.push_back(fwd_.size());
    grew = true;
    require(fwd_.size() <= cap * 8, Err::DepthInsufficient, "scan blow-up");
  }
  while (bwd_.size() < target_len) {
    // bwd_ holds coordinates -1, -2, ... ; the left word is the reverse
    std::vector<Sym> left(bwd_.rbegin(), bwd_.rend());
    left = apply_rule(rule_, left, seed_power_);
    bwd_.assign(left.rbegin(), left.rend());
    grew = true;
  }
  if (grew) rebuild_index();
}

void SubshiftSystem::rebuild_index() const {
  index_.build(fwd_, rule_.alphabet.size());
  occ_cache_.clear();
  occ_built_.clear();
  lang_cache_.clear();
  stage_count_cache_.clear();
}

Sym SubshiftSystem::coord(long long i) const {
  if (i >= 0) {
    grow(static_cast<size_t>(i) + 1);
    return fwd_[static_cast<size_t>(i)];
  }
  size_t j = static_cast<size_t>(-i - 1);
  grow(j + 1);
  return bwd_[j];
}

void SubshiftSystem::ensure_language(size_t n) const {
  require(n >= 1, Err::BadSpec, "language length must be >= 1");
  auto it = complete_len_.find(n);
  if (it != complete_len_.end()) return;
  grow(std::max<size_t>(4 * n + 4, 256));
  auto count_at = [&](size_t upto) {
    auto key = std::make_pair(n, upto);
    auto it = stage_count_cache_.find(key);
    if (it != stage_count_cache_.end()) return it->second;
    std::vector<std::pair<int32_t, int32_t>> keys;
    keys.reserve(upto - n + 1);
    for (size_t p = 0; p + n <= upto; ++p) keys.push_back(index_.key(p, n));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return stage_count_cache_[key] = keys.size();
  };
  // The factor set of length n is complete once one substitution step adds
  // nothing new: every length-n factor of S(w) sits inside S(v) for a factor
  // v of w with |v| <= n, so equality at consecutive stages is stable.
  while (true) {
    for (size_t i = 0; i + 1 < stage_lens_.size(); ++i) {
      size_t a = stage_lens_[i], b = stage_lens_[i + 1];
      if (a < 2 * n || a < 64) continue;
      if (count_at(a) == count_at(b)) {
        complete_len_[n] = b;
        return;
      }
    }
    grow(fwd_.size() + 1);  // one more substitution stage
  }
}

std::vector<size_t> SubshiftSystem::language(size_t n) const {
  auto it = lang_cache_.find(n);
  if (it != lang_cache_.end()) return it->second;
  ensure_language(n);
  std::vector<size_t> pos;
  {
    std::map<std::pair<int32_t, int32_t>, size_t> first;
    for (size_t p = 0; p + n <= fwd_.size(); ++p) {
      auto k = index_.key(p, n);
      auto f = first.find(k);
      if (f == first.end()) first.emplace(k, p);
    }
    pos.reserve(first.size());
    for (auto& [k, p] : first) pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end(),
            [&](size_t a, size_t b) { return index_.less(a, b, n); });
  lang_cache_[n] = pos;
  return pos;
}

size_t SubshiftSystem::language_count(size_t n) const { return language(n).size(); }

const std::vector<size_t>& SubshiftSystem::occurrences(size_t pos, size_t len) const {
  ensure_language(len);
  if (!occ_built_.count(len)) {
    // fill the bucket map for this length in one pass
    for (size_t p = 0; p + len <= fwd_.size(); ++p)
      occ_cache_[std::make_pair(index_.key(p, len), len)].push_back(p);
    occ_built_.insert(len);
  }
  return occ_cache_.at(std::make_pair(index_.key(pos, len), len));
}

size_t SubshiftSystem::canon(size_t pos, size_t len) const {
  return occurrences(pos, len).front();
}

size_t SubshiftSystem::canon_at_offset(long long off, size_t len) const {
  if (off >= 0) {
    grow(static_cast<size_t>(off) + len);
    return canon(static_cast<size_t>(off), len);
  }
  std::vector<Sym> w(len);
  for (size_t j = 0; j < len; ++j) w[j] = coord(off + static_cast<long long>(j));
  auto c = find_word(w);
  require(c.has_value(), Err::DepthInsufficient, "two-sided word not found in scanned prefix");
  return *c;
}

std::optional<size_t> SubshiftSystem::find_word(const std::vector<Sym>& w) const {
  if (w.empty()) return std::nullopt;
  ensure_language(w.size());
  for (size_t p = 0; p + w.size() <= fwd_.size(); ++p) {
    if (fwd_[p] != w[0]) continue;
    bool ok = true;
    for (size_t j = 1; j < w.size(); ++j)
      if (fwd_[p + j] != w[j]) { ok = false; break; }
    if (ok) return canon(p, w.size());
  }
  return std::nullopt;
}

std::string SubshiftSystem::spell(size_t pos, size_t len) const {
  std::string out;
  bool onechar = true;
  for (auto& s : rule_.alphabet.symbols) onechar = onechar && s.size() == 1;
  for (size_t j = 0; j < len; ++j) {
    if (!onechar && j) out += ' ';
    out += rule_.alphabet.name(fwd_[pos + j]);
  }
  return out;
}

std::string SubshiftSystem::describe() const {
  std::ostringstream os;
  os << "substitution over {";
  for (size_t i = 0; i < rule_.alphabet.size(); ++i)
    os << (i ? "," : "") << rule_.alphabet.symbols[i];
  os << "}";
  return os.str();
}

Rat SubshiftSystem::max_tile() const {
  Rat m = rule_.tile_lengths[0];
  for (auto& t : rule_.tile_lengths) m = std::max(m, t);
  return m;
}

Rat SubshiftSystem::min_tile() const {
  Rat m = rule_.tile_lengths[0];
  for (auto& t : rule_.tile_lengths) m = std::min(m, t);
  return m;
}

// ---------------------------------------------------------------------------
// OdometerSystem
// ---------------------------------------------------------------------------

namespace {
long long egcd(long long a, long long b, long long& x, long long& y) {
  if (b == 0) { x = (a >= 0) ? 1 : -1; y = 0; return std::abs(a); }
  long long x1, y1;
  long long g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

long long mod_pos(long long v, long long m) {
  long long r = v % m;
  return r < 0 ? r + m : r;
}
}  // namespace

std::shared_ptr<const OdometerSystem> OdometerSystem::create(OdometerSpec spec) {
  spec.validate_shape();
  auto sys = std::shared_ptr<OdometerSystem>(new OdometerSystem());
  sys->spec_ = std::move(spec);
  const auto& sp = sys->spec_;
  sys->hnf_.push_back({1, 0, 0, 1});
  sys->idx_.push_back(1);
  if (sp.dimension == 1) {
    for (long long m : sp.moduli) {
      sys->hnf_.push_back({m, 0, 0, 1});
      sys->idx_.push_back(m);
    }
  } else {
    for (auto& b : sp.bases) {
      // rows u=(b0,b1), v=(b2,b3); normal form rows (a,0),(c,d)
      long long ux = b[0], uy = b[1], vx = b[2], vy = b[3];
      long long det = ux * vy - uy * vx;
      require(det != 0, Err::BadSpec, "degenerate subgroup basis");
      long long p, q;
      long long d = egcd(uy, vy, p, q);  // minimal positive y among combinations
      long long cx, cy;
      if (d == 0) { d = std::llabs(vy) + std::llabs(uy); }
      if (uy == 0 && vy == 0) fail(Err::BadSpec, "degenerate subgroup basis");
      cx = p * ux + q * vx;
      cy = p * uy + q * vy;
      if (cy < 0) { cx = -cx; cy = -cy; }
      long long u2 = ux - (uy / cy) * cx;  // y-eliminated
      long long v2 = vx - (vy / cy) * cx;
      long long a = std::gcd(std::llabs(u2), std::llabs(v2));
      require(a > 0, Err::BadSpec, "degenerate subgroup basis");
      cx = mod_pos(cx, a);
      sys->hnf_.push_back({a, 0, cx, cy});
      sys->idx_.push_back(a * cy);
      long long prev = sys->idx_[sys->idx_.size() - 2];
      require(sys->idx_.back() % prev == 0 && sys->idx_.back() > prev, Err::BadSpec,
              "chain must be strictly descending subgroups");
      if (sys->hnf_.size() > 2) {
        // nesting check: both rows of the new lattice lie in the previous one
        auto pr = sys->hnf_[sys->hnf_.size() - 2];
        auto inside = [&](long long x, long long y) {
          if (pr[3] == 0) return false;
          if (y % pr[3] != 0) return false;
          long long t = y / pr[3];
          long long xr = x - t * pr[2];
          return xr % pr[0] == 0;
        };
        require(inside(a, 0) && inside(cx, cy), Err::BadSpec,
                "each subgroup must contain the next");
      }
    }
  }
  return sys;
}

System::Kind OdometerSystem::kind() const {
  return spec_.dimension == 1 ? Kind::OdometerZ : Kind::OdometerZ2;
}

std::string OdometerSystem::describe() const {
  std::ostringstream os;
  os << "Z^" << spec_.dimension << " odometer, chain depth " << (hnf_.size() - 1);
  return os.str();
}

size_t OdometerSystem::depth_cap() const {
  if (spec_.dimension == 1 && spec_.extend_ratio > 1) return 62;  // before overflow
  return hnf_.size() - 1;
}

void OdometerSystem::ensure_level(size_t level) const {
  while (level >= hnf_.size()) {
    require(spec_.dimension == 1 && spec_.extend_ratio > 1, Err::DepthInsufficient,
            "chain exhausted at level " + std::to_string(hnf_.size() - 1));
    long long m = hnf_.back()[0];
    require(m <= (1LL << 60) / spec_.extend_ratio, Err::DepthInsufficient, "chain modulus overflow");
    hnf_.push_back({m * spec_.extend_ratio, 0, 0, 1});
    idx_.push_back(m * spec_.extend_ratio);
  }
}

long long OdometerSystem::index_at(size_t level) const {
  ensure_level(level);
  return idx_[level];
}

long long OdometerSystem::modulus(size_t level) const {
  ensure_level(level);
  return hnf_[level][0];
}

std::array<long long, 4> OdometerSystem::basis(size_t level) const {
  ensure_level(level);
  return hnf_[level];
}

ZVec OdometerSystem::reduce(size_t level, ZVec v) const {
  ensure_level(level);
  auto h = hnf_[level];  // rows (a,0),(c,d)
  long long a = h[0], c = h[2], d = h[3];
  long long y = mod_pos(v.y, d);
  long long t = (v.y - y) / d;
  long long x = v.x - t * c;
  x = mod_pos(x, a);
  return {x, y};
}

std::vector<ZVec> OdometerSystem::residues(size_t level) const {
  ensure_level(level);
  auto h = hnf_[level];
  std::vector<ZVec> out;
  out.reserve(static_cast<size_t>(idx_[level]));
  for (long long x = 0; x < h[0]; ++x)
    for (long long y = 0; y < h[3]; ++y) out.push_back({x, y});
  return out;
}

long long OdometerSystem::residue_id(size_t level, ZVec r) const {
  ensure_level(level);
  auto h = hnf_[level];
  return r.x * h[3] + r.y;
}

std::vector<ZVec> OdometerSystem::children(size_t level, ZVec r) const {
  ensure_level(level + 1);
  std::vector<ZVec> out;
  for (const auto& c : residues(level + 1))
    if (reduce(level, c) == reduce(level, r)) out.push_back(c);
  return out;
}

const SubshiftSystem& System::sub() const {
  require(kind() == Kind::Subshift, Err::SystemMismatch, "not a subshift system");
  return static_cast<const SubshiftSystem&>(*this);
}

const OdometerSystem& System::odo() const {
  require(kind() != Kind::Subshift, Err::SystemMismatch, "not an odometer system");
  return static_cast<const OdometerSystem&>(*this);
}

// ---------------------------------------------------------------------------
// CantorPoint
// ---------------------------------------------------------------------------

CantorPoint CantorPoint::basepoint(SystemPtr sys) { return orbit2(std::move(sys), {0, 0}); }

CantorPoint CantorPoint::orbit(SystemPtr sys, long long shift) {
  return orbit2(std::move(sys), {shift, 0});
}

CantorPoint CantorPoint::orbit2(SystemPtr sys, ZVec shift) {
  CantorPoint p;
  p.sys_ = std::move(sys);
  p.off_ = shift;
  return p;
}

CantorPoint CantorPoint::odo_point(SystemPtr sys, std::vector<ZVec> chain) {
  CantorPoint p;
  p.sys_ = std::move(sys);
  require(!chain.empty(), Err::BadSpec, "empty residue chain");
  p.residues_ = std::move(chain);
  return p;
}

Sym CantorPoint::coord(long long i) const { return sys_->sub().coord(off_.x + i); }

ZVec CantorPoint::residue(size_t level) const {
  const auto& od = sys_->odo();
  if (residues_.empty()) return od.reduce(level, off_);
  require(level < residues_.size(), Err::DepthInsufficient,
          "explicit point has no residue at level " + std::to_string(level));
  return od.reduce(level, residues_[level]);
}

CantorPoint CantorPoint::translated(long long n) const { return translated2({n, 0}); }

CantorPoint CantorPoint::translated2(ZVec g) const {
  CantorPoint p = *this;
  if (residues_.empty()) {
    p.off_ = {off_.x + g.x, off_.y + g.y};
  } else {
    for (auto& r : p.residues_) r = {r.x + g.x, r.y + g.y};
  }
  return p;
}

bool CantorPoint::same_cylinder(const CantorPoint& other, size_t depth) const {
  require(sys_ == other.sys_, Err::SystemMismatch, "points from different systems");
  if (sys_->is_subshift()) {
    for (size_t j = 0; j < depth; ++j)
      if (coord(static_cast<long long>(j)) != other.coord(static_cast<long long>(j))) return false;
    return true;
  }
  return residue(depth) == other.residue(depth);
}

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

ValidationReport validate_system(const SubstitutionRule& rule, long period_bound) {
  ValidationReport rep;
  rule.validate_shape();
  rep.primitive = rule.primitive();
  if (!rep.primitive) {
    rep.witness = std::string(err_name(Err::RejectNotPrimitive)) +
                  ": no strictly positive matrix power up to exponent " +
                  std::to_string(rule.alphabet.size() * rule.alphabet.size());
    return rep;
  }
  auto sys = SubshiftSystem::create(rule);
  size_t scan = static_cast<size_t>(4 * period_bound);
  std::vector<Sym> w(scan);
  for (size_t i = 0; i < scan; ++i) w[i] = sys->coord(static_cast<long long>(i));
  for (long p = 1; p <= period_bound; ++p) {
    bool periodic = true;
    for (size_t i = 0; i + p < scan; ++i)
      if (w[i] != w[i + p]) { periodic = false; break; }
    if (periodic) {
      rep.witness = std::string(err_name(Err::RejectPeriodic)) + ": prefix has period " +
                    std::to_string(p);
      return rep;
    }
  }
  rep.aperiodic = true;
  rep.accepted = true;
  rep.witness = "primitive; no period <= " + std::to_string(period_bound) +
                " in a prefix of length " + std::to_string(scan);
  return rep;
}

ValidationReport validate_system(const OdometerSpec& spec) {
  ValidationReport rep;
  spec.validate_shape();
  (void)OdometerSystem::create(spec);
  rep.accepted = true;
  rep.primitive = true;
  rep.aperiodic = true;
  rep.witness = "odometers are minimal and equicontinuous by construction";
  return rep;
}

std::string fixed_point_prefix(const SubshiftSystem& sys, size_t n) {
  sys.coord(static_cast<long long>(n));  // force growth
  return sys.spell(0, n);
}

Rat metric_distance(const CantorPoint& x, const CantorPoint& y, size_t depth_cap) {
  require(x.system() == y.system(), Err::SystemMismatch, "points from different systems");
  if (x.system()->is_subshift()) {
    for (size_t k = 0; k < depth_cap; ++k)
      if (x.coord(static_cast<long long>(k)) != y.coord(static_cast<long long>(k)))
        return pow2(-static_cast<long>(k));
    return Rat(0);
  }
  size_t cap = std::min(depth_cap, x.system()->odo().depth_cap());
  for (size_t k = 1; k <= cap; ++k)
    if (x.residue(k) != y.residue(k)) return pow2(-static_cast<long>(k - 1));
  return Rat(0);
}

std::vector<std::string> language_words(const SubshiftSystem& sys, size_t n) {
  std::vector<std::string> out;
  for (size_t p : sys.language(n)) out.push_back(sys.spell(p, n));
  return out;
}

SystemPtr make_system(const SubstitutionRule& rule) {
  auto rep = validate_system(rule);
  if (!rep.accepted)
    fail(rep.primitive ? Err::RejectPeriodic : Err::RejectNotPrimitive, rep.witness);
  return SubshiftSystem::create(rule);
}

SystemPtr make_system(const OdometerSpec& spec) { return OdometerSystem::create(spec); }

SubstitutionRule fibonacci_rule() {
  SubstitutionRule r;
  r.alphabet.symbols = {"a", "b"};
  r.images = {{0, 1}, {0}};
  r.tile_lengths = {Rat(1), Rat(1)};
  return r;
}

SubstitutionRule thue_morse_rule() {
  SubstitutionRule r;
  r.alphabet.symbols = {"a", "b"};
  r.images = {{0, 1}, {1, 0}};
  r.tile_lengths = {Rat(1), Rat(1)};
  return r;
}

OdometerSpec dyadic_spec(size_t depth) {
  OdometerSpec s;
  s.dimension = 1;
  long long m = 2;
  for (size_t i = 0; i < std::min<size_t>(depth, 8); ++i) {
    s.moduli.push_back(m);
    m *= 2;
  }
  s.extend_ratio = 2;
  return s;
}

}  // namespace mbx

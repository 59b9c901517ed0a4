#include "thermolim/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include "thermolim/errors.hpp"
#include "thermolim/rng.hpp"

namespace thermolim {
namespace {

constexpr std::uint64_t kIidSalt = 0x1db50c0dedf00d01ULL;
constexpr std::uint64_t kBlockSalt = 0xb10cb10cb10cb10cULL;
constexpr std::uint64_t kPhaseSalt = 0x9a5e0ff5e7700f1eULL;

std::uint64_t siteKey(std::uint64_t h, const GroupElement& v) {
  h = foldKey(h, static_cast<std::int64_t>(v.tag));
  for (int i = 0; i < v.n; ++i) h = foldKey(h, v.c[i]);
  return h;
}

std::int64_t floorDiv(std::int64_t a, std::int64_t s) {
  std::int64_t q = a / s;
  if (a % s != 0 && (a < 0) != (s < 0)) --q;
  return q;
}

void appendExact(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

ColorSet ColorSet::finite(std::vector<double> colors,
                          std::vector<double> weights) {
  if (colors.empty() || colors.size() != weights.size())
    throw UsageError("ColorSet: need one weight per color");
  std::vector<double> sorted = colors;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (!(sorted[i] < sorted[i + 1]))
      throw UsageError("ColorSet: colors must be distinct");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw UsageError("ColorSet: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw UsageError("ColorSet: weights must sum to 1");
  for (double c : colors)
    if (!std::isfinite(c)) throw UsageError("ColorSet: non-finite color");
  ColorSet s;
  s.finite_ = true;
  s.colors_ = std::move(colors);
  s.weights_ = std::move(weights);
  return s;
}

ColorSet ColorSet::interval(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw UsageError("ColorSet: interval needs lo < hi");
  ColorSet s;
  s.finite_ = false;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

ColorSet ColorSet::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("ColorSet: p outside [0,1]");
  return finite({0.0, 1.0}, {1.0 - p, p});
}

const std::vector<double>& ColorSet::colors() const {
  if (!finite_) throw UsageError("ColorSet: interval set has no color list");
  return colors_;
}

const std::vector<double>& ColorSet::weights() const {
  if (!finite_) throw UsageError("ColorSet: interval set has no weights");
  return weights_;
}

double ColorSet::lo() const {
  if (finite_) throw UsageError("ColorSet: finite set has no interval bounds");
  return lo_;
}

double ColorSet::hi() const {
  if (finite_) throw UsageError("ColorSet: finite set has no interval bounds");
  return hi_;
}

double ColorSet::weightOf(double color) const {
  if (!finite_) throw UsageError("ColorSet: weights undefined on an interval");
  for (std::size_t i = 0; i < colors_.size(); ++i)
    if (colors_[i] == color) return weights_[i];
  throw UsageError("ColorSet: color not in the set");
}

double ColorSet::supAbs() const {
  if (!finite_) return std::max(std::abs(lo_), std::abs(hi_));
  double m = 0.0;
  for (double c : colors_) m = std::max(m, std::abs(c));
  return m;
}

double ColorSet::sample(double u) const {
  if (!finite_) return lo_ + (hi_ - lo_) * u;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < colors_.size(); ++i) {
    cum += weights_[i];
    if (u < cum) return colors_[i];
  }
  return colors_.back();
}

struct Coloring::Impl {
  Kind kind = Kind::deterministic;
  Group group = Group::lattice(1);
  std::optional<ColorSet> colors;
  std::function<double(const GroupElement&)> fn;
  std::uint64_t seed = 0;
  double range = 0.0;
  std::int64_t blockSide = 1;
};

Coloring Coloring::deterministic(const Group& g,
                                 std::function<double(const GroupElement&)> fn,
                                 std::optional<ColorSet> colors) {
  if (!fn) throw UsageError("Coloring: deterministic rule must be callable");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::deterministic;
  impl->group = g;
  impl->colors = std::move(colors);
  impl->fn = std::move(fn);
  return Coloring(std::move(impl));
}

Coloring Coloring::constant(const Group& g, double value) {
  return deterministic(g, [value](const GroupElement&) { return value; });
}

Coloring Coloring::iid(const Group& g, ColorSet colors, std::uint64_t seed) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::iidProduct;
  impl->group = g;
  impl->colors = std::move(colors);
  impl->seed = seed;
  return Coloring(std::move(impl));
}

Coloring Coloring::independentAtDistance(const Group& g, ColorSet colors,
                                         double range, std::uint64_t seed) {
  if (g.kind() != GroupKind::lattice)
    throw UsageError(
        "Coloring: independence-at-distance sampling is implemented for "
        "lattice groups only");
  if (!(range >= 0.0) || !std::isfinite(range))
    throw UsageError("Coloring: range must be a nonnegative number");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::independentAtDistance;
  impl->group = g;
  impl->colors = std::move(colors);
  impl->seed = seed;
  impl->range = range;
  // Cube blocks of side s have word diameter d*(s-1) <= range, so any two
  // site families farther apart than range touch disjoint block streams.
  impl->blockSide =
      static_cast<std::int64_t>(std::floor(range / g.dim())) + 1;
  return Coloring(std::move(impl));
}

Coloring::Kind Coloring::kind() const { return impl_->kind; }
const Group& Coloring::group() const { return impl_->group; }
bool Coloring::hasColorSet() const { return impl_->colors.has_value(); }

const ColorSet& Coloring::colorSet() const {
  if (!impl_->colors) throw UsageError("Coloring: no color set attached");
  return *impl_->colors;
}

double Coloring::range() const { return impl_->range; }
std::uint64_t Coloring::seed() const { return impl_->seed; }

double Coloring::operator()(const GroupElement& v) const {
  const Impl& im = *impl_;
  im.group.checkElement(v);
  switch (im.kind) {
    case Kind::deterministic:
      return im.fn(v);
    case Kind::iidProduct:
      return im.colors->sample(toUnit(siteKey(mixSeed(im.seed, kIidSalt), v)));
    case Kind::independentAtDistance: {
      GroupElement block = v;
      for (int i = 0; i < v.n; ++i)
        block.c[i] = floorDiv(v.c[i], im.blockSide);
      const double base =
          toUnit(siteKey(mixSeed(im.seed, kBlockSalt), block));
      // Seed-independent per-site shift: one block stream fans out to its
      // sites without touching the uniform marginal.
      const double phase = toUnit(siteKey(kPhaseSalt, v));
      double u = base + phase;  // circle shift keeps the marginal uniform
      if (u >= 1.0) u -= 1.0;
      return im.colors->sample(u);
    }
  }
  throw UsageError("Coloring: unknown kind");
}

Coloring shiftColoring(const Coloring& omega, const GroupElement& g) {
  const Group grp = omega.group();
  grp.checkElement(g);
  std::optional<ColorSet> colors;
  if (omega.hasColorSet()) colors = omega.colorSet();
  return Coloring::deterministic(
      grp, [omega, g, grp](const GroupElement& v) { return omega(grp.shift(v, g)); },
      std::move(colors));
}

Coloring visibleColoring(int d) {
  Group g = Group::lattice(d);
  return Coloring::deterministic(g, [](const GroupElement& v) {
    std::int64_t acc = 0;
    bool allZero = true;
    for (int i = 0; i < v.n; ++i) {
      const std::int64_t a = v.c[i] < 0 ? -v.c[i] : v.c[i];
      if (a != 0) allZero = false;
      acc = std::gcd(acc, a);
    }
    return (allZero || acc == 1) ? 1.0 : 0.0;
  });
}

Pattern::Pattern(SiteSet domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.size())
    throw UsageError("Pattern: need one value per domain site");
  for (double v : values_)
    if (!std::isfinite(v)) throw UsageError("Pattern: non-finite value");
}

double Pattern::value(const GroupElement& v) const {
  const std::ptrdiff_t idx = domain_.indexOf(v);
  if (idx < 0) throw UsageError("Pattern: site outside the domain");
  return values_[static_cast<std::size_t>(idx)];
}

Pattern restrict(const Coloring& omega, const SiteSet& lambda) {
  std::vector<double> values;
  values.reserve(lambda.size());
  for (const GroupElement& v : lambda) values.push_back(omega(v));
  return Pattern(lambda, std::move(values));
}

Pattern shiftPattern(const Pattern& p, const GroupElement& g) {
  const Group& grp = p.domain().group();
  SiteSet moved = shiftSet(p.domain(), grp.inverse(g));  // domain * g
  std::vector<double> values;
  values.reserve(moved.size());
  for (const GroupElement& v : moved) values.push_back(p.value(grp.shift(v, g)));
  return Pattern(std::move(moved), std::move(values));
}

Pattern canonicalPattern(const Pattern& p) {
  if (p.domain().empty()) return p;
  // Right translation preserves the lexicographic site order, so the minimal
  // element moves to the minimum of the translated domain.
  const GroupElement& lead = p.domain().sites().front();
  return shiftPattern(p, p.domain().group().inverse(lead));
}

std::string patternId(const Pattern& p) {
  const Pattern canon = canonicalPattern(p);
  std::string id;
  for (std::size_t i = 0; i < canon.domain().size(); ++i) {
    if (i) id += ';';
    const GroupElement& v = canon.domain().sites()[i];
    id += '(';
    for (int k = 0; k < v.n; ++k) {
      if (k) id += ' ';
      id += std::to_string(v.c[k]);
    }
    id += "):";
    appendExact(id, canon.values()[i]);
  }
  return id;
}

long long patternCount(const Pattern& p, const Pattern& pprime) {
  const Group& grp = p.domain().group();
  if (!(grp == pprime.domain().group()))
    throw UsageError("patternCount: patterns from different groups");
  if (p.domain().empty()) return 1;  // the empty sub-pattern, once

  if (p.domain().size() == 1) {
    const double want = p.values()[0];
    long long hits = 0;
    for (double v : pprime.values())
      if (v == want) ++hits;
    return hits;
  }

  const GroupElement& anchor = p.domain().sites().front();
  long long hits = 0;
  for (const GroupElement& w : pprime.domain()) {
    // g places the anchor on w; the rest of the domain must follow suit.
    const GroupElement g = grp.multiply(grp.inverse(w), anchor);
    bool match = true;
    for (std::size_t i = 0; match && i < p.domain().size(); ++i) {
      const GroupElement target = grp.shift(p.domain().sites()[i], g);
      const std::ptrdiff_t idx = pprime.domain().indexOf(target);
      match = idx >= 0 &&
              pprime.values()[static_cast<std::size_t>(idx)] == p.values()[i];
    }
    if (match) ++hits;
  }
  return hits;
}

double empiricalFrequency(const Pattern& p, const Coloring& omega,
                          const SiteSet& q) {
  if (q.empty()) throw UsageError("empiricalFrequency: empty sample set");
  return static_cast<double>(patternCount(p, restrict(omega, q))) /
         static_cast<double>(q.size());
}

double exactFrequency(const Pattern& p, const ColorSet& colors) {
  if (!colors.isFinite())
    throw UsageError(
        "exactFrequency: unsupported for interval color sets; point "
        "frequencies vanish there");
  double prob = 1.0;
  for (double v : p.values()) prob *= colors.weightOf(v);
  return prob;
}

void EmpiricalMeasure::add(const Pattern& p) {
  Pattern canon = canonicalPattern(p);
  if (canonicalDomain_) {
    if (!(canon.domain() == *canonicalDomain_))
      throw UsageError(
          "EmpiricalMeasure: observations must share a translated domain");
  } else {
    canonicalDomain_ = canon.domain();
  }
  ++counts_[patternId(canon)];
  ++total_;
}

double EmpiricalMeasure::mass(const Pattern& p) const {
  if (total_ == 0) throw UsageError("EmpiricalMeasure: no observations");
  auto it = counts_.find(patternId(p));
  if (it == counts_.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_);
}

std::map<std::string, double> EmpiricalMeasure::frequencies() const {
  if (total_ == 0) throw UsageError("EmpiricalMeasure: no observations");
  std::map<std::string, double> freq;
  for (const auto& [id, count] : counts_)
    freq[id] = static_cast<double>(count) / static_cast<double>(total_);
  return freq;
}

EmpiricalMeasure gridEmpiricalMeasure(const Coloring& omega, const SiteSet& q,
                                      const SiteSet& window,
                                      const std::vector<GroupElement>& grid) {
  if (grid.empty()) throw UsageError("gridEmpiricalMeasure: empty grid");
  if (window.empty()) throw UsageError("gridEmpiricalMeasure: empty window");
  const Group& grp = window.group();
  EmpiricalMeasure m;
  std::set<GroupElement> covered;
  for (const GroupElement& t : grid) {
    const SiteSet translated = shiftSet(window, grp.inverse(t));  // window * t
    for (const GroupElement& v : translated) {
      if (!q.contains(v))
        throw UsageError("gridEmpiricalMeasure: window translate escapes Q");
      if (!covered.insert(v).second)
        throw UsageError("gridEmpiricalMeasure: window translates overlap");
    }
    // Re-anchor the observation to the common window domain.
    m.add(shiftPattern(restrict(omega, translated), grp.inverse(t)));
  }
  return m;
}

VariationDistance totalVariation(const std::map<std::string, double>& nu1,
                                 const std::map<std::string, double>& nu2) {
  double l1 = 0.0;
  auto it1 = nu1.begin();
  auto it2 = nu2.begin();
  while (it1 != nu1.end() || it2 != nu2.end()) {
    if (it2 == nu2.end() || (it1 != nu1.end() && it1->first < it2->first)) {
      l1 += std::abs(it1->second);
      ++it1;
    } else if (it1 == nu1.end() || it2->first < it1->first) {
      l1 += std::abs(it2->second);
      ++it2;
    } else {
      l1 += std::abs(it1->second - it2->second);
      ++it1;
      ++it2;
    }
  }
  return VariationDistance{0.5 * l1, l1};
}

void writeFrequencyCsv(const EmpiricalMeasure& m, std::ostream& os) {
  os << "pattern-id,count,frequency\n";
  const double total = static_cast<double>(m.total());
  for (const auto& [id, count] : m.counts()) {
    char freq[64];
    std::snprintf(freq, sizeof freq, "%.17g",
                  static_cast<double>(count) / total);
    os << id << ',' << count << ',' << freq << '\n';
  }
}

}  // namespace thermolim

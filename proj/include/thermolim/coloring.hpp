#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thermolim/group.hpp"

namespace thermolim {

/// The color alphabet: either finitely many real values with probability
/// weights, or a real interval sampled uniformly.
class ColorSet {
 public:
  /// Distinct colors; weights nonnegative and summing to 1 within 1e-12.
  static ColorSet finite(std::vector<double> colors,
                         std::vector<double> weights);
  static ColorSet interval(double lo, double hi);
  /// {0, 1} with weights {1-p, p}.
  static ColorSet bernoulli(double p);

  bool isFinite() const { return finite_; }
  const std::vector<double>& colors() const;
  const std::vector<double>& weights() const;
  double lo() const;
  double hi() const;

  /// Weight of an exact color value; the color must be in the set.
  double weightOf(double color) const;

  /// sup |color| over the alphabet.
  double supAbs() const;

  /// Inverse cdf at u in [0,1).
  double sample(double u) const;

 private:
  ColorSet() = default;
  bool finite_ = true;
  std::vector<double> colors_, weights_;
  double lo_ = 0.0, hi_ = 0.0;
};

/// A coloring of the whole group.  Evaluation is a pure function of the
/// construction parameters and the site, so repeated queries agree and
/// concurrent use needs no synchronization.
class Coloring {
 public:
  enum class Kind { deterministic, iidProduct, independentAtDistance };

  static Coloring deterministic(const Group& g,
                                std::function<double(const GroupElement&)> fn,
                                std::optional<ColorSet> colors = std::nullopt);
  static Coloring constant(const Group& g, double value);

  /// Colors at distinct sites come from independent counter-based streams
  /// keyed by (seed, site coordinates).
  static Coloring iid(const Group& g, ColorSet colors, std::uint64_t seed);

  /// Site families at pairwise word distance > range are independent.
  /// Realized by one independent stream per block of a cube partition whose
  /// block diameter stays below range, composed with a per-site circle shift
  /// that restores the exact marginal law.  Lattice groups only.
  static Coloring independentAtDistance(const Group& g, ColorSet colors,
                                        double range, std::uint64_t seed);

  Kind kind() const;
  const Group& group() const;
  bool hasColorSet() const;
  const ColorSet& colorSet() const;
  double range() const;
  std::uint64_t seed() const;

  double operator()(const GroupElement& v) const;

 private:
  struct Impl;
  explicit Coloring(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// The coloring seen after moving the frame by g: value at v is
/// omega(shift(v, g)), the counterpart of shifting a site set by g.
Coloring shiftColoring(const Coloring& omega, const GroupElement& g);

/// Value 1 on 0 and on points whose coordinate gcd is 1, else 0.
Coloring visibleColoring(int d);

/// A coloring restricted to a finite domain.
class Pattern {
 public:
  /// values aligned with the domain's deterministic site order.
  Pattern(SiteSet domain, std::vector<double> values);

  const SiteSet& domain() const { return domain_; }
  const std::vector<double>& values() const { return values_; }
  double value(const GroupElement& v) const;

  bool operator==(const Pattern& other) const {
    return domain_ == other.domain_ && values_ == other.values_;
  }

 private:
  SiteSet domain_;
  std::vector<double> values_;
};

Pattern restrict(const Coloring& omega, const SiteSet& lambda);

/// Translate of a pattern: domain moves to dom*g, the value at v*g is the
/// old value at v.
Pattern shiftPattern(const Pattern& p, const GroupElement& g);

/// The translate of p whose minimal domain element is the identity; the
/// canonical representative of the translation class of p.
Pattern canonicalPattern(const Pattern& p);

/// Serialization of canonicalPattern(p): table key and CSV pattern-id.
std::string patternId(const Pattern& p);

/// Number of translates of p occurring as sub-patterns of pprime (translated
/// domain inside dom(pprime), values equal).  Sliding-window comparison; the
/// empty pattern occurs exactly once.
long long patternCount(const Pattern& p, const Pattern& pprime);

/// patternCount(p, omega|_q) / |q|.
double empiricalFrequency(const Pattern& p, const Coloring& omega,
                          const SiteSet& q);

/// Probability of seeing p at a fixed position under the iid product measure
/// with the given finite ColorSet: the product of the color weights.
double exactFrequency(const Pattern& p, const ColorSet& colors);

/// Counts of patterns observed at translated windows, keyed by canonical
/// translation class.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;

  /// Records one observation; all observations must share a translated
  /// domain.
  void add(const Pattern& p);

  long long total() const { return total_; }
  double mass(const Pattern& p) const;
  const std::map<std::string, long long>& counts() const { return counts_; }
  std::map<std::string, double> frequencies() const;

 private:
  std::map<std::string, long long> counts_;
  long long total_ = 0;
  std::optional<SiteSet> canonicalDomain_;
};

/// Observations of omega through the window translated to each grid point.
/// Window translates must stay inside q and be pairwise disjoint.
EmpiricalMeasure gridEmpiricalMeasure(const Coloring& omega, const SiteSet& q,
                                      const SiteSet& window,
                                      const std::vector<GroupElement>& grid);

struct VariationDistance {
  double tv;  // half the l1 distance
  double l1;
};

/// Both distances between frequency tables; ids missing from one table count
/// as mass zero.
VariationDistance totalVariation(const std::map<std::string, double>& nu1,
                                 const std::map<std::string, double>& nu2);

/// CSV export: header "pattern-id,count,frequency", one row per class.
void writeFrequencyCsv(const EmpiricalMeasure& m, std::ostream& os);

}  // namespace thermolim

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermolim/errors.hpp"
#include "thermolim/rng.hpp"

namespace thermolim {

enum class GroupKind : std::uint8_t { lattice, heisenberg };

// Element in canonical integer coordinates. At most 4 coordinates; the tag
// byte encodes (kind, coordinate count) so mixed-group arguments are caught.
struct GroupElement {
  std::array<std::int64_t, 4> c{0, 0, 0, 0};
  std::uint8_t n = 0;
  std::uint8_t tag = 0;

  friend constexpr auto operator<=>(const GroupElement&,
                                    const GroupElement&) = default;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& v) const {
    std::uint64_t h = v.tag;
    for (int i = 0; i < v.n; ++i) h = foldKey(h, v.c[i]);
    return static_cast<std::size_t>(h);
  }
};

std::string coordString(const GroupElement& v);
std::ostream& operator<<(std::ostream& os, const GroupElement& v);

// Finitely generated group: Z^d (1 <= d <= 4) or the discrete Heisenberg
// group with product (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+x*y').
// The generating set S is symmetric and excludes the identity. The Cayley
// graph has edges {v, s*v}; with that convention the shift v -> v*g^{-1}
// is a graph isometry, which every boundary/pattern statement relies on.
class Group {
 public:
  static Group lattice(int d);
  static Group heisenberg();

  GroupKind kind() const { return kind_; }
  // Coordinate count (d for Z^d, 3 for Heisenberg).
  int dim() const { return dim_; }
  const std::vector<GroupElement>& generators() const { return gens_; }
  GroupElement identity() const;
  GroupElement element(const std::vector<std::int64_t>& coords) const;

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;

  // Shift action v -> v * g^{-1}.
  GroupElement shift(const GroupElement& v, const GroupElement& g) const;

  void checkElement(const GroupElement& v) const;
  std::uint8_t tag() const { return tag_; }

  friend bool operator==(const Group& a, const Group& b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_;
  }

 private:
  Group(GroupKind kind, int dim);

  GroupKind kind_;
  int dim_;
  std::uint8_t tag_;
  std::vector<GroupElement> gens_;
};

// Finite set of sites. Stored as a deduplicated vector sorted by the
// lexicographic order of canonical coordinates, so iteration order is
// deterministic and membership is a binary search.
class SiteSet {
 public:
  SiteSet() = default;
  SiteSet(const Group& group, std::vector<GroupElement> sites);

  const Group& group() const { return group_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(const GroupElement& v) const;
  // Index of v in iteration order, or -1.
  std::ptrdiff_t indexOf(const GroupElement& v) const;
  const std::vector<GroupElement>& sites() const { return sites_; }

  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  friend bool operator==(const SiteSet& a, const SiteSet& b) {
    return a.group_ == b.group_ && a.sites_ == b.sites_;
  }

 private:
  Group group_ = Group::lattice(1);
  std::vector<GroupElement> sites_;
};

SiteSet setUnion(const SiteSet& a, const SiteSet& b);
SiteSet setIntersection(const SiteSet& a, const SiteSet& b);
SiteSet setMinus(const SiteSet& a, const SiteSet& b);
// Translate the whole set: { v * g^{-1} : v in A }.
SiteSet shiftSet(const SiteSet& a, const GroupElement& g);

// Nested exhausting sequences used for thermodynamic limits.
//   cubes          [0,L)^d on Z^d
//   balls          word-metric balls of radius L around the identity
//   heisBoxes      [0,n) x [0,n) x [0,n^2) on the Heisenberg group
//   heisBoxesFine  same family refined so consecutive sets differ by one
//                  side increment; used where many small nested shapes are
//                  needed (tiling shape lists)
struct FolnerSpec {
  enum class Family { cubes, balls, heisBoxes, heisBoxesFine };

  Group group = Group::lattice(1);
  Family family = Family::cubes;
  std::vector<int> indices;
  bool nested = true;
};

SiteSet folnerSet(const FolnerSpec& spec, int index);

// Word distance via breadth-first search; nullopt when it exceeds cutoff.
// For Z^d this equals the 1-norm of the coordinate difference.
std::optional<int> wordDistance(const Group& group, const GroupElement& v,
                                const GroupElement& w, int cutoff);

// r-boundary: sites outside Lambda within distance r of Lambda, plus sites
// inside Lambda within distance r of the complement. r > 0.
SiteSet rBoundary(const SiteSet& lambda, double r);

// |boundary| / |Lambda|.
double folnerRatio(const SiteSet& lambda, double r);

// Maximal pairwise word distance. Exact; usage error on empty sets.
int diameter(const SiteSet& lambda);

// | union_{k<j} Q_k^{-1} Q_j | / |Q_j| for the last set of the prefix.
// A single-set prefix has an empty union, hence ratio 0.
double temperednessRatio(const std::vector<SiteSet>& prefix);

}  // namespace thermolim

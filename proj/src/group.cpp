#include "thermolim/group.hpp"

#include <algorithm>
#include <ostream>
#include <cstdlib>
#include <deque>
#include <unordered_set>

namespace thermolim {

namespace {

std::uint8_t makeTag(GroupKind kind, int dim) {
  return static_cast<std::uint8_t>((static_cast<int>(kind) << 4) | dim);
}

}  // namespace

std::string coordString(const GroupElement& v) {
  std::string s = "(";
  for (int i = 0; i < v.n; ++i) {
    if (i) s += ",";
    s += std::to_string(v.c[i]);
  }
  return s + ")";
}

std::ostream& operator<<(std::ostream& os, const GroupElement& v) {
  return os << coordString(v);
}

Group::Group(GroupKind kind, int dim)
    : kind_(kind), dim_(dim), tag_(makeTag(kind, dim)) {
  auto gen = [&](std::initializer_list<std::int64_t> coords) {
    GroupElement g;
    g.n = static_cast<std::uint8_t>(dim_);
    g.tag = tag_;
    int i = 0;
    for (auto c : coords) g.c[i++] = c;
    return g;
  };
  if (kind_ == GroupKind::lattice) {
    for (int i = 0; i < dim_; ++i) {
      GroupElement p = gen({}), m = gen({});
      p.c[i] = 1;
      m.c[i] = -1;
      gens_.push_back(p);
      gens_.push_back(m);
    }
  } else {
    gens_.push_back(gen({1, 0, 0}));
    gens_.push_back(gen({-1, 0, 0}));
    gens_.push_back(gen({0, 1, 0}));
    gens_.push_back(gen({0, -1, 0}));
  }
}

Group Group::lattice(int d) {
  if (d < 1 || d > 4) throw UsageError("lattice dimension must be in [1,4]");
  return Group(GroupKind::lattice, d);
}

Group Group::heisenberg() { return Group(GroupKind::heisenberg, 3); }

GroupElement Group::identity() const {
  GroupElement e;
  e.n = static_cast<std::uint8_t>(dim_);
  e.tag = tag_;
  return e;
}

GroupElement Group::element(const std::vector<std::int64_t>& coords) const {
  if (static_cast<int>(coords.size()) != dim_)
    throw UsageError("element needs " + std::to_string(dim_) + " coordinates");
  GroupElement v = identity();
  for (int i = 0; i < dim_; ++i) v.c[i] = coords[i];
  return v;
}

void Group::checkElement(const GroupElement& v) const {
  if (v.tag != tag_ || v.n != dim_)
    throw UsageError("element does not belong to this group");
}

GroupElement Group::multiply(const GroupElement& a,
                             const GroupElement& b) const {
  checkElement(a);
  checkElement(b);
  GroupElement r = identity();
  for (int i = 0; i < dim_; ++i) r.c[i] = a.c[i] + b.c[i];
  if (kind_ == GroupKind::heisenberg) r.c[2] += a.c[0] * b.c[1];
  return r;
}

GroupElement Group::inverse(const GroupElement& a) const {
  checkElement(a);
  GroupElement r = identity();
  for (int i = 0; i < dim_; ++i) r.c[i] = -a.c[i];
  if (kind_ == GroupKind::heisenberg) r.c[2] = -a.c[2] + a.c[0] * a.c[1];
  return r;
}

GroupElement Group::shift(const GroupElement& v, const GroupElement& g) const {
  return multiply(v, inverse(g));
}

SiteSet::SiteSet(const Group& group, std::vector<GroupElement> sites)
    : group_(group), sites_(std::move(sites)) {
  for (const auto& v : sites_) group_.checkElement(v);
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool SiteSet::contains(const GroupElement& v) const {
  return std::binary_search(sites_.begin(), sites_.end(), v);
}

std::ptrdiff_t SiteSet::indexOf(const GroupElement& v) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), v);
  if (it == sites_.end() || *it != v) return -1;
  return it - sites_.begin();
}

SiteSet setUnion(const SiteSet& a, const SiteSet& b) {
  if (!(a.group() == b.group())) throw UsageError("set union across groups");
  std::vector<GroupElement> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return SiteSet(a.group(), std::move(out));
}

SiteSet setIntersection(const SiteSet& a, const SiteSet& b) {
  if (!(a.group() == b.group()))
    throw UsageError("set intersection across groups");
  std::vector<GroupElement> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return SiteSet(a.group(), std::move(out));
}

SiteSet setMinus(const SiteSet& a, const SiteSet& b) {
  if (!(a.group() == b.group()))
    throw UsageError("set difference across groups");
  std::vector<GroupElement> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return SiteSet(a.group(), std::move(out));
}

SiteSet shiftSet(const SiteSet& a, const GroupElement& g) {
  const Group& G = a.group();
  GroupElement gi = G.inverse(g);
  std::vector<GroupElement> out;
  out.reserve(a.size());
  for (const auto& v : a) out.push_back(G.multiply(v, gi));
  return SiteSet(G, std::move(out));
}

namespace {

SiteSet latticeBox(const Group& G, const std::vector<std::int64_t>& ext) {
  std::vector<GroupElement> sites;
  std::int64_t total = 1;
  for (auto e : ext) total *= e;
  sites.reserve(static_cast<std::size_t>(total));
  std::vector<std::int64_t> v(ext.size(), 0);
  for (;;) {
    sites.push_back(G.element(v));
    int i = static_cast<int>(ext.size()) - 1;
    while (i >= 0 && ++v[i] == ext[i]) v[i--] = 0;
    if (i < 0) break;
  }
  return SiteSet(G, std::move(sites));
}

SiteSet wordBall(const Group& G, int radius) {
  std::unordered_set<GroupElement, GroupElementHash> seen;
  std::deque<GroupElement> frontier{G.identity()};
  seen.insert(G.identity());
  for (int level = 0; level < radius; ++level) {
    std::deque<GroupElement> next;
    for (const auto& v : frontier)
      for (const auto& s : G.generators()) {
        GroupElement w = G.multiply(s, v);
        if (seen.insert(w).second) next.push_back(w);
      }
    frontier.swap(next);
  }
  return SiteSet(G, std::vector<GroupElement>(seen.begin(), seen.end()));
}

// Refined Heisenberg boxes: interpolate from (n,n,n^2) to (n+1,n+1,(n+1)^2)
// growing one side at a time, so consecutive sets stay nested and sizes grow
// gently. Index 1 is (1,1,1).
std::array<std::int64_t, 3> heisFineExtents(int index) {
  std::array<std::int64_t, 3> ext{1, 1, 1};
  int k = 1;
  for (std::int64_t n = 1; k < index; ++n) {
    if (++k == index) return {n + 1, n, n * n};
    if (++k == index) return {n + 1, n + 1, n * n};
    for (std::int64_t c = n * n + 1; c <= (n + 1) * (n + 1); ++c)
      if (++k == index) return {n + 1, n + 1, c};
  }
  return ext;
}

}  // namespace

SiteSet folnerSet(const FolnerSpec& spec, int index) {
  const Group& G = spec.group;
  switch (spec.family) {
    case FolnerSpec::Family::cubes: {
      if (G.kind() != GroupKind::lattice)
        throw UsageError("cube family requires a lattice group");
      if (index < 1) throw UsageError("cube side must be >= 1");
      return latticeBox(G, std::vector<std::int64_t>(G.dim(), index));
    }
    case FolnerSpec::Family::balls: {
      if (index < 0) throw UsageError("ball radius must be >= 0");
      return wordBall(G, index);
    }
    case FolnerSpec::Family::heisBoxes: {
      if (G.kind() != GroupKind::heisenberg)
        throw UsageError("heisBoxes family requires the Heisenberg group");
      if (index < 1) throw UsageError("box side must be >= 1");
      std::int64_t n = index;
      return latticeBox(G, {n, n, n * n});
    }
    case FolnerSpec::Family::heisBoxesFine: {
      if (G.kind() != GroupKind::heisenberg)
        throw UsageError("heisBoxesFine family requires the Heisenberg group");
      if (index < 1) throw UsageError("index must be >= 1");
      auto ext = heisFineExtents(index);
      return latticeBox(G, {ext[0], ext[1], ext[2]});
    }
  }
  throw UsageError("unknown Folner family");
}

std::optional<int> wordDistance(const Group& G, const GroupElement& v,
                                const GroupElement& w, int cutoff) {
  G.checkElement(v);
  G.checkElement(w);
  if (cutoff < 0) throw UsageError("cutoff must be >= 0");
  if (G.kind() == GroupKind::lattice) {
    std::int64_t d = 0;
    for (int i = 0; i < G.dim(); ++i) d += std::llabs(v.c[i] - w.c[i]);
    if (d > cutoff) return std::nullopt;
    return static_cast<int>(d);
  }
  if (v == w) return 0;
  std::unordered_set<GroupElement, GroupElementHash> seen{v};
  std::deque<GroupElement> frontier{v};
  for (int level = 1; level <= cutoff; ++level) {
    std::deque<GroupElement> next;
    for (const auto& u : frontier)
      for (const auto& s : G.generators()) {
        GroupElement x = G.multiply(s, u);
        if (x == w) return level;
        if (seen.insert(x).second) next.push_back(x);
      }
    if (next.empty()) break;
    frontier.swap(next);
  }
  return std::nullopt;
}

SiteSet rBoundary(const SiteSet& lambda, double r) {
  if (r <= 0) throw UsageError("boundary radius must be positive");
  const Group& G = lambda.group();
  int depth = static_cast<int>(r);
  std::vector<GroupElement> boundary;
  if (depth == 0 || lambda.empty())
    return SiteSet(G, std::move(boundary));

  // Outward multi-source BFS from Lambda.
  std::unordered_set<GroupElement, GroupElementHash> seen(lambda.begin(),
                                                          lambda.end());
  std::deque<GroupElement> frontier(lambda.begin(), lambda.end());
  std::vector<GroupElement> firstShell;
  for (int level = 1; level <= depth; ++level) {
    std::deque<GroupElement> next;
    for (const auto& u : frontier)
      for (const auto& s : G.generators()) {
        GroupElement x = G.multiply(s, u);
        if (seen.insert(x).second) {
          boundary.push_back(x);
          if (level == 1) firstShell.push_back(x);
          next.push_back(x);
        }
      }
    frontier.swap(next);
  }

  // Inward: distance to the complement equals distance to the first outside
  // shell, measured in the full Cayley graph.
  std::unordered_set<GroupElement, GroupElementHash> seen2(firstShell.begin(),
                                                           firstShell.end());
  std::deque<GroupElement> frontier2(firstShell.begin(), firstShell.end());
  for (int level = 1; level <= depth; ++level) {
    std::deque<GroupElement> next;
    for (const auto& u : frontier2)
      for (const auto& s : G.generators()) {
        GroupElement x = G.multiply(s, u);
        if (seen2.insert(x).second) {
          if (lambda.contains(x)) boundary.push_back(x);
          next.push_back(x);
        }
      }
    frontier2.swap(next);
  }
  return SiteSet(G, std::move(boundary));
}

double folnerRatio(const SiteSet& lambda, double r) {
  if (lambda.empty()) throw UsageError("folnerRatio needs a nonempty set");
  return static_cast<double>(rBoundary(lambda, r).size()) /
         static_cast<double>(lambda.size());
}

int diameter(const SiteSet& lambda) {
  if (lambda.empty()) throw UsageError("diameter of an empty set");
  const Group& G = lambda.group();
  if (G.kind() == GroupKind::lattice) {
    // max_{v,w} |v-w|_1 = max over sign patterns of the linear span.
    int d = G.dim();
    std::int64_t best = 0;
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::int64_t hi = INT64_MIN, lo = INT64_MAX;
      for (const auto& v : lambda) {
        std::int64_t s = 0;
        for (int i = 0; i < d; ++i)
          s += (mask & (1 << i)) ? v.c[i] : -v.c[i];
        hi = std::max(hi, s);
        lo = std::min(lo, s);
      }
      best = std::max(best, hi - lo);
    }
    return static_cast<int>(best);
  }
  // BFS from every site until all other sites are reached.
  int best = 0;
  for (const auto& v : lambda) {
    std::unordered_set<GroupElement, GroupElementHash> seen{v};
    std::deque<GroupElement> frontier{v};
    std::size_t found = 1;
    int level = 0;
    while (found < lambda.size()) {
      ++level;
      std::deque<GroupElement> next;
      for (const auto& u : frontier)
        for (const auto& s : G.generators()) {
          GroupElement x = G.multiply(s, u);
          if (seen.insert(x).second) {
            if (lambda.contains(x)) ++found;
            next.push_back(x);
          }
        }
      frontier.swap(next);
    }
    best = std::max(best, level);
  }
  return best;
}

double temperednessRatio(const std::vector<SiteSet>& prefix) {
  if (prefix.empty())
    throw UsageError("temperedness needs a nonempty prefix");
  if (prefix.size() == 1) return 0.0;  // empty union
  const SiteSet& qj = prefix.back();
  const Group& G = qj.group();
  std::vector<GroupElement> products;
  for (std::size_t k = 0; k + 1 < prefix.size(); ++k) {
    if (!(prefix[k].group() == G))
      throw UsageError("temperedness prefix mixes groups");
    for (const auto& qk : prefix[k]) {
      GroupElement inv = G.inverse(qk);
      for (const auto& q : qj) products.push_back(G.multiply(inv, q));
    }
  }
  SiteSet u(G, std::move(products));
  return static_cast<double>(u.size()) / static_cast<double>(qj.size());
}

}  // namespace thermolim

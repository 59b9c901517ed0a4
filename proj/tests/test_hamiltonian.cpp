#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <vector>

#include "thermolim/errors.hpp"
#include "thermolim/hamiltonian.hpp"
#include "thermolim/rng.hpp"
#include "thermolim/spectral.hpp"

using namespace thermolim;

namespace {

SiteSet cube(const Group& g, int l) {
  FolnerSpec spec;
  spec.group = g;
  spec.family = FolnerSpec::Family::cubes;
  return folnerSet(spec, l);
}

// Independent component labeling by repeated BFS.
std::vector<std::set<GroupElement>> bfsComponents(const PercolationGraph& g) {
  std::set<GroupElement> left(g.vertices.begin(), g.vertices.end());
  std::vector<std::set<GroupElement>> comps;
  while (!left.empty()) {
    std::set<GroupElement> comp;
    std::queue<GroupElement> q;
    q.push(*left.begin());
    left.erase(left.begin());
    comp.insert(q.front());
    while (!q.empty()) {
      GroupElement v = q.front();
      q.pop();
      for (const auto& [a, b] : g.edges) {
        GroupElement other;
        if (a == v)
          other = b;
        else if (b == v)
          other = a;
        else
          continue;
        if (left.erase(other)) {
          comp.insert(other);
          q.push(other);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

TEST_CASE("anderson matrix clips the full line operator") {
  Group z1 = Group::lattice(1);
  SymmetricMatrix m = buildAndersonMatrix(Coloring::constant(z1, 0.0), cube(z1, 3));
  CHECK(m.dim() == 3);
  CHECK(m.at(0, 0) == 2.0);
  CHECK(m.at(1, 1) == 2.0);
  CHECK(m.at(2, 2) == 2.0);
  CHECK(m.at(0, 1) == -1.0);
  CHECK(m.at(1, 2) == -1.0);
  CHECK(m.at(0, 2) == 0.0);
  CHECK(m.sites() == cube(z1, 3).sites());

  SymmetricMatrix single = buildAndersonMatrix(Coloring::constant(z1, 0.75),
                                               SiteSet(z1, {z1.identity()}));
  CHECK(single.dim() == 1);
  CHECK(single.at(0, 0) == 2.75);

  CHECK_THROWS_AS(buildAndersonMatrix(Coloring::constant(z1, 0.0), SiteSet(z1, {})),
                  UsageError);
}

TEST_CASE("anderson spectra respect the Gershgorin window") {
  for (int d : {1, 2}) {
    Group g = Group::lattice(d);
    Rng rng(314 + d);
    for (int rep = 0; rep < 10; ++rep) {
      Coloring omega =
          Coloring::iid(g, ColorSet::interval(0.0, 1.5), rng.next());
      SiteSet lam = cube(g, d == 1 ? 30 : 6);
      EigenvalueList w = eigenvalues(buildAndersonMatrix(omega, lam));
      CHECK(w.front() >= 0.0 - 1e-9);
      CHECK(w.back() <= 4.0 * d + 1.5 + 1e-9);
    }
  }
}

TEST_CASE("site percolation graph on the full and empty colorings") {
  Group z2 = Group::lattice(2);
  SiteSet lam = cube(z2, 3);

  PercolationGraph full = sitePercolationGraph(Coloring::constant(z2, 1.0), lam);
  CHECK(full.vertices.size() == 9);
  CHECK(full.edges.size() == 12);  // 2 * L * (L-1) grid edges

  PercolationGraph none = sitePercolationGraph(Coloring::constant(z2, 0.0), lam);
  CHECK(none.vertices.empty());
  CHECK(none.edges.empty());

  Coloring dot = Coloring::deterministic(z2, [&](const GroupElement& v) {
    return v == z2.element({1, 1}) ? 1.0 : 0.0;
  });
  PercolationGraph single = sitePercolationGraph(dot, lam);
  CHECK(single.vertices.size() == 1);
  CHECK(single.edges.empty());

  CHECK_THROWS_AS(sitePercolationGraph(Coloring::constant(z2, 0.5), lam),
                  UsageError);

  // closed-marker convention: everything except the marker value is open
  Coloring marked = Coloring::deterministic(z2, [&](const GroupElement& v) {
    return v.c[0] == 0 ? 9.0 : 0.5;
  });
  PercolationGraph viaMarker = sitePercolationGraph(marked, lam, 9.0);
  CHECK(viaMarker.vertices.size() == 6);
  for (const auto& [a, b] : viaMarker.edges) {
    CHECK(a.c[0] != 0);
    CHECK(b.c[0] != 0);
  }
}

TEST_CASE("edge percolation graph from direction masks") {
  Group z2 = Group::lattice(2);
  SiteSet lam = cube(z2, 2);

  PercolationGraph full = edgePercolationGraph(Coloring::constant(z2, 3.0), lam);
  CHECK(full.vertices.size() == 4);
  CHECK(full.edges.size() == 4);

  PercolationGraph none = edgePercolationGraph(Coloring::constant(z2, 0.0), lam);
  CHECK(none.vertices.empty());
  CHECK(none.edges.empty());

  // single bit at the origin in direction 1: one edge {0, e1}
  Coloring onebit = Coloring::deterministic(z2, [&](const GroupElement& v) {
    return v == z2.identity() ? 1.0 : 0.0;
  });
  PercolationGraph one = edgePercolationGraph(onebit, lam);
  CHECK(one.vertices.size() == 2);
  REQUIRE(one.edges.size() == 1);
  CHECK(one.edges[0].first == z2.identity());
  CHECK(one.edges[0].second == z2.element({1, 0}));

  CHECK_THROWS_AS(edgePercolationGraph(Coloring::constant(z2, 4.0), lam),
                  UsageError);
  CHECK_THROWS_AS(edgePercolationGraph(Coloring::constant(z2, 1.5), lam),
                  UsageError);
}

TEST_CASE("edge mask alphabet carries binomial weights") {
  ColorSet masks = edgeMaskColors(2, 0.3);
  CHECK(masks.colors().size() == 4);
  CHECK(masks.weightOf(0.0) == doctest::Approx(0.49));
  CHECK(masks.weightOf(1.0) == doctest::Approx(0.21));
  CHECK(masks.weightOf(3.0) == doctest::Approx(0.09));
}

TEST_CASE("percolation matrix: subgraph Laplacian plus alpha fill") {
  Group z1 = Group::lattice(1);
  SiteSet lam(z1, {z1.element({-2}), z1.element({-1}), z1.element({0}),
                   z1.element({1}), z1.element({2})});
  Coloring mid = Coloring::deterministic(z1, [](const GroupElement& v) {
    return std::abs(v.c[0]) <= 1 ? 1.0 : 0.0;
  });
  PercolationGraph graph = sitePercolationGraph(mid, lam);
  const double alpha = defaultAlpha(z1, 0.0);
  CHECK(alpha == 3.0);
  SymmetricMatrix m = buildPercolationMatrix(graph, lam, alpha);

  // closed endpoints carry bare alpha rows
  CHECK(m.at(0, 0) == alpha);
  CHECK(m.at(4, 4) == alpha);
  CHECK(m.at(0, 1) == 0.0);

  // the isolated 3-path block has the frozen spectrum {0, 1, 3}
  EigenvalueList w = eigenvalues(m);
  REQUIRE(w.size() == 5);
  CHECK(std::abs(w[0]) < 1e-13);
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(w[2] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(w[3] == alpha);
  CHECK(w[4] == alpha);

  // constant vector on the cluster is in the kernel
  std::vector<double> ind{0.0, 1.0, 1.0, 1.0, 0.0};
  std::vector<double> y = multiply(m, ind);
  for (std::size_t i = 1; i <= 3; ++i) CHECK(y[i] == 0.0);

  // fully closed box: alpha times the identity
  SymmetricMatrix closedM = buildPercolationMatrix(
      sitePercolationGraph(Coloring::constant(z1, 0.0), lam), lam, alpha);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i; j < 5; ++j)
      CHECK(closedM.at(i, j) == (i == j ? alpha : 0.0));

  CHECK_THROWS_AS(buildPercolationMatrix(graph, lam, 1.5), UsageError);
}

TEST_CASE("percolation spectrum splits into [0, 2 maxdeg] and alpha") {
  Group z2 = Group::lattice(2);
  SiteSet lam = cube(z2, 20);  // 400 sites
  const double alpha = defaultAlpha(z2, 0.0);
  CHECK(alpha == 5.0);
  Rng rng(555);
  for (int rep = 0; rep < 3; ++rep) {
    Coloring omega = Coloring::iid(z2, ColorSet::bernoulli(0.55), rng.next());
    PercolationGraph graph = sitePercolationGraph(omega, lam);
    EigenvalueList w = eigenvalues(buildPercolationMatrix(graph, lam, alpha));
    for (double lamda : w) {
      const bool inBand = lamda >= -1e-9 && lamda <= 8.0 + 1e-9;
      const bool atAlpha = std::abs(lamda - alpha) <= 1e-9;
      CHECK((inBand || atAlpha));
    }
  }
}

TEST_CASE("jump of the counting function at zero counts the clusters") {
  Group z2 = Group::lattice(2);
  SiteSet lam = cube(z2, 8);
  Rng rng(808);
  for (int rep = 0; rep < 5; ++rep) {
    Coloring omega = Coloring::iid(z2, ColorSet::bernoulli(0.5), rng.next());
    PercolationGraph graph = sitePercolationGraph(omega, lam);
    const double alpha = defaultAlpha(z2, 0.0);
    EigenvalueList w = eigenvalues(buildPercolationMatrix(graph, lam, alpha));
    const long long kernel =
        std::count_if(w.begin(), w.end(), [](double x) { return std::abs(x) < 1e-9; });
    CHECK(kernel == static_cast<long long>(clusterDecomposition(graph).size()));
  }
}

TEST_CASE("cluster decomposition equals brute force labeling") {
  Group z2 = Group::lattice(2);

  PercolationGraph empty =
      sitePercolationGraph(Coloring::constant(z2, 0.0), cube(z2, 3));
  CHECK(clusterDecomposition(empty).empty());

  PercolationGraph full =
      sitePercolationGraph(Coloring::constant(z2, 1.0), cube(z2, 3));
  auto clusters = clusterDecomposition(full);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].size() == 9);

  Coloring pair = Coloring::deterministic(z2, [&](const GroupElement& v) {
    return (v == z2.identity() || v == z2.element({2, 0})) ? 1.0 : 0.0;
  });
  auto twoDots = clusterDecomposition(sitePercolationGraph(pair, cube(z2, 3)));
  REQUIRE(twoDots.size() == 2);
  CHECK(twoDots[0].size() == 1);
  CHECK(twoDots[1].size() == 1);

  Rng rng(4711);
  for (int rep = 0; rep < 20; ++rep) {
    SiteSet lam = cube(z2, 20);  // 400 sites
    Coloring omega = Coloring::iid(z2, ColorSet::bernoulli(0.45), rng.next());
    PercolationGraph graph = sitePercolationGraph(omega, lam);
    auto mine = clusterDecomposition(graph);
    auto oracle = bfsComponents(graph);
    REQUIRE(mine.size() == oracle.size());
    std::size_t covered = 0;
    for (const SiteSet& c : mine) {
      std::set<GroupElement> key(c.begin(), c.end());
      CHECK(std::count(oracle.begin(), oracle.end(), key) == 1);
      covered += c.size();
    }
    CHECK(covered == graph.vertices.size());
  }
}

TEST_CASE("origin cluster size probabilities match the closed forms") {
  ModelSpec site;
  site.kind = ModelKind::sitePercolation;
  site.dim = 2;
  site.pSite = 0.3;
  MonteCarloEstimate est = clusterSizeAtOriginProbability(site, 2, 40000, 17);
  const double siteTheory = 4.0 * 0.3 * 0.3 * std::pow(0.7, 6);  // 0.04235...
  CHECK(est.lo <= siteTheory);
  CHECK(siteTheory <= est.hi);
  CHECK(std::abs(est.estimate - siteTheory) < 0.005);

  ModelSpec edge;
  edge.kind = ModelKind::edgePercolation;
  edge.dim = 2;
  edge.pEdge = 0.3;
  MonteCarloEstimate eest = clusterSizeAtOriginProbability(edge, 2, 40000, 18);
  const double edgeTheory = 4.0 * 0.3 * std::pow(0.7, 6);  // 0.14117...
  CHECK(eest.lo <= edgeTheory);
  CHECK(edgeTheory <= eest.hi);
  CHECK(std::abs(eest.estimate - edgeTheory) < 0.008);

  ModelSpec dead = site;
  dead.pSite = 0.0;
  CHECK(clusterSizeAtOriginProbability(dead, 2, 200, 1).estimate == 0.0);

  CHECK_THROWS_AS(clusterSizeAtOriginProbability(site, 2, 99, 1), UsageError);
  ModelSpec bad = site;
  bad.kind = ModelKind::anderson;
  CHECK_THROWS_AS(clusterSizeAtOriginProbability(bad, 2, 200, 1), UsageError);
}

TEST_CASE("matrices export as coordinate text") {
  Group z1 = Group::lattice(1);
  SymmetricMatrix m = buildAndersonMatrix(Coloring::constant(z1, 0.0), cube(z1, 2));
  std::ostringstream os;
  writeCoordinateText(m, os);
  CHECK(os.str() == "0, 0, 2\n0, 1, -1\n1, 1, 2\n");
}

#include "thermolim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "thermolim/errors.hpp"
#include "thermolim/rng.hpp"

namespace thermolim {
namespace {

// Positive generator directions: one representative per inverse pair.
std::vector<GroupElement> positiveGenerators(const Group& g) {
  std::vector<GroupElement> pos;
  for (const GroupElement& s : g.generators()) {
    bool isInverse = false;
    for (const GroupElement& seen : pos)
      if (g.multiply(seen, s) == g.identity()) isInverse = true;
    if (!isInverse) pos.push_back(s);
  }
  return pos;
}

void sortEdges(std::vector<std::pair<GroupElement, GroupElement>>& edges) {
  for (auto& e : edges)
    if (e.second < e.first) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
}

bool isOpenSite(double value, const std::optional<double>& closedMarker) {
  if (closedMarker) return value != *closedMarker;
  if (value != 0.0 && value != 1.0)
    throw UsageError(
        "sitePercolationGraph: colors must be 0/1 unless a closed marker is "
        "given");
  return value == 1.0;
}

}  // namespace

double defaultAlpha(const Group& group, double supPotential) {
  return static_cast<double>(group.generators().size()) + supPotential + 1.0;
}

SymmetricMatrix buildAndersonMatrix(const Coloring& omega,
                                    const SiteSet& lambda) {
  if (lambda.empty()) throw UsageError("buildAndersonMatrix: empty box");
  const Group& g = lambda.group();
  if (!(omega.group() == g))
    throw UsageError("buildAndersonMatrix: coloring group mismatch");
  const double degree = static_cast<double>(g.generators().size());
  SymmetricMatrix m(lambda.size(), lambda.sites());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const GroupElement& v = lambda.sites()[i];
    m.set(i, i, degree + omega(v));
    for (const GroupElement& s : g.generators()) {
      const GroupElement w = g.multiply(s, v);
      const std::ptrdiff_t j = lambda.indexOf(w);
      if (j >= 0 && v < w) m.set(i, static_cast<std::size_t>(j), -1.0);
    }
  }
  return m;
}

PercolationGraph sitePercolationGraph(const Coloring& omega,
                                      const SiteSet& lambda,
                                      std::optional<double> closedMarker) {
  const Group& g = lambda.group();
  if (!(omega.group() == g))
    throw UsageError("sitePercolationGraph: coloring group mismatch");
  std::vector<GroupElement> open;
  for (const GroupElement& v : lambda)
    if (isOpenSite(omega(v), closedMarker)) open.push_back(v);
  SiteSet vertices(g, std::move(open));
  std::vector<std::pair<GroupElement, GroupElement>> edges;
  for (const GroupElement& v : vertices)
    for (const GroupElement& s : g.generators()) {
      const GroupElement w = g.multiply(s, v);
      if (v < w && vertices.contains(w)) edges.emplace_back(v, w);
    }
  sortEdges(edges);
  return PercolationGraph{std::move(vertices), std::move(edges)};
}

PercolationGraph edgePercolationGraph(const Coloring& omega,
                                      const SiteSet& lambda) {
  const Group& g = lambda.group();
  if (!(omega.group() == g))
    throw UsageError("edgePercolationGraph: coloring group mismatch");
  const std::vector<GroupElement> dirs = positiveGenerators(g);
  std::vector<std::pair<GroupElement, GroupElement>> edges;
  std::vector<GroupElement> touched;
  for (const GroupElement& v : lambda) {
    const double color = omega(v);
    const long long mask = std::llround(color);
    if (static_cast<double>(mask) != color || mask < 0 ||
        mask >= (1LL << dirs.size()))
      throw UsageError(
          "edgePercolationGraph: colors must be bit masks over the "
          "generator directions");
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (!(mask >> j & 1)) continue;
      const GroupElement w = g.multiply(dirs[j], v);
      if (!lambda.contains(w)) continue;
      edges.emplace_back(v, w);
      touched.push_back(v);
      touched.push_back(w);
    }
  }
  sortEdges(edges);
  return PercolationGraph{SiteSet(g, std::move(touched)), std::move(edges)};
}

ColorSet edgeMaskColors(int dim, double p) {
  if (dim < 1 || dim > 20) throw UsageError("edgeMaskColors: bad dimension");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("edgeMaskColors: p outside [0,1]");
  std::vector<double> colors, weights;
  for (long long mask = 0; mask < (1LL << dim); ++mask) {
    colors.push_back(static_cast<double>(mask));
    double w = 1.0;
    for (int j = 0; j < dim; ++j) w *= (mask >> j & 1) ? p : 1.0 - p;
    weights.push_back(w);
  }
  // the binomial weights sum to 1 exactly up to roundoff
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
  return ColorSet::finite(std::move(colors), std::move(weights));
}

SymmetricMatrix buildPercolationMatrix(const PercolationGraph& graph,
                                       const SiteSet& lambda, double alpha,
                                       const std::optional<Coloring>& potential) {
  if (lambda.empty()) throw UsageError("buildPercolationMatrix: empty box");
  const double degreeBound =
      static_cast<double>(lambda.group().generators().size());
  double supPot = 0.0;
  if (potential && potential->hasColorSet())
    supPot = potential->colorSet().supAbs();
  if (!(alpha > degreeBound + supPot))
    throw UsageError(
        "buildPercolationMatrix: alpha must exceed the Cayley degree plus "
        "the potential bound");
  SymmetricMatrix m(lambda.size(), lambda.sites());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const GroupElement& v = lambda.sites()[i];
    if (graph.vertices.contains(v)) {
      if (potential) m.set(i, i, (*potential)(v));
    } else {
      m.set(i, i, alpha);
    }
  }
  for (const auto& [a, b] : graph.edges) {
    const std::ptrdiff_t i = lambda.indexOf(a);
    const std::ptrdiff_t j = lambda.indexOf(b);
    if (i < 0 || j < 0)
      throw UsageError("buildPercolationMatrix: graph vertex outside the box");
    m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), -1.0);
    m.add(static_cast<std::size_t>(i), static_cast<std::size_t>(i), 1.0);
    m.add(static_cast<std::size_t>(j), static_cast<std::size_t>(j), 1.0);
  }
  return m;
}

std::vector<SiteSet> clusterDecomposition(const PercolationGraph& graph) {
  const std::size_t n = graph.vertices.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [a, b] : graph.edges) {
    const std::size_t i = graph.vertices.indexOf(a);
    const std::size_t j = graph.vertices.indexOf(b);
    parent[find(i)] = find(j);
  }
  std::map<std::size_t, std::vector<GroupElement>> byRoot;
  for (std::size_t i = 0; i < n; ++i)
    byRoot[find(i)].push_back(graph.vertices.sites()[i]);
  std::vector<SiteSet> clusters;
  std::vector<std::pair<GroupElement, std::size_t>> order;
  for (auto& [root, sites] : byRoot) order.emplace_back(sites.front(), root);
  std::sort(order.begin(), order.end());
  for (const auto& [lead, root] : order)
    clusters.emplace_back(graph.vertices.group(), std::move(byRoot[root]));
  return clusters;
}

MonteCarloEstimate clusterSizeAtOriginProbability(const ModelSpec& model,
                                                  int s, long long trials,
                                                  std::uint64_t seed) {
  if (trials < 100)
    throw UsageError(
        "clusterSizeAtOriginProbability: need at least 100 trials");
  if (s < 0) throw UsageError("clusterSizeAtOriginProbability: negative size");
  if (model.kind != ModelKind::sitePercolation &&
      model.kind != ModelKind::edgePercolation)
    throw UsageError(
        "clusterSizeAtOriginProbability: cluster statistics need a random "
        "percolation model");
  const Group g = Group::lattice(model.dim);
  // Window radius s+2: a cluster through the origin that leaves the window
  // must contain more than s+1 vertices, so the size-s event is decided.
  const int radius = s + 2;
  std::vector<GroupElement> sites;
  {
    std::vector<std::int64_t> c(static_cast<std::size_t>(model.dim), -radius);
    for (;;) {
      sites.push_back(g.element(c));
      int k = 0;
      while (k < model.dim && ++c[k] > radius) c[k++] = -radius;
      if (k == model.dim) break;
    }
  }
  const SiteSet window(g, std::move(sites));
  const GroupElement origin = g.identity();

  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    const std::uint64_t trialSeed = mixSeed(seed, static_cast<std::uint64_t>(t));
    PercolationGraph graph;
    if (model.kind == ModelKind::sitePercolation) {
      graph = sitePercolationGraph(
          Coloring::iid(g, ColorSet::bernoulli(model.pSite), trialSeed), window);
    } else {
      graph = edgePercolationGraph(
          Coloring::iid(g, edgeMaskColors(model.dim, model.pEdge), trialSeed),
          window);
    }
    long long size = 0;
    if (graph.vertices.contains(origin)) {
      std::vector<char> seen(graph.vertices.size(), 0);
      std::vector<std::vector<std::size_t>> adj(graph.vertices.size());
      for (const auto& [a, b] : graph.edges) {
        const std::size_t i = graph.vertices.indexOf(a);
        const std::size_t j = graph.vertices.indexOf(b);
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
      std::queue<std::size_t> q;
      const std::size_t o = graph.vertices.indexOf(origin);
      q.push(o);
      seen[o] = 1;
      while (!q.empty()) {
        const std::size_t x = q.front();
        q.pop();
        ++size;
        for (std::size_t y : adj[x])
          if (!seen[y]) {
            seen[y] = 1;
            q.push(y);
          }
      }
    }
    if (size == s) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(trials);
  const double half =
      1.96 * std::sqrt(std::max(est * (1.0 - est), 1e-12) /
                       static_cast<double>(trials));
  return MonteCarloEstimate{est, est - half, est + half, hits, trials};
}

}  // namespace thermolim

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "thermolim/coloring.hpp"
#include "thermolim/group.hpp"
#include "thermolim/matrix.hpp"

namespace thermolim {

/// Open subgraph of the Cayley graph: the surviving vertices inside a finite
/// box and the surviving edges between them.  Builders guarantee that every
/// edge endpoint is a vertex and that edges join Cayley neighbors.
struct PercolationGraph {
  SiteSet vertices;
  // Canonically ordered: first < second, list sorted.
  std::vector<std::pair<GroupElement, GroupElement>> edges;
};

enum class ModelKind {
  anderson,
  sitePercolation,
  edgePercolation,
  andersonPercolation,
  visiblePoints,
};

struct ModelSpec {
  ModelKind kind = ModelKind::anderson;
  int dim = 2;                        // lattice dimension
  double pSite = 1.0;                 // open-site probability
  double pEdge = 1.0;                 // per-direction open-edge probability
  std::optional<ColorSet> potential;  // random potential alphabet
  std::optional<double> alpha;        // closed-site energy override
};

/// Smallest admissible closed-site energy plus a unit margin:
/// (Cayley degree) + supPotential + 1.
double defaultAlpha(const Group& group, double supPotential);

/// Hamiltonian of the full graph clipped to lambda: diagonal keeps the full
/// Cayley degree plus the potential, off-diagonal -1 between neighbors that
/// both lie inside lambda.
SymmetricMatrix buildAndersonMatrix(const Coloring& omega,
                                    const SiteSet& lambda);

/// Vertices of lambda that are open, edges between open Cayley neighbors
/// inside lambda.  Without closedMarker the coloring must be {0,1}-valued on
/// lambda and 1 means open; with it, any value other than the marker is open.
PercolationGraph sitePercolationGraph(
    const Coloring& omega, const SiteSet& lambda,
    std::optional<double> closedMarker = std::nullopt);

/// Colors are bit masks over the positive generator directions: bit j keeps
/// the edge from v to (generator j applied to v) when both ends lie in
/// lambda.  Vertices are the endpoints of retained edges.
PercolationGraph edgePercolationGraph(const Coloring& omega,
                                      const SiteSet& lambda);

/// The mask alphabet for iid edge percolation: each of the dim directions is
/// open independently with probability p.
ColorSet edgeMaskColors(int dim, double p);

/// Subgraph Laplacian rows (degree within the graph, -1 along edges, plus
/// the potential when given) for open vertices; bare alpha on the diagonal
/// for the closed sites of lambda.
SymmetricMatrix buildPercolationMatrix(
    const PercolationGraph& graph, const SiteSet& lambda, double alpha,
    const std::optional<Coloring>& potential = std::nullopt);

/// Connected components, ordered by their minimal vertex.
std::vector<SiteSet> clusterDecomposition(const PercolationGraph& graph);

struct MonteCarloEstimate {
  double estimate;
  double lo, hi;  // 95% normal-approximation interval
  long long hits;
  long long trials;
};

/// Monte Carlo estimate of Prob(the cluster of the origin has exactly s
/// vertices), sampled on a window just large enough to decide the event.
MonteCarloEstimate clusterSizeAtOriginProbability(const ModelSpec& model,
                                                  int s, long long trials,
                                                  std::uint64_t seed);

}  // namespace thermolim

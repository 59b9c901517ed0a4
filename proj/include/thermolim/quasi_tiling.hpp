#pragma once

#include <string>
#include <vector>

#include "thermolim/coloring.hpp"
#include "thermolim/field.hpp"
#include "thermolim/group.hpp"

namespace thermolim {

/// Shape count and per-shape density weights for a tiling tolerance.
struct TilingParams {
  double epsilon = 0.0;
  int count = 0;             // smallest N with (1-eps)^N <= eps
  std::vector<double> eta;   // eta[i-1] = eps (1-eps)^(count-i)

  double etaSum() const;     // = 1 - (1-eps)^count
};

/// Valid for epsilon in (0, 0.1); usage error outside.
TilingParams tilingParams(double epsilon);

/// Strictly nested shapes picked from a Folner family by the rule: the next
/// shape K' must satisfy |shell of K' at radius diam(K)| / |K'| <= eps^2/4.
/// The rule forces super-exponential growth, so on any lattice it exceeds
/// every practical budget after a few shapes; the resource error carries the
/// family index at which the budget ran out.
std::vector<SiteSet> selectShapes(const FolnerSpec& folner, double epsilon,
                                  std::size_t maxSites = 100000);

struct TilingCertificate {
  bool disjointInside = false;      // translates inside Q, disjoint across shapes
  double uncoveredRatio = 1.0;      // |Q minus all translates| / |Q|
  bool coverageOk = false;          // uncoveredRatio <= 2 eps
  std::vector<double> removedRatios;  // per shape: |K minus interior| / |K|
  bool interiorOk = false;          // every ratio <= eps, translates disjoint
  std::vector<double> shapeCover;   // per shape: |K_i T_i| / |Q|
  bool pass = false;
};

/// Shapes with their accepted center sets over a target region.  Shape i
/// translates may overlap each other slightly; different shapes never do.
struct QuasiTiling {
  std::vector<SiteSet> shapes;                      // strictly nested
  std::vector<std::vector<GroupElement>> centers;   // aligned with shapes
  SiteSet target;
  double epsilon = 0.0;

  /// Shapes and centers as coordinate lists plus the recomputed certificate.
  std::string toJson() const;
};

/// Greedy placement, biggest shape first, candidates scanned in the target's
/// deterministic site order.  A translate is accepted when it lies in the
/// target, avoids other shapes entirely, and its same-shape overlaps keep the
/// cumulative removed part of the shape within eps |K|.  Each shape stops
/// once the combined covered fraction reaches its running density target.
/// A full shape list must have exactly tilingParams(eps).count entries; a
/// single shape runs the degenerate perfect-tiling mode with target 1-eps^2.
/// Throws PartialTilingError when a target is unreachable.
QuasiTiling constructQuasiTiling(const SiteSet& q,
                                 const std::vector<SiteSet>& shapes,
                                 double epsilon);

/// Recomputes every defining condition from the raw site sets; failures are
/// reported in the certificate, never thrown.
TilingCertificate verifyQuasiTiling(const QuasiTiling& qt, double epsilon);

struct ShapeDensity {
  double cover = 0.0;      // |K_i T_i| / |Q|
  double eta = 0.0;        // expected density weight
  double deviation = 0.0;  // |cover - eta|
  double threshold = 0.0;  // eps^2 / N
  bool within = false;
};

std::vector<ShapeDensity> coverageDensities(const QuasiTiling& qt);

/// Tiling-weighted pattern approximation with its four-term error budget:
///   term1 = 4 sum_i eta_i b(K_i)/|K_i|
///   term2 = (C + 4D) |shell of Q at the largest shape diameter| / |Q| * sum_i |K_i|
///   term3 = C sum_i eta_i * (l1 distance of the shape's tables)
///   term4 = (11C + 32D) eps
/// The bound is reported as a diagnostic; whether the finite constants make
/// it bite at a given scale is not asserted.
struct QuasiApproxResult {
  StepFunction finiteVolume;   // F(Q)/|Q|
  StepFunction value;          // sum_i eta_i sum_P nu_P Ftilde(P)/|K_i|
  double lhs = 0.0;
  double term1 = 0.0, term2 = 0.0, term3 = 0.0, term4 = 0.0;
  double boundRHS = 0.0;
  bool withinBound = false;
};

QuasiApproxResult quasiPatternApproximation(
    const Field& f, const QuasiTiling& qt, const Coloring& omega,
    const std::vector<FrequencyTable>& empirical,
    const std::vector<FrequencyTable>& limits);

/// Perfect-tiling check on a finite window: centers symmetric under
/// inversion (within the window), translates pairwise disjoint, and the
/// window covered.
bool symmetricTileCheck(const SiteSet& lambda, const SiteSet& centers,
                        const SiteSet& windowQ);

/// Several tilings from rotated scan orders; per shape, the largest
/// deviation of any site's center frequency from eta_i/|K_i|.  Report only.
struct UniformTilingReport {
  int tilings = 0;
  std::vector<double> centerDeviation;
};

UniformTilingReport uniformTilingDiagnostics(
    const SiteSet& q, const std::vector<SiteSet>& shapes, double epsilon,
    int tilings);

}  // namespace thermolim

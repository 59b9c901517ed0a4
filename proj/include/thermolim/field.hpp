#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thermolim/coloring.hpp"
#include "thermolim/group.hpp"
#include "thermolim/hamiltonian.hpp"
#include "thermolim/spectral.hpp"

namespace thermolim {

/// Nonnegative set function budgeting additivity defects, together with its
/// declared volume bound: rule(Lambda) <= boundConstant * |Lambda|.
struct BoundaryTerm {
  std::function<double(const SiteSet&)> rule;
  double boundConstant = 0.0;

  double operator()(const SiteSet& lambda) const { return rule(lambda); }
};

/// Identically zero; the budget of an exactly additive field.
BoundaryTerm zeroBoundaryTerm();

/// Lambda -> 4 * |1-boundary of Lambda| with bound 8d + 4, the budget that
/// covers eigenvalue counting on lattices of dimension d.
BoundaryTerm defaultEigBoundaryTerm(int d);

/// Same rule with the bound 4 * (|generators| + 1) read off the group, so it
/// also covers non-lattice Cayley graphs.
BoundaryTerm defaultEigBoundaryTerm(const Group& group);

struct FieldFlags {
  bool local = false;       // value depends on the coloring inside Lambda only
  bool equivariant = false; // F(shifted Lambda, omega) == F(Lambda, shifted omega)
  int monotone = 0;         // +1 nondecreasing in every color, -1 nonincreasing, 0 neither
};

/// Set field with step-function values.  Every evaluation checks the declared
/// sup-norm bound ||F(Lambda, omega)|| <= bound * |Lambda|; a violation means
/// the declaration lies and raises NumericError.
class Field {
 public:
  using Evaluator =
      std::function<StepFunction(const SiteSet&, const Coloring&)>;

  Field(Evaluator evaluator, double bound, BoundaryTerm boundary,
        FieldFlags flags);

  StepFunction operator()(const SiteSet& lambda, const Coloring& omega) const;

  double bound() const { return bound_; }
  const BoundaryTerm& boundaryTerm() const { return boundary_; }
  const FieldFlags& flags() const { return flags_; }

 private:
  Evaluator evaluator_;
  double bound_;
  BoundaryTerm boundary_;
  FieldFlags flags_;
};

/// Eigenvalue counting field of the model: F(Lambda, omega) is the counting
/// function of the Hamiltonian clipped to Lambda.  Bound 1, default boundary
/// term, local and equivariant.  Monotone (antitone) only for the pure
/// potential models; closing a percolation site can split a cluster and move
/// Laplacian eigenvalues both ways, so percolation kinds carry monotone = 0.
Field countingField(const ModelSpec& model, const Group& group);

/// Exactly additive reference field F(Lambda, omega)(E) = #{v in Lambda :
/// omega_v <= E}.  Bound 1, zero boundary term, antitone.
Field potentialThresholdField(const Group& group);

struct AdditivityCheck {
  double defect = 0.0;
  double budget = 0.0;
  bool withinBudget = false;
};

/// defect = ||F(union of parts) - sum_k F(part_k)||, budget = sum_k b(part_k).
/// Parts must be nonempty and pairwise disjoint.
AdditivityCheck checkAlmostAdditivity(const Field& f,
                                      const std::vector<SiteSet>& parts,
                                      const Coloring& omega);

/// Weighted pattern list over one window.  `probability` marks tables whose
/// weights describe a full distribution over every pattern on the window;
/// mass not listed is an unobserved tail and enters l1 distances.
struct FrequencyTable {
  std::vector<Pattern> patterns;
  std::vector<double> weights;
  bool probability = false;

  double totalWeight() const;
};

/// Sliding-window counts: for each translate of the window inside q, the
/// observed pattern pulled back to the window, weighted by count / |q|.
FrequencyTable empiricalTable(const Coloring& omega, const SiteSet& q,
                              const SiteSet& window);

/// The iid product weights of the given patterns (probability table on the
/// listed support; the tail keeps the remaining mass).
FrequencyTable exactTableOnSupport(const FrequencyTable& table,
                                   const ColorSet& colors);

/// Every pattern on the window over a finite alphabet, with product weights.
/// Refuses windows with more than 65536 patterns.
FrequencyTable fullExactTable(const SiteSet& window, const ColorSet& colors);

/// sum_P |a_P - b_P| over all patterns: the listed supports plus the
/// unlisted tail of probability tables.  Exact when supports are complete,
/// an upper bound otherwise.
double tableDistanceL1(const FrequencyTable& a, const FrequencyTable& b);

/// sum_P nu_P * F(window, any coloring extending P) / |window|.  Requires a
/// local field and patterns living on the window.
StepFunction patternAverage(const Field& f, const FrequencyTable& nu,
                            const SiteSet& window);

/// One row of the two-scale approximation: the finite-volume value against
/// the frequency-weighted pattern average, with the three error budget terms
///   term1 = b(window) / |window|
///   term2 = (C_F + D_b) * |shell of q| / |q|
///   term3 = C_F * (l1 distance of empirical and limit tables).
struct ApproxEntry {
  int j = 0;
  int L = 0;
  long long regionSize = 0;
  long long windowSize = 0;
  double shellRadius = 0.0;
  bool shellFromDiameter = false;  // radius = diam(window) instead of L
  bool diamZeroConvention = false; // diameter 0 fell back to radius 1
  StepFunction finiteVolume;
  StepFunction patternEstimate;
  double lhs = 0.0;
  double term1 = 0.0, term2 = 0.0, term3 = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Two-scale bound with shell radius L (cube side length scale).
ApproxEntry errorBoundLMV(const Field& f, const Coloring& omega, int j, int L,
                          const SiteSet& q, const SiteSet& window,
                          const FrequencyTable& empirical,
                          const FrequencyTable& limit);

/// Same bound with shell radius diam(window); valid on any amenable group
/// when the window tiles it symmetrically.
ApproxEntry errorBoundAmenable(const Field& f, const Coloring& omega, int j,
                               int L, const SiteSet& q, const SiteSet& window,
                               const FrequencyTable& empirical,
                               const FrequencyTable& limit);

/// Report-only comparison of a converged finite-volume estimate against the
/// pattern average: the limit satisfies ||limit - average|| <= b(window) /
/// |window|, so the estimate should stay within that plus its own residual
/// Cauchy gap.
struct LimitCheck {
  double discrepancy = 0.0;
  double boundaryBound = 0.0;
  double cauchyGap = 0.0;
  bool withinReported = false;
};

LimitCheck limitVsPatternAverage(const Field& f, const StepFunction& fbarHat,
                                 double cauchyGap, const FrequencyTable& limit,
                                 const SiteSet& window);

/// Normalized values F(Q_j, omega) / |Q_j| along a set sequence, with the
/// consecutive sup-norm gaps as Cauchy diagnostics.
struct ThermoSequence {
  std::vector<int> indices;
  std::vector<long long> sizes;
  std::vector<StepFunction> values;
  std::vector<double> gaps;  // gaps[k] = supNorm(values[k+1], values[k])
};

ThermoSequence thermodynamicSequence(const Field& f, const Coloring& omega,
                                     const FolnerSpec& folner);

/// True iff f(E) <= g(E + shift) + tol everywhere.  g must be nondecreasing;
/// the shift absorbs eigensolver noise in breakpoint positions, which a raw
/// pointwise comparison of unit-height steps cannot tolerate.
bool stepDominatedWithShift(const StepFunction& f, const StepFunction& g,
                            double shift, double tol);

struct MonotoneParams {
  int dim = 1;
  int L = 16;
  int r = 1;    // declared independence range of the coloring family
  int j = 128;  // cube side of the evaluation box
  double kappa = 0.1;
  int seeds = 32;
  std::uint64_t masterSeed = 1;
  int spotChecks = 8;
};

/// Convergence-speed diagnostics for a monotone field: the deterministic
/// part of the speed bound
///   2^{2d+1} ( ((2C+D)L^d + D r^d) / (j-2L) + (2(C+D)r^d + 3D r^d) / (L-2r) )
/// with C the field bound and D the boundary bound, plus per-seed sup-norm
/// deviations from the seed-averaged estimate and directional spot checks
/// (raise one site's color, the value must move the declared way).
struct MonotoneReport {
  double deterministicTerm = 0.0;
  double kappa = 0.0;
  double bound = 0.0;  // deterministicTerm + kappa
  std::vector<double> deviations;
  double maxDeviation = 0.0;
  double quantile95 = 0.0;
  long long violations = 0;
  bool pass = false;
  int spotChecks = 0;
  int spotFailures = 0;
};

MonotoneReport monotoneFieldDiagnostics(
    const Field& f, const std::function<Coloring(std::uint64_t)>& family,
    const MonotoneParams& params);

/// Collected approximation rows plus the optional limit comparison.
struct ApproxReport {
  std::vector<ApproxEntry> entries;
  std::optional<LimitCheck> limit;

  std::string toJson() const;
  /// Header "j,L,lhs,term1,term2,term3,pass", one row per entry.
  void writeCsv(std::ostream& os) const;
};

}  // namespace thermolim

#include "thermolim/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "thermolim/errors.hpp"
#include "thermolim/rng.hpp"

namespace thermolim {

namespace {

StepFunction normalized(const StepFunction& f, double volume) {
  return linearCombine(1.0 / volume, f, 0.0, StepFunction());
}

}  // namespace

BoundaryTerm zeroBoundaryTerm() {
  return {[](const SiteSet&) { return 0.0; }, 0.0};
}

BoundaryTerm defaultEigBoundaryTerm(int d) {
  if (d < 1) throw UsageError("defaultEigBoundaryTerm: dimension must be >= 1");
  return {[](const SiteSet& lambda) {
            return 4.0 * static_cast<double>(rBoundary(lambda, 1.0).size());
          },
          8.0 * d + 4.0};
}

BoundaryTerm defaultEigBoundaryTerm(const Group& group) {
  // |boundary^1| <= (|S| + 1) |Lambda|: every boundary site is in Lambda or
  // reached from it by one generator.
  return {[](const SiteSet& lambda) {
            return 4.0 * static_cast<double>(rBoundary(lambda, 1.0).size());
          },
          4.0 * (static_cast<double>(group.generators().size()) + 1.0)};
}

Field::Field(Evaluator evaluator, double bound, BoundaryTerm boundary,
             FieldFlags flags)
    : evaluator_(std::move(evaluator)),
      bound_(bound),
      boundary_(std::move(boundary)),
      flags_(flags) {
  if (!evaluator_) throw UsageError("Field: evaluator must be callable");
  if (!boundary_.rule) throw UsageError("Field: boundary rule must be callable");
  if (!(bound_ > 0.0) || !std::isfinite(bound_))
    throw UsageError("Field: bound must be positive and finite");
}

StepFunction Field::operator()(const SiteSet& lambda,
                               const Coloring& omega) const {
  if (lambda.empty()) throw UsageError("Field: empty evaluation set");
  StepFunction value = evaluator_(lambda, omega);
  const double cap = bound_ * static_cast<double>(lambda.size());
  if (value.maxAbs() > cap * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "Field: declared bound " << bound_ << " violated: ||value|| = "
        << value.maxAbs() << " on " << lambda.size() << " sites";
    throw NumericError(msg.str());
  }
  return value;
}

Field countingField(const ModelSpec& model, const Group& group) {
  if (group.kind() == GroupKind::lattice && group.dim() != model.dim)
    throw UsageError("countingField: model dimension disagrees with the group");
  if (model.kind == ModelKind::visiblePoints &&
      group.kind() != GroupKind::lattice)
    throw UsageError("countingField: visible points need a lattice");

  double alpha = 0.0;
  switch (model.kind) {
    case ModelKind::anderson:
      break;
    case ModelKind::sitePercolation:
    case ModelKind::edgePercolation:
    case ModelKind::visiblePoints:
      alpha = model.alpha.value_or(defaultAlpha(group, 0.0));
      break;
    case ModelKind::andersonPercolation: {
      const double supPot = model.potential ? model.potential->supAbs() : 0.0;
      alpha = model.alpha.value_or(defaultAlpha(group, supPot));
      break;
    }
  }

  const ModelKind kind = model.kind;
  auto evaluator = [kind, alpha](const SiteSet& lambda,
                                 const Coloring& omega) {
    SymmetricMatrix m = [&] {
      switch (kind) {
        case ModelKind::anderson:
          return buildAndersonMatrix(omega, lambda);
        case ModelKind::sitePercolation:
        case ModelKind::visiblePoints:
          return buildPercolationMatrix(sitePercolationGraph(omega, lambda),
                                        lambda, alpha);
        case ModelKind::edgePercolation:
          return buildPercolationMatrix(edgePercolationGraph(omega, lambda),
                                        lambda, alpha);
        case ModelKind::andersonPercolation:
          return buildPercolationMatrix(
              sitePercolationGraph(omega, lambda, alpha), lambda, alpha,
              omega);
      }
      throw UsageError("countingField: unknown model kind");
    }();
    return countingFunction(eigenvalues(m));
  };

  // Raising a potential color adds a nonnegative rank-one perturbation, so
  // pure potential models are antitone.  Closing a percolation site is not
  // comparable: it can split a cluster, which lowers subgraph Laplacian
  // eigenvalues while the site's own eigenvalue jumps to alpha.
  const int monotone = kind == ModelKind::anderson ? -1 : 0;
  return Field(std::move(evaluator), 1.0, defaultEigBoundaryTerm(group),
               FieldFlags{true, true, monotone});
}

Field potentialThresholdField(const Group& group) {
  (void)group;
  auto evaluator = [](const SiteSet& lambda, const Coloring& omega) {
    std::vector<double> values;
    values.reserve(lambda.size());
    for (const GroupElement& v : lambda) values.push_back(omega(v));
    std::sort(values.begin(), values.end());
    return countingFunction(values);
  };
  return Field(std::move(evaluator), 1.0, zeroBoundaryTerm(),
               FieldFlags{true, true, -1});
}

AdditivityCheck checkAlmostAdditivity(const Field& f,
                                      const std::vector<SiteSet>& parts,
                                      const Coloring& omega) {
  if (parts.empty())
    throw UsageError("checkAlmostAdditivity: need at least one part");
  std::size_t total = 0;
  SiteSet whole = parts.front();
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].empty())
      throw UsageError("checkAlmostAdditivity: parts must be nonempty");
    total += parts[k].size();
    if (k > 0) whole = setUnion(whole, parts[k]);
  }
  if (whole.size() != total)
    throw UsageError("checkAlmostAdditivity: parts overlap");

  StepFunction sum;
  AdditivityCheck out;
  for (const SiteSet& part : parts) {
    sum = linearCombine(1.0, sum, 1.0, f(part, omega));
    out.budget += f.boundaryTerm()(part);
  }
  out.defect = supNorm(f(whole, omega), sum);
  out.withinBudget = out.defect <= out.budget * (1.0 + 1e-12) + 1e-12;
  return out;
}

double FrequencyTable::totalWeight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

FrequencyTable empiricalTable(const Coloring& omega, const SiteSet& q,
                              const SiteSet& window) {
  if (window.empty() || q.empty())
    throw UsageError("empiricalTable: empty region or window");
  if (!(omega.group() == q.group()) || !(q.group() == window.group()))
    throw UsageError("empiricalTable: group mismatch");
  const Group& g = q.group();
  const GroupElement anchor = window.sites().front();

  // Translate g is determined by where it sends the window's first site, so
  // scanning that image over q enumerates every candidate exactly once.
  std::map<std::vector<double>, std::pair<Pattern, long long>> classes;
  for (const GroupElement& w : q) {
    const GroupElement t = g.multiply(g.inverse(anchor), w);
    const SiteSet moved = shiftSet(window, g.inverse(t));
    bool inside = true;
    for (const GroupElement& v : moved)
      if (!q.contains(v)) {
        inside = false;
        break;
      }
    if (!inside) continue;
    Pattern pulled = shiftPattern(restrict(omega, moved), g.inverse(t));
    std::vector<double> key = pulled.values();
    auto [it, fresh] =
        classes.try_emplace(std::move(key), std::move(pulled), 0LL);
    ++it->second.second;
  }

  FrequencyTable table;
  for (const auto& [values, entry] : classes) {
    table.patterns.push_back(entry.first);
    table.weights.push_back(static_cast<double>(entry.second) /
                            static_cast<double>(q.size()));
  }
  return table;
}

FrequencyTable exactTableOnSupport(const FrequencyTable& table,
                                   const ColorSet& colors) {
  FrequencyTable out;
  out.patterns = table.patterns;
  out.probability = true;
  out.weights.reserve(table.patterns.size());
  for (const Pattern& p : table.patterns)
    out.weights.push_back(exactFrequency(p, colors));
  return out;
}

FrequencyTable fullExactTable(const SiteSet& window, const ColorSet& colors) {
  if (window.empty()) throw UsageError("fullExactTable: empty window");
  if (!colors.isFinite())
    throw UsageError("fullExactTable: needs a finite alphabet");
  const std::size_t k = colors.colors().size();
  double count = 1.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    count *= static_cast<double>(k);
    if (count > 65536.0)
      throw UsageError("fullExactTable: more than 65536 patterns");
  }

  FrequencyTable out;
  out.probability = true;
  std::vector<std::size_t> digits(window.size(), 0);
  while (true) {
    std::vector<double> values(window.size());
    for (std::size_t i = 0; i < window.size(); ++i)
      values[i] = colors.colors()[digits[i]];
    Pattern p(window, std::move(values));
    out.weights.push_back(exactFrequency(p, colors));
    out.patterns.push_back(std::move(p));
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == k) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  return out;
}

double tableDistanceL1(const FrequencyTable& a, const FrequencyTable& b) {
  if (a.patterns.size() != a.weights.size() ||
      b.patterns.size() != b.weights.size())
    throw UsageError("tableDistanceL1: malformed table");
  std::optional<SiteSet> domain;
  auto checkDomain = [&domain](const Pattern& p) {
    if (!domain)
      domain = p.domain();
    else if (!(p.domain() == *domain))
      throw UsageError("tableDistanceL1: tables mix windows");
  };

  std::map<std::vector<double>, std::pair<double, double>> joint;
  for (std::size_t i = 0; i < a.patterns.size(); ++i) {
    checkDomain(a.patterns[i]);
    joint[a.patterns[i].values()].first += a.weights[i];
  }
  for (std::size_t i = 0; i < b.patterns.size(); ++i) {
    checkDomain(b.patterns[i]);
    joint[b.patterns[i].values()].second += b.weights[i];
  }
  double dist = 0.0;
  for (const auto& [values, masses] : joint)
    dist += std::abs(masses.first - masses.second);
  // A probability table's unlisted tail faces mass zero in a complete
  // opposite table; with two partial supports this only overestimates.
  if (a.probability) dist += std::max(0.0, 1.0 - a.totalWeight());
  if (b.probability) dist += std::max(0.0, 1.0 - b.totalWeight());
  return dist;
}

StepFunction patternAverage(const Field& f, const FrequencyTable& nu,
                            const SiteSet& window) {
  if (!f.flags().local)
    throw UsageError("patternAverage: needs a local field");
  if (window.empty()) throw UsageError("patternAverage: empty window");
  if (nu.patterns.size() != nu.weights.size())
    throw UsageError("patternAverage: malformed table");

  StepFunction acc;
  for (std::size_t i = 0; i < nu.patterns.size(); ++i) {
    const double w = nu.weights[i];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw UsageError("patternAverage: weights must be nonnegative");
    if (!(nu.patterns[i].domain() == window))
      throw UsageError("patternAverage: pattern lives off the window");
    if (w == 0.0) continue;
    // Any extension of the pattern works for a local field; filling with an
    // in-alphabet value keeps downstream validation happy.
    const Pattern& p = nu.patterns[i];
    const double fill = p.values().front();
    Coloring extended = Coloring::deterministic(
        window.group(), [p, fill](const GroupElement& v) {
          const std::ptrdiff_t idx = p.domain().indexOf(v);
          return idx >= 0 ? p.values()[static_cast<std::size_t>(idx)] : fill;
        });
    acc = linearCombine(1.0, acc, w / static_cast<double>(window.size()),
                        f(window, extended));
  }
  return acc;
}

namespace {

ApproxEntry boundCore(const Field& f, const Coloring& omega, int j, int L,
                      const SiteSet& q, const SiteSet& window,
                      const FrequencyTable& empirical,
                      const FrequencyTable& limit, bool shellFromDiameter) {
  if (q.empty() || window.empty())
    throw UsageError("errorBound: empty region or window");

  ApproxEntry e;
  e.j = j;
  e.L = L;
  e.regionSize = static_cast<long long>(q.size());
  e.windowSize = static_cast<long long>(window.size());
  e.shellFromDiameter = shellFromDiameter;
  if (shellFromDiameter) {
    const int dm = diameter(window);
    e.diamZeroConvention = dm == 0;
    e.shellRadius = dm == 0 ? 1.0 : static_cast<double>(dm);
  } else {
    if (L < 1) throw UsageError("errorBound: window scale must be >= 1");
    e.shellRadius = static_cast<double>(L);
  }

  e.finiteVolume = normalized(f(q, omega), static_cast<double>(q.size()));
  e.patternEstimate = patternAverage(f, limit, window);
  e.lhs = supNorm(e.finiteVolume, e.patternEstimate);

  e.term1 = f.boundaryTerm()(window) / static_cast<double>(window.size());
  e.term2 = (f.bound() + f.boundaryTerm().boundConstant) *
            static_cast<double>(rBoundary(q, e.shellRadius).size()) /
            static_cast<double>(q.size());
  e.term3 = f.bound() * tableDistanceL1(empirical, limit);
  e.rhs = e.term1 + e.term2 + e.term3;
  e.pass = e.lhs <= e.rhs * (1.0 + 1e-12) + 1e-12;
  return e;
}

}  // namespace

ApproxEntry errorBoundLMV(const Field& f, const Coloring& omega, int j, int L,
                          const SiteSet& q, const SiteSet& window,
                          const FrequencyTable& empirical,
                          const FrequencyTable& limit) {
  return boundCore(f, omega, j, L, q, window, empirical, limit, false);
}

ApproxEntry errorBoundAmenable(const Field& f, const Coloring& omega, int j,
                               int L, const SiteSet& q, const SiteSet& window,
                               const FrequencyTable& empirical,
                               const FrequencyTable& limit) {
  return boundCore(f, omega, j, L, q, window, empirical, limit, true);
}

LimitCheck limitVsPatternAverage(const Field& f, const StepFunction& fbarHat,
                                 double cauchyGap,
                                 const FrequencyTable& limit,
                                 const SiteSet& window) {
  LimitCheck out;
  out.discrepancy = supNorm(fbarHat, patternAverage(f, limit, window));
  out.boundaryBound =
      f.boundaryTerm()(window) / static_cast<double>(window.size());
  out.cauchyGap = cauchyGap;
  out.withinReported =
      out.discrepancy <= out.boundaryBound + cauchyGap + 1e-12;
  return out;
}

ThermoSequence thermodynamicSequence(const Field& f, const Coloring& omega,
                                     const FolnerSpec& folner) {
  ThermoSequence seq;
  for (int idx : folner.indices) {
    SiteSet q = folnerSet(folner, idx);
    seq.indices.push_back(idx);
    seq.sizes.push_back(static_cast<long long>(q.size()));
    seq.values.push_back(
        normalized(f(q, omega), static_cast<double>(q.size())));
  }
  for (std::size_t k = 0; k + 1 < seq.values.size(); ++k)
    seq.gaps.push_back(supNorm(seq.values[k + 1], seq.values[k]));
  return seq;
}

bool stepDominatedWithShift(const StepFunction& f, const StepFunction& g,
                            double shift, double tol) {
  if (!(shift >= 0.0) || !(tol >= 0.0))
    throw UsageError("stepDominatedWithShift: negative slack");
  const auto& gv = g.pieceValues();
  for (std::size_t i = 0; i + 1 < gv.size(); ++i)
    if (gv[i] > gv[i + 1])
      throw UsageError("stepDominatedWithShift: g must be nondecreasing");
  if (f.pieceValues().front() > gv.front() + tol) return false;
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
    if (f.pieceValues()[i + 1] > g(f.breakpoints()[i] + shift) + tol)
      return false;
  return true;
}

MonotoneReport monotoneFieldDiagnostics(
    const Field& f, const std::function<Coloring(std::uint64_t)>& family,
    const MonotoneParams& params) {
  if (!family) throw UsageError("monotoneFieldDiagnostics: need a family");
  if (f.flags().monotone == 0)
    throw UsageError("monotoneFieldDiagnostics: field not flagged monotone");
  if (params.dim < 1 || params.r < 0)
    throw UsageError("monotoneFieldDiagnostics: bad dimension or range");
  if (params.L <= 2 * params.r)
    throw UsageError("monotoneFieldDiagnostics: need L > 2r");
  if (params.j <= 2 * params.L)
    throw UsageError("monotoneFieldDiagnostics: need j > 2L");
  if (params.seeds < 2)
    throw UsageError("monotoneFieldDiagnostics: need at least two seeds");

  MonotoneReport report;
  const double c = f.bound();
  const double d = f.boundaryTerm().boundConstant;
  const double ld = std::pow(static_cast<double>(params.L), params.dim);
  const double rd = std::pow(static_cast<double>(params.r), params.dim);
  report.deterministicTerm =
      std::pow(2.0, 2 * params.dim + 1) *
      (((2.0 * c + d) * ld + d * rd) / (params.j - 2.0 * params.L) +
       (2.0 * (c + d) * rd + 3.0 * d * rd) / (params.L - 2.0 * params.r));
  report.kappa = params.kappa;
  report.bound = report.deterministicTerm + params.kappa;

  FolnerSpec cubes{Group::lattice(params.dim), FolnerSpec::Family::cubes, {},
                   true};
  const SiteSet box = folnerSet(cubes, params.j);
  const double volume = static_cast<double>(box.size());

  std::vector<Coloring> colorings;
  std::vector<StepFunction> values;
  StepFunction mean;
  for (int s = 0; s < params.seeds; ++s) {
    colorings.push_back(
        family(mixSeed(params.masterSeed, static_cast<std::uint64_t>(s))));
    values.push_back(normalized(f(box, colorings.back()), volume));
    mean = linearCombine(1.0, mean, 1.0 / params.seeds, values.back());
  }
  for (const StepFunction& v : values)
    report.deviations.push_back(supNorm(v, mean));
  std::vector<double> sorted = report.deviations;
  std::sort(sorted.begin(), sorted.end());
  report.maxDeviation = sorted.back();
  const std::size_t q95 = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(sorted.size())));
  report.quantile95 = sorted[q95 == 0 ? 0 : q95 - 1];
  for (double dev : report.deviations)
    if (dev > report.bound) ++report.violations;

  // Directional spot checks: bump one site's color and require the value to
  // move the declared way, up to eigensolver noise in breakpoint positions.
  Rng rng(mixSeed(params.masterSeed, 0x09d7c4a1de5150b7ULL));
  for (int t = 0; t < params.spotChecks; ++t) {
    const int s = t % params.seeds;
    const Coloring& omega = colorings[static_cast<std::size_t>(s)];
    const GroupElement site =
        box.sites()[static_cast<std::size_t>(rng.below(box.size()))];
    const double current = omega(site);
    double bumped = current + 1.0;
    bool raised = true;
    if (omega.hasColorSet()) {
      const ColorSet& cs = omega.colorSet();
      if (cs.isFinite()) {
        double lo = current, hi = current;
        for (double color : cs.colors()) {
          lo = std::min(lo, color);
          hi = std::max(hi, color);
        }
        if (hi > current) {
          bumped = hi;
        } else {
          bumped = lo;
          raised = false;
        }
      } else {
        if (cs.hi() > current) {
          bumped = 0.5 * (current + cs.hi());
        } else {
          bumped = 0.5 * (current + cs.lo());
          raised = false;
        }
      }
    }
    if (bumped == current) continue;
    Coloring tweaked = Coloring::deterministic(
        omega.group(), [omega, site, bumped](const GroupElement& v) {
          return v == site ? bumped : omega(v);
        });
    StepFunction before = f(box, omega);
    StepFunction after = f(box, tweaked);
    // Antitone and raised (or isotone and lowered): after <= before.
    const bool expectDrop = (f.flags().monotone < 0) == raised;
    const StepFunction& low = expectDrop ? after : before;
    const StepFunction& high = expectDrop ? before : after;
    double span = 1.0;
    for (double brk : high.breakpoints()) span = std::max(span, std::abs(brk));
    ++report.spotChecks;
    if (!stepDominatedWithShift(low, high, 1e-9 * span, 1e-9))
      ++report.spotFailures;
  }

  report.pass = report.violations == 0 && report.spotFailures == 0;
  return report;
}

namespace {

nlohmann::json stepJson(const StepFunction& f) {
  return nlohmann::json{{"breakpoints", f.breakpoints()},
                        {"pieceValues", f.pieceValues()}};
}

}  // namespace

std::string ApproxReport::toJson() const {
  nlohmann::json root;
  root["entries"] = nlohmann::json::array();
  for (const ApproxEntry& e : entries) {
    root["entries"].push_back(nlohmann::json{
        {"j", e.j},
        {"L", e.L},
        {"regionSize", e.regionSize},
        {"windowSize", e.windowSize},
        {"shellRadius", e.shellRadius},
        {"shellFromDiameter", e.shellFromDiameter},
        {"diamZeroConvention", e.diamZeroConvention},
        {"finiteVolume", stepJson(e.finiteVolume)},
        {"patternEstimate", stepJson(e.patternEstimate)},
        {"lhs", e.lhs},
        {"terms", nlohmann::json::array({e.term1, e.term2, e.term3})},
        {"rhs", e.rhs},
        {"pass", e.pass}});
  }
  if (limit) {
    root["limitCheck"] = nlohmann::json{
        {"discrepancy", limit->discrepancy},
        {"boundaryBound", limit->boundaryBound},
        {"cauchyGap", limit->cauchyGap},
        {"withinReported", limit->withinReported}};
  }
  return root.dump(2);
}

void ApproxReport::writeCsv(std::ostream& os) const {
  os << "j,L,lhs,term1,term2,term3,pass\n";
  char buf[64];
  for (const ApproxEntry& e : entries) {
    os << e.j << ',' << e.L;
    for (double x : {e.lhs, e.term1, e.term2, e.term3}) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << ',' << buf;
    }
    os << ',' << (e.pass ? 1 : 0) << '\n';
  }
}

}  // namespace thermolim

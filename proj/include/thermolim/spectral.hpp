#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "thermolim/matrix.hpp"

namespace thermolim {

/// Right-continuous bounded step function on the real line, the value type of
/// the Banach space all limit theorems here are stated in.
///
/// Canonical form: breakpoints E_1 < ... < E_m, piece values v_0, ..., v_m
/// with v_0 on (-inf, E_1) and v_k on [E_k, E_{k+1}); adjacent piece values
/// differ, so equal canonical forms mean equal functions.
class StepFunction {
 public:
  /// The zero function.
  StepFunction() : values_(1, 0.0) {}

  /// Canonicalizes: requires strictly increasing finite breakpoints, finite
  /// values, values.size() == breaks.size() + 1; merges equal-value runs.
  StepFunction(std::vector<double> breaks, std::vector<double> values);

  static StepFunction constant(double c);

  /// Right-continuous evaluation: value on the piece containing e.
  double operator()(double e) const;

  /// Left limit at e: value just below e.
  double leftLimit(double e) const;

  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Piece values; pieceValues()[0] is the value on (-inf, E_1).
  const std::vector<double>& pieceValues() const { return values_; }

  /// Sup of |f| over the line.
  double maxAbs() const;

  bool operator==(const StepFunction&) const = default;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Ascending eigenvalues with multiplicity; length equals the dimension.
using EigenvalueList = std::vector<double>;

/// All eigenvalues of m, ascending, via Householder tridiagonalization with
/// implicit-shift iteration (Sturm bisection on the tridiagonal form above
/// dimension 4096, where counting queries dominate anyway).
EigenvalueList eigenvalues(const SymmetricMatrix& m);

/// E -> #{eigenvalues <= E} as a canonical step function.  The closed-at-E
/// convention makes the jump attained at each eigenvalue.  Eigenvalues closer
/// than 1e-12 * max(1, |spectrum|) merge into one breakpoint with summed
/// multiplicity.
StepFunction countingFunction(const EigenvalueList& eigs);

/// #{eigenvalues <= E} via the inertia of an LDL^T factorization of M - E*I,
/// without forming the spectrum.  E must not be numerically coincident with
/// an eigenvalue: a pivot of magnitude <= 1e-10 * max(1, infNorm) aborts with
/// PivotBreakdownError carrying a suggested shift.
long long inertiaCount(const SymmetricMatrix& m, double e);

/// Exact sup over the line of |f - g|, from the merged piece decomposition.
/// No sampling grid is involved.
double supNorm(const StepFunction& f, const StepFunction& g);

/// Canonical form of a*f + b*g.
StepFunction linearCombine(double a, const StepFunction& f, double b,
                           const StepFunction& g);

/// max over eigenpairs of ||M x - lambda x||_2, for residual spot checks.
double maxEigenpairResidual(const SymmetricMatrix& m);

/// CSV export: a "v0,<value>" header row, then one "breakpoint,value" row per
/// piece.  Values use 17 significant digits and round-trip bit-exactly.
void writeCsv(const StepFunction& f, std::ostream& os);

}  // namespace thermolim

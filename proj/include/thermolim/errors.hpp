#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thermolim {

// Caller broke a precondition (bad arguments, mixed groups, malformed config).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Input is well-formed but exceeds what this build can satisfy.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, long long neededIndex)
      : std::runtime_error(what), neededIndex(neededIndex) {}
  long long neededIndex;
};

// Numerical routine could not complete at the requested point.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// LDL^T hit a pivot below tolerance; carries the retry guidance.
class PivotBreakdownError : public NumericError {
 public:
  PivotBreakdownError(const std::string& what, double shiftHint)
      : NumericError(what), shiftHint(shiftHint) {}
  double shiftHint;
};

// Greedy tiling could not reach a per-shape coverage target.
class PartialTilingError : public std::runtime_error {
 public:
  PartialTilingError(const std::string& what, int shapeIndex,
                     std::vector<double> achievedDensities)
      : std::runtime_error(what),
        shapeIndex(shapeIndex),
        achievedDensities(std::move(achievedDensities)) {}
  int shapeIndex;  // 1-based shape that missed its target
  std::vector<double> achievedDensities;
};

}  // namespace thermolim

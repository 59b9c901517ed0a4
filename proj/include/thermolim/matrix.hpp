#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "thermolim/group.hpp"

namespace thermolim {

/// Real symmetric matrix in sparse coordinate storage.
///
/// Only the upper triangle (row <= col) plus the diagonal is stored; symmetry
/// is structural, not an assembly-time promise.  An optional site list records
/// the bijection between matrix indices and lattice sites, in which case
/// index k corresponds to sites()[k] and the index order is the deterministic
/// SiteSet order.
class SymmetricMatrix {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  explicit SymmetricMatrix(std::size_t n);
  SymmetricMatrix(std::size_t n, std::vector<GroupElement> sites);

  std::size_t dim() const { return n_; }

  /// Accumulates v into entry (r,c).  Indices are symmetrized internally.
  /// Rejects non-finite values and out-of-range indices.
  void add(std::size_t r, std::size_t c, double v);

  /// Overwrites entry (r,c).
  void set(std::size_t r, std::size_t c, double v);

  /// Entry value; zero for entries never written.
  double at(std::size_t r, std::size_t c) const;

  /// Stored upper-triangle entries, keyed (row, col) with row <= col.
  const std::map<Key, double>& upper() const { return entries_; }

  /// Site bijection; empty when the matrix was built without one.
  const std::vector<GroupElement>& sites() const { return sites_; }

  /// max(col - row) over stored entries; 0 for diagonal or empty matrices.
  std::size_t bandwidth() const;

  /// Maximum absolute row sum.
  double infNorm() const;

  /// Row-major dense copy, both triangles filled.
  std::vector<double> dense() const;

 private:
  std::size_t n_;
  std::map<Key, double> entries_;
  std::vector<GroupElement> sites_;
};

/// y = M x.
std::vector<double> multiply(const SymmetricMatrix& m,
                             const std::vector<double>& x);

/// Coordinate-format text: one "row, col, value" line per stored entry in
/// key order, values with 17 significant digits (round-trip exact).
void writeCoordinateText(const SymmetricMatrix& m, std::ostream& os);

}  // namespace thermolim

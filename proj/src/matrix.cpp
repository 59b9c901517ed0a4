#include "thermolim/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "thermolim/errors.hpp"

namespace thermolim {
namespace {

SymmetricMatrix::Key orderedKey(std::size_t r, std::size_t c) {
  return r <= c ? SymmetricMatrix::Key{r, c} : SymmetricMatrix::Key{c, r};
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n) {
  if (n == 0) throw UsageError("SymmetricMatrix: dimension must be positive");
}

SymmetricMatrix::SymmetricMatrix(std::size_t n, std::vector<GroupElement> sites)
    : SymmetricMatrix(n) {
  if (sites.size() != n)
    throw UsageError("SymmetricMatrix: site list size does not match dimension");
  sites_ = std::move(sites);
}

void SymmetricMatrix::add(std::size_t r, std::size_t c, double v) {
  if (r >= n_ || c >= n_)
    throw UsageError("SymmetricMatrix: index out of range");
  if (!std::isfinite(v))
    throw UsageError("SymmetricMatrix: non-finite entry");
  double& slot = entries_[orderedKey(r, c)];
  slot += v;
  if (!std::isfinite(slot))
    throw UsageError("SymmetricMatrix: entry overflowed to non-finite");
}

void SymmetricMatrix::set(std::size_t r, std::size_t c, double v) {
  if (r >= n_ || c >= n_)
    throw UsageError("SymmetricMatrix: index out of range");
  if (!std::isfinite(v))
    throw UsageError("SymmetricMatrix: non-finite entry");
  entries_[orderedKey(r, c)] = v;
}

double SymmetricMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= n_ || c >= n_)
    throw UsageError("SymmetricMatrix: index out of range");
  auto it = entries_.find(orderedKey(r, c));
  return it == entries_.end() ? 0.0 : it->second;
}

std::size_t SymmetricMatrix::bandwidth() const {
  std::size_t bw = 0;
  for (const auto& [key, value] : entries_) {
    (void)value;
    bw = std::max(bw, key.second - key.first);
  }
  return bw;
}

double SymmetricMatrix::infNorm() const {
  std::vector<double> rowSum(n_, 0.0);
  for (const auto& [key, value] : entries_) {
    rowSum[key.first] += std::abs(value);
    if (key.first != key.second) rowSum[key.second] += std::abs(value);
  }
  double norm = 0.0;
  for (double s : rowSum) norm = std::max(norm, s);
  return norm;
}

std::vector<double> SymmetricMatrix::dense() const {
  std::vector<double> a(n_ * n_, 0.0);
  for (const auto& [key, value] : entries_) {
    a[key.first * n_ + key.second] = value;
    a[key.second * n_ + key.first] = value;
  }
  return a;
}

std::vector<double> multiply(const SymmetricMatrix& m,
                             const std::vector<double>& x) {
  if (x.size() != m.dim())
    throw UsageError("multiply: vector length does not match dimension");
  std::vector<double> y(m.dim(), 0.0);
  for (const auto& [key, value] : m.upper()) {
    y[key.first] += value * x[key.second];
    if (key.first != key.second) y[key.second] += value * x[key.first];
  }
  return y;
}

void writeCoordinateText(const SymmetricMatrix& m, std::ostream& os) {
  char buf[64];
  for (const auto& [key, value] : m.upper()) {
    std::snprintf(buf, sizeof buf, "%zu, %zu, %.17g", key.first, key.second,
                  value);
    os << buf << '\n';
  }
}

}  // namespace thermolim

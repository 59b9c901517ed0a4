#include "thermolim/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "thermolim/errors.hpp"

namespace thermolim {

StepFunction::StepFunction(std::vector<double> breaks,
                           std::vector<double> values) {
  if (values.size() != breaks.size() + 1)
    throw UsageError("StepFunction: need exactly one more value than breakpoints");
  for (double e : breaks)
    if (!std::isfinite(e))
      throw UsageError("StepFunction: non-finite breakpoint");
  for (double v : values)
    if (!std::isfinite(v)) throw UsageError("StepFunction: non-finite value");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i] < breaks[i + 1]))
      throw UsageError("StepFunction: breakpoints must be strictly increasing");
  values_.push_back(values[0]);
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (values[i + 1] != values_.back()) {
      breaks_.push_back(breaks[i]);
      values_.push_back(values[i + 1]);
    }
  }
}

StepFunction StepFunction::constant(double c) {
  return StepFunction({}, {c});
}

double StepFunction::operator()(double e) const {
  std::size_t k =
      std::upper_bound(breaks_.begin(), breaks_.end(), e) - breaks_.begin();
  return values_[k];
}

double StepFunction::leftLimit(double e) const {
  std::size_t k =
      std::lower_bound(breaks_.begin(), breaks_.end(), e) - breaks_.begin();
  return values_[k];
}

double StepFunction::maxAbs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

EigenvalueList eigenvalues(const SymmetricMatrix& m) {
  const lapack_int n = static_cast<lapack_int>(m.dim());
  const std::size_t bw = m.bandwidth();
  std::vector<double> w(m.dim());
  if (m.dim() >= 64 && bw + 1 <= m.dim() / 8) {
    // Narrow band: reduce the band directly to tridiagonal form, then run
    // the root-free QL sweep.  Cuts the O(n^3) dense reduction to O(n^2 bw),
    // which is what makes large lattice boxes affordable.
    const lapack_int kd = static_cast<lapack_int>(bw);
    std::vector<double> band((bw + 1) * m.dim(), 0.0);
    for (const auto& [key, value] : m.upper())
      band[key.first * (bw + 1) + (key.second - key.first)] = value;
    std::vector<double> diag(m.dim()), off(m.dim() > 0 ? m.dim() - 1 : 0);
    std::vector<double> work(m.dim());
    double q = 0.0;  // vect='N': never referenced, ldq = 1 is legal
    lapack_int info = LAPACKE_dsbtrd_work(LAPACK_COL_MAJOR, 'N', 'L', n, kd,
                                          band.data(), kd + 1, diag.data(),
                                          off.data(), &q, 1, work.data());
    if (info == 0)
      info = LAPACKE_dsterf(n, diag.data(), off.data());
    if (info != 0) {
      std::ostringstream msg;
      msg << "eigenvalues: banded eigensolve failed with code " << info;
      throw NumericError(msg.str());
    }
    std::sort(diag.begin(), diag.end());
    return diag;
  }
  std::vector<double> a = m.dense();
  lapack_int info;
  if (m.dim() <= 4096) {
    info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
  } else {
    // Above the dense-QL cutoff only eigenvalues are ever wanted; Sturm
    // bisection on the tridiagonal form avoids the accumulation phase.
    lapack_int found = 0;
    std::vector<lapack_int> ifail(m.dim());
    double z = 0.0;
    info = LAPACKE_dsyevx(LAPACK_COL_MAJOR, 'N', 'A', 'U', n, a.data(), n, 0.0,
                          0.0, 0, 0, 2.0 * LAPACKE_dlamch('S'), &found,
                          w.data(), &z, 1, ifail.data());
    if (info == 0 && found != n)
      throw NumericError("eigenvalues: bisection lost eigenvalues");
  }
  if (info != 0) {
    std::ostringstream msg;
    msg << "eigenvalues: LAPACK eigensolve failed with code " << info;
    throw NumericError(msg.str());
  }
  std::sort(w.begin(), w.end());
  return w;
}

StepFunction countingFunction(const EigenvalueList& eigs) {
  for (std::size_t i = 0; i + 1 < eigs.size(); ++i)
    if (eigs[i + 1] < eigs[i])
      throw UsageError("countingFunction: eigenvalues must be ascending");
  if (eigs.empty()) return StepFunction();
  const double scale =
      std::max({1.0, std::abs(eigs.front()), std::abs(eigs.back())});
  const double tol = 1e-12 * scale;
  std::vector<double> breaks;
  std::vector<double> values{0.0};
  std::size_t i = 0;
  while (i < eigs.size()) {
    std::size_t j = i;
    while (j + 1 < eigs.size() && eigs[j + 1] - eigs[i] <= tol) ++j;
    breaks.push_back(eigs[i]);
    values.push_back(static_cast<double>(j + 1));
    i = j + 1;
  }
  return StepFunction(std::move(breaks), std::move(values));
}

long long inertiaCount(const SymmetricMatrix& m, double e) {
  if (!std::isfinite(e)) throw UsageError("inertiaCount: non-finite energy");
  const std::size_t n = m.dim();
  const std::size_t bw = m.bandwidth();
  const double scale = std::max(1.0, m.infNorm() + std::abs(e));
  const double breakdownTol = 1e-10 * scale;

  // Lower band of M - E*I, column-packed: band[j*(bw+1) + r] = A(j+r, j).
  std::vector<double> band((bw + 1) * n, 0.0);
  for (const auto& [key, value] : m.upper())
    band[key.first * (bw + 1) + (key.second - key.first)] = value;
  for (std::size_t j = 0; j < n; ++j) band[j * (bw + 1)] -= e;

  long long negatives = 0;
  std::vector<double> l(bw, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = band[j * (bw + 1)];
    if (std::abs(d) <= breakdownTol) {
      const double hint = 1e-7 * scale;
      std::ostringstream msg;
      msg << "inertiaCount: pivot breakdown at index " << j
          << " (E is numerically an eigenvalue); shift E by at least " << hint
          << " and retry";
      throw PivotBreakdownError(msg.str(), hint);
    }
    if (d < 0.0) ++negatives;
    const std::size_t reach = std::min(bw, n - 1 - j);
    for (std::size_t r = 1; r <= reach; ++r)
      l[r - 1] = band[j * (bw + 1) + r] / d;
    for (std::size_t k = 1; k <= reach; ++k) {
      const double ldk = l[k - 1] * d;
      double* colk = &band[(j + k) * (bw + 1)];
      for (std::size_t r = k; r <= reach; ++r) colk[r - k] -= l[r - 1] * ldk;
    }
  }
  return negatives;
}

double supNorm(const StepFunction& f, const StepFunction& g) {
  const auto& fb = f.breakpoints();
  const auto& gb = g.breakpoints();
  const auto& fv = f.pieceValues();
  const auto& gv = g.pieceValues();
  std::size_t i = 0, j = 0;
  double best = std::abs(fv[0] - gv[0]);
  while (i < fb.size() || j < gb.size()) {
    double e;
    if (j >= gb.size() || (i < fb.size() && fb[i] <= gb[j]))
      e = fb[i];
    else
      e = gb[j];
    if (i < fb.size() && fb[i] == e) ++i;
    if (j < gb.size() && gb[j] == e) ++j;
    best = std::max(best, std::abs(fv[i] - gv[j]));
  }
  return best;
}

StepFunction linearCombine(double a, const StepFunction& f, double b,
                           const StepFunction& g) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw UsageError("linearCombine: non-finite coefficient");
  const auto& fb = f.breakpoints();
  const auto& gb = g.breakpoints();
  const auto& fv = f.pieceValues();
  const auto& gv = g.pieceValues();
  std::vector<double> breaks;
  std::vector<double> values{a * fv[0] + b * gv[0]};
  std::size_t i = 0, j = 0;
  while (i < fb.size() || j < gb.size()) {
    double e;
    if (j >= gb.size() || (i < fb.size() && fb[i] <= gb[j]))
      e = fb[i];
    else
      e = gb[j];
    if (i < fb.size() && fb[i] == e) ++i;
    if (j < gb.size() && gb[j] == e) ++j;
    breaks.push_back(e);
    values.push_back(a * fv[i] + b * gv[j]);
  }
  return StepFunction(std::move(breaks), std::move(values));
}

double maxEigenpairResidual(const SymmetricMatrix& m) {
  const lapack_int n = static_cast<lapack_int>(m.dim());
  std::vector<double> a = m.dense();
  std::vector<double> w(m.dim());
  lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0)
    throw NumericError("maxEigenpairResidual: LAPACK eigensolve failed");
  double worst = 0.0;
  std::vector<double> x(m.dim());
  for (std::size_t k = 0; k < m.dim(); ++k) {
    for (std::size_t r = 0; r < m.dim(); ++r) x[r] = a[k * m.dim() + r];
    std::vector<double> y = multiply(m, x);
    double sq = 0.0;
    for (std::size_t r = 0; r < m.dim(); ++r) {
      const double res = y[r] - w[k] * x[r];
      sq += res * res;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

void writeCsv(const StepFunction& f, std::ostream& os) {
  char num[64];
  std::snprintf(num, sizeof num, "%.17g", f.pieceValues()[0]);
  os << "v0," << num << '\n';
  for (std::size_t k = 0; k < f.breakpoints().size(); ++k) {
    char brk[64];
    std::snprintf(brk, sizeof brk, "%.17g", f.breakpoints()[k]);
    std::snprintf(num, sizeof num, "%.17g", f.pieceValues()[k + 1]);
    os << brk << ',' << num << '\n';
  }
}

}  // namespace thermolim

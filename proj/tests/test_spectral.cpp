#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <lapacke.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "thermolim/errors.hpp"
#include "thermolim/matrix.hpp"
#include "thermolim/rng.hpp"
#include "thermolim/spectral.hpp"

using namespace thermolim;

namespace {

// Clipped one-dimensional Anderson matrix on {0..n-1}: diagonal 2 + pot[i],
// off-diagonal -1 between consecutive sites.
SymmetricMatrix anderson1d(const std::vector<double>& pot) {
  SymmetricMatrix m(pot.size());
  for (std::size_t i = 0; i < pot.size(); ++i) {
    m.set(i, i, 2.0 + pot[i]);
    if (i + 1 < pot.size()) m.set(i, i + 1, -1.0);
  }
  return m;
}

SymmetricMatrix threePathLaplacian() {
  SymmetricMatrix m(3);
  m.set(0, 0, 1.0);
  m.set(1, 1, 2.0);
  m.set(2, 2, 1.0);
  m.set(0, 1, -1.0);
  m.set(1, 2, -1.0);
  return m;
}

SymmetricMatrix randomBand(Rng& rng, std::size_t n, std::size_t bw) {
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 6.0 * rng.uniform() - 2.0);
  for (std::size_t off = 1; off <= bw; ++off)
    for (std::size_t i = 0; i + off < n; ++i)
      if (rng.uniform() < 0.8) m.set(i, i + off, 2.0 * rng.uniform() - 1.0);
  return m;
}

// Integer-valued step function on a quarter-integer grid; exact arithmetic
// keeps canonical-form comparisons meaningful.
StepFunction randomStep(Rng& rng) {
  std::set<double> grid;
  const std::size_t wanted = rng.below(6);
  while (grid.size() < wanted)
    grid.insert((static_cast<double>(rng.below(17)) - 8.0) / 4.0);
  std::vector<double> breaks(grid.begin(), grid.end());
  std::vector<double> values;
  for (std::size_t i = 0; i <= breaks.size(); ++i)
    values.push_back(static_cast<double>(rng.below(7)) - 3.0);
  return StepFunction(breaks, values);
}

double supNormOracle(const StepFunction& f, const StepFunction& g) {
  std::set<double> pts(f.breakpoints().begin(), f.breakpoints().end());
  pts.insert(g.breakpoints().begin(), g.breakpoints().end());
  double lo = pts.empty() ? 0.0 : *pts.begin() - 1.0;
  double best = std::abs(f(lo) - g(lo));
  for (double b : pts) {
    best = std::max(best, std::abs(f(b) - g(b)));
    best = std::max(best, std::abs(f.leftLimit(b) - g.leftLimit(b)));
  }
  return best;
}

}  // namespace

TEST_CASE("step function canonicalizes and validates") {
  StepFunction f({0.0, 1.0, 2.0}, {5.0, 5.0, 7.0, 7.0});
  CHECK(f.breakpoints() == std::vector<double>{1.0});
  CHECK(f.pieceValues() == std::vector<double>{5.0, 7.0});
  CHECK(f == StepFunction({1.0}, {5.0, 7.0}));

  StepFunction zero;
  CHECK(zero.breakpoints().empty());
  CHECK(zero(12.0) == 0.0);
  CHECK(StepFunction::constant(3.5)(-100.0) == 3.5);
  CHECK(StepFunction({0.0}, {1.0, 1.0}) == StepFunction::constant(1.0));

  CHECK_THROWS_AS(StepFunction({1.0, 1.0}, {0.0, 1.0, 2.0}), UsageError);
  CHECK_THROWS_AS(StepFunction({2.0, 1.0}, {0.0, 1.0, 2.0}), UsageError);
  CHECK_THROWS_AS(StepFunction({0.0}, {1.0}), UsageError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(StepFunction({nan}, {0.0, 1.0}), UsageError);
  CHECK_THROWS_AS(StepFunction({0.0}, {nan, 1.0}), UsageError);
}

TEST_CASE("evaluation is right continuous with left limits") {
  StepFunction n = countingFunction({0.0, 1.0, 3.0});
  CHECK(n(-0.5) == 0.0);
  CHECK(n(0.0) == 1.0);  // jump attained at the eigenvalue
  CHECK(n.leftLimit(0.0) == 0.0);
  CHECK(n(0.999) == 1.0);
  CHECK(n(1.0) == 2.0);
  CHECK(n.leftLimit(3.0) == 2.0);
  CHECK(n(3.0) == 3.0);
  CHECK(n(1e9) == 3.0);
}

TEST_CASE("free line clipping has the closed form spectrum") {
  EigenvalueList w = eigenvalues(anderson1d({0.0, 0.0, 0.0}));
  REQUIRE(w.size() == 3);
  const double r2 = std::sqrt(2.0);
  CHECK(w[0] == doctest::Approx(2.0 - r2).epsilon(1e-13));
  CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(w[2] == doctest::Approx(2.0 + r2).epsilon(1e-13));
}

TEST_CASE("diagonal matrix eigenvalues are the sorted diagonal") {
  SymmetricMatrix m(4);
  m.set(0, 0, 3.0);
  m.set(1, 1, -1.0);
  m.set(2, 2, 7.0);
  m.set(3, 3, 0.5);
  EigenvalueList w = eigenvalues(m);
  CHECK(w == std::vector<double>{-1.0, 0.5, 3.0, 7.0});
}

TEST_CASE("three path Laplacian spectrum is 0, 1, 3") {
  EigenvalueList w = eigenvalues(threePathLaplacian());
  REQUIRE(w.size() == 3);
  CHECK(std::abs(w[0]) < 1e-13);
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(w[2] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("banded reduction path matches the dense solver") {
  Rng rng(0xba9d5eedULL);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 64 + rng.below(200);
    const std::size_t bw = 1 + rng.below(4);
    SymmetricMatrix m = randomBand(rng, n, bw);
    EigenvalueList fast = eigenvalues(m);  // narrow band: reduction path

    std::vector<double> a = m.dense();
    std::vector<double> w(n);
    REQUIRE(LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U',
                          static_cast<lapack_int>(n), a.data(),
                          static_cast<lapack_int>(n), w.data()) == 0);
    REQUIRE(fast.size() == w.size());
    const double tol = 1e-10 * (1.0 + m.infNorm());
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - w[k]) <= tol);
  }
}

TEST_CASE("eigenpair residuals stay below the advertised bound") {
  Rng rng(0x5eedULL);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 50 + rng.below(151);
    std::vector<double> pot(n);
    double maxPot = 0.0;
    for (double& p : pot) {
      p = rng.uniform();
      maxPot = std::max(maxPot, std::abs(p));
    }
    CHECK(maxEigenpairResidual(anderson1d(pot)) <= 1e-8 * (4.0 + maxPot));
  }
}

TEST_CASE("counting function jumps by multiplicity and merges clusters") {
  StepFunction n = countingFunction({2.0, 2.0, 2.0});
  CHECK(n.breakpoints() == std::vector<double>{2.0});
  CHECK(n(2.0) == 3.0);
  CHECK(n.leftLimit(2.0) == 0.0);

  StepFunction merged = countingFunction({1.0, 1.0 + 1e-16, 5.0});
  CHECK(merged.breakpoints().size() == 2);
  CHECK(merged(1.0) == 2.0);

  CHECK(countingFunction({})(0.0) == 0.0);
  CHECK_THROWS_AS(countingFunction({1.0, 0.0}), UsageError);

  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    EigenvalueList w;
    const std::size_t n2 = 1 + rng.below(40);
    for (std::size_t i = 0; i < n2; ++i)
      w.push_back(10.0 * rng.uniform() - 5.0);
    std::sort(w.begin(), w.end());
    StepFunction cf = countingFunction(w);
    const auto& vals = cf.pieceValues();
    CHECK(vals.front() == 0.0);
    CHECK(vals.back() == static_cast<double>(n2));
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) CHECK(vals[i] < vals[i + 1]);
  }
}

TEST_CASE("inertia count agrees with the full eigensolve") {
  SymmetricMatrix path = threePathLaplacian();
  CHECK(inertiaCount(path, 0.5) == 1);
  CHECK(inertiaCount(path, -10.0) == 0);  // below the Gershgorin range
  CHECK(inertiaCount(path, 10.0) == 3);

  // E exactly on an eigenvalue: detected, with actionable retry guidance.
  try {
    (void)inertiaCount(path, 1.0);
    FAIL("expected pivot breakdown");
  } catch (const PivotBreakdownError& err) {
    CHECK(err.shiftHint > 0.0);
    CHECK(inertiaCount(path, 1.0 + err.shiftHint) == 2);
    CHECK(inertiaCount(path, 1.0 - err.shiftHint) == 1);
  }

  Rng rng(0xabcdefULL);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 5 + rng.below(396);
    SymmetricMatrix m = randomBand(rng, n, 1 + rng.below(4));
    EigenvalueList w = eigenvalues(m);
    std::vector<double> cands{w.front() - 1.5, w.back() + 1.5};
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
      if (w[k + 1] - w[k] > 1e-6) cands.push_back(0.5 * (w[k] + w[k + 1]));
    const double e = cands[rng.below(cands.size())];
    long long expect = 0;
    for (double lam : w)
      if (lam <= e) ++expect;
    CHECK(inertiaCount(m, e) == expect);
    CHECK(countingFunction(w)(e) == static_cast<double>(expect));
    ++checked;
  }
}

TEST_CASE("sup norm is exact, not grid sampled") {
  StepFunction stepAt0({0.0}, {0.0, 1.0});
  StepFunction stepAt1({1.0}, {0.0, 1.0});
  CHECK(supNorm(stepAt0, stepAt0) == 0.0);
  CHECK(supNorm(stepAt0, stepAt1) == 1.0);  // they differ exactly on [0, 1)

  // Volume-scaled counting functions of nested boxes: the merged-piece sup
  // must dominate any dense grid evaluation.
  StepFunction f = linearCombine(1.0 / 8, countingFunction(eigenvalues(
                                              anderson1d(std::vector<double>(8, 0.0)))),
                                 0.0, StepFunction());
  StepFunction g = linearCombine(1.0 / 16, countingFunction(eigenvalues(
                                               anderson1d(std::vector<double>(16, 0.0)))),
                                 0.0, StepFunction());
  const double exact = supNorm(f, g);
  CHECK(exact > 0.0);
  double gridMax = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double e = -0.5 + 5.0 * i / 1000000.0;
    gridMax = std::max(gridMax, std::abs(f(e) - g(e)));
  }
  CHECK(exact >= gridMax);
  CHECK(exact == supNormOracle(f, g));
}

TEST_CASE("sup norm has the norm properties") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    StepFunction f = randomStep(rng);
    StepFunction g = randomStep(rng);
    StepFunction h = randomStep(rng);
    CHECK(supNorm(f, g) == supNorm(g, f));
    CHECK(supNorm(f, h) <= supNorm(f, g) + supNorm(g, h) + 1e-12);
    CHECK((supNorm(f, g) == 0.0) == (f == g));
    CHECK(supNorm(f, g) == supNormOracle(f, g));
  }
}

TEST_CASE("linear combinations return canonical forms") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    StepFunction f = randomStep(rng);
    StepFunction g = randomStep(rng);
    CHECK(linearCombine(1.0, f, -1.0, f) == StepFunction());
    StepFunction sum = linearCombine(1.0, f, 1.0, g);
    CHECK(linearCombine(1.0, sum, -1.0, g) == f);  // integer values: exact
  }

  StepFunction n = countingFunction(eigenvalues(anderson1d({0.3, 0.9, 0.1, 0.7})));
  StepFunction scaled = linearCombine(0.25, n, 0.0, StepFunction());
  for (double v : scaled.pieceValues()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("step function csv export is bit exact") {
  std::ostringstream os;
  writeCsv(countingFunction({0.0, 1.0, 3.0}), os);
  CHECK(os.str() == "v0,0\n0,1\n1,2\n3,3\n");

  std::ostringstream os2;
  writeCsv(StepFunction({0.1}, {0.0, 1.0 / 3.0}), os2);
  CHECK(os2.str() == "v0,0\n0.10000000000000001,0.33333333333333331\n");
  // round trip: parsing the printed decimals recovers the exact doubles
  CHECK(std::stod("0.10000000000000001") == 0.1);
  CHECK(std::stod("0.33333333333333331") == 1.0 / 3.0);
}

TEST_CASE("symmetric matrix storage") {
  SymmetricMatrix m(3);
  m.set(2, 0, 5.0);  // symmetrized to (0,2)
  CHECK(m.at(0, 2) == 5.0);
  CHECK(m.at(2, 0) == 5.0);
  m.add(0, 2, 1.0);
  CHECK(m.at(2, 0) == 6.0);
  CHECK(m.at(1, 1) == 0.0);
  CHECK(m.bandwidth() == 2);

  CHECK_THROWS_AS(SymmetricMatrix(0), UsageError);
  CHECK_THROWS_AS(m.set(3, 0, 1.0), UsageError);
  CHECK_THROWS_AS(m.set(0, 0, std::nan("")), UsageError);

  SymmetricMatrix tri = anderson1d({0.0, 0.0});
  CHECK(tri.infNorm() == 3.0);
  std::vector<double> y = multiply(tri, {1.0, 2.0});
  CHECK(y == std::vector<double>{0.0, 3.0});

  std::ostringstream os;
  writeCoordinateText(tri, os);
  CHECK(os.str() == "0, 0, 2\n0, 1, -1\n1, 1, 2\n");

  Group z1 = Group::lattice(1);
  CHECK_THROWS_AS(SymmetricMatrix(3, {z1.identity()}), UsageError);
  SymmetricMatrix withSites(1, {z1.identity()});
  CHECK(withSites.sites().size() == 1);
}

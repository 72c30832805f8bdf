#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "amnl/rng.hpp"
#include "doctest.h"

using namespace amnl;

TEST_SUITE("rng") {

TEST_CASE("identical seeds give identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next() == b.next());
    CHECK(a.uniform() == b.uniform());
    CHECK(a.gaussian() == b.gaussian());
  }
  Rng c(124);
  bool all_equal = true;
  Rng a2(123);
  for (int i = 0; i < 64; ++i) all_equal = all_equal && (a2.next() == c.next());
  CHECK(!all_equal);
}

TEST_CASE("below stays in range and covers it") {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    std::uint64_t v = rng.below(7);
    REQUIRE(v < 7);
    hits[v]++;
  }
  // Every bucket of a fair die shows up; 3-sigma band around 1000.
  for (int h : hits) CHECK(std::fabs(h - 1000.0) < 3.0 * std::sqrt(1000.0 * 6.0 / 7.0));
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("uniform lives in the half-open unit interval") {
  Rng rng(9);
  double lo = 1.0, hi = 0.0, mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u;
  }
  mean /= n;
  CHECK(std::fabs(mean - 0.5) < 0.01);
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
  double v = rng.uniform(-3.0, 5.0);
  CHECK(v >= -3.0);
  CHECK(v < 5.0);
}

TEST_CASE("gaussian has the requested moments") {
  Rng rng(17);
  const int n = 50000;
  double mean = 0.0, var = 0.0;
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.gaussian(2.0, 3.0);
  for (double x : xs) mean += x;
  mean /= n;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1;
  CHECK(std::fabs(mean - 2.0) < 3.0 * 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 9.0) < 0.3);
}

TEST_CASE("poisson matches its mean and rejects nonpositive means") {
  Rng rng(21);
  const int n = 20000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += static_cast<double>(rng.poisson(6.2));
  mean /= n;
  CHECK(std::fabs(mean - 6.2) < 3.0 * std::sqrt(6.2 / n));
  CHECK_THROWS_AS(rng.poisson(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.poisson(-1.0), std::invalid_argument);
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng(33);
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  std::vector<int> orig = v;
  rng.shuffle(v);
  CHECK(v != orig);  // 1/100! chance of a false alarm
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == orig);
}

TEST_CASE("sample_without_replacement returns distinct values in range") {
  Rng rng(41);
  auto s = rng.sample_without_replacement(50, 20);
  REQUIRE(s.size() == 20);
  std::set<std::uint64_t> seen(s.begin(), s.end());
  CHECK(seen.size() == 20);
  for (std::uint64_t v : s) CHECK(v < 50);
  auto all = rng.sample_without_replacement(5, 5);
  std::set<std::uint64_t> every(all.begin(), all.end());
  CHECK(every.size() == 5);
  CHECK_THROWS_AS(rng.sample_without_replacement(3, 4), std::invalid_argument);
}

TEST_CASE("gumbel samples are finite with the right location") {
  Rng rng(55);
  const int n = 20000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gumbel();
    REQUIRE(std::isfinite(g));
    mean += g;
  }
  mean /= n;
  // Standard Gumbel mean is the Euler-Mascheroni constant.
  CHECK(std::fabs(mean - 0.5772156649) < 0.03);
}

}  // TEST_SUITE

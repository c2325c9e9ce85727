#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "disinr/rng.hpp"
#include "disinr/threading.hpp"

using namespace disinr;

TEST_CASE("same seed reproduces the stream, different seeds diverge") {
  Rng a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in range and is not degenerate") {
  Rng rng(9);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.1);
  CHECK(hi > 0.9);

  for (int i = 0; i < 100; ++i) {
    double u = rng.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
  }
}

TEST_CASE("gaussian has roughly standard moments") {
  Rng rng(77);
  const int n = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("next_below is bounded and covers small ranges") {
  Rng rng(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i) {
    auto v = rng.next_below(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("sub_seed separates labeled streams deterministically") {
  auto s1 = sub_seed(42, "phantom");
  auto s2 = sub_seed(42, "phantom");
  auto s3 = sub_seed(42, "mask");
  auto s4 = sub_seed(43, "phantom");
  CHECK(s1 == s2);
  CHECK(s1 != s3);
  CHECK(s1 != s4);
}

TEST_CASE("parallel_for visits every index exactly once") {
  const std::int64_t n = 4099;
  std::vector<int> hits(n, 0);
  parallel_for(n, 64, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) hits[static_cast<std::size_t>(i)] += 1;
  });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("parallel_for handles empty and tiny ranges") {
  int calls = 0;
  parallel_for(0, 16, [&](std::int64_t, std::int64_t) { ++calls; });
  CHECK(calls == 0);
  std::vector<int> hits(3, 0);
  parallel_for(3, 16, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) hits[static_cast<std::size_t>(i)] += 1;
  });
  CHECK(hits == std::vector<int>{1, 1, 1});
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "unigo/rng.hpp"

using namespace unigo;

TEST_CASE("identical seeds give identical sequences") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams differ per tag") {
  SplitMix64 a = derive_stream(7, {1});
  SplitMix64 b = derive_stream(7, {2});
  SplitMix64 c = derive_stream(7, {1, 1});
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t av = a.next_u64();
    if (av == b.next_u64()) ++equal_ab;
    if (av == c.next_u64()) ++equal_ac;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("next_double stays in [0,1)") {
  SplitMix64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("below is bounded and roughly uniform") {
  SplitMix64 rng(5);
  std::vector<int> buckets(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = rng.below(10);
    REQUIRE(v < 10);
    ++buckets[v];
  }
  for (int b : buckets) {
    CHECK(b > draws / 10 - 600);
    CHECK(b < draws / 10 + 600);
  }
}

TEST_CASE("gaussian moments") {
  SplitMix64 rng(11);
  const int draws = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = rng.gaussian(2.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 4.0) < 0.05);
}

TEST_CASE("uniform respects the interval") {
  SplitMix64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(0.2, 0.4);
    CHECK(v >= 0.2);
    CHECK(v < 0.4);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "cloudseg/rng.hpp"

using cloudseg::Rng;

TEST_CASE("raw engine output matches the mt19937_64 reference value") {
  // 10000th output for seed 5489 is pinned by the C++ standard.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  CHECK(v == 9981545732273789042ull);
}

TEST_CASE("same seed gives the same stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
  Rng a(1), b(2);
  bool differs = false;
  for (int i = 0; i < 10 && !differs; ++i) differs = a.next_u64() != b.next_u64();
  CHECK(differs);
}

TEST_CASE("uniform01 lies in [0, 1)") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform01();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("uniform respects its bounds") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-2.5, 3.5);
    CHECK(v >= -2.5);
    CHECK(v <= 3.5);
  }
}

TEST_CASE("below stays under the bound and covers small ranges") {
  Rng rng(11);
  bool seen[5] = {};
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.below(5);
    CHECK(v < 5);
    seen[v] = true;
  }
  for (bool s : seen) CHECK(s);
}

TEST_CASE("below rejects zero") {
  Rng rng(1);
  CHECK_THROWS_AS(rng.below(0), cloudseg::DomainError);
}

TEST_CASE("coin is roughly balanced") {
  Rng rng(13);
  int heads = 0;
  for (int i = 0; i < 10000; ++i) heads += rng.coin() ? 1 : 0;
  CHECK(heads > 4600);
  CHECK(heads < 5400);
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng(17);
  std::vector<int> items(50);
  std::iota(items.begin(), items.end(), 0);
  const std::vector<int> original = items;
  rng.shuffle(items);
  CHECK(items != original);
  std::vector<int> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == original);
}

TEST_CASE("shuffle of the same seed is identical") {
  std::vector<int> a(20), b(20);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Rng ra(21), rb(21);
  ra.shuffle(a);
  rb.shuffle(b);
  CHECK(a == b);
}

TEST_CASE("state round trip continues the same stream") {
  Rng rng(31);
  for (int i = 0; i < 5; ++i) rng.next_u64();
  const std::string state = rng.save_state();
  std::vector<std::uint64_t> expect;
  for (int i = 0; i < 10; ++i) expect.push_back(rng.next_u64());

  Rng other(999);
  other.restore_state(state);
  for (std::uint64_t e : expect) CHECK(other.next_u64() == e);
}

TEST_CASE("restore_state rejects garbage") {
  Rng rng(1);
  CHECK_THROWS_AS(rng.restore_state("not a state"), cloudseg::FormatError);
}

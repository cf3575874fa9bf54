#include <doctest.h>

#include <cmath>
#include <sstream>

#include "thinsets/sampling.hpp"

using namespace thinsets;

TEST_SUITE("sampling") {
  TEST_CASE("constant schedules give certainty sets") {
    const auto ones = sample_set(SelectorSchedule::constant(1.0), 16, 20, 7);
    CHECK(ones.elements == std::vector<std::int64_t>{16, 17, 18, 19, 20});
    const auto none = sample_set(SelectorSchedule::constant(0.0), 16, 20, 7);
    CHECK(none.elements.empty());
  }

  TEST_CASE("samples replay bit-identically") {
    const auto s = SelectorSchedule::dyadic(1.0);
    const auto a = sample_set(s, 16, 4096, 42);
    const auto b = sample_set(s, 16, 4096, 42);
    CHECK(a.elements == b.elements);
    const auto c = sample_set(s, 16, 4096, 43);
    CHECK(a.elements != c.elements);
  }

  TEST_CASE("fixed-seed block occupancy stays in the Chernoff window") {
    // campaign-selected seed; the window [0.4n, 2.5n] must hold on >= 90% of
    // blocks n = 4..13
    const auto s = SelectorSchedule::dyadic(1.0);
    const auto sample = sample_set(s, 16, (std::int64_t{1} << 14) - 1, 3);
    const auto counts = block_counts(sample, BlockGeometry::dyadic(4, 13));
    int ok = 0;
    for (const auto& [n, cnt] : counts) {
      const double c = static_cast<double>(cnt);
      if (c >= 0.4 * n && c <= 2.5 * n) ++ok;
    }
    CHECK(ok >= 9);
  }

  TEST_CASE("mean consistency across seeds") {
    const auto s = SelectorSchedule::dyadic(1.0);
    const int T = 200;
    const std::int64_t lo = 16, hi = 2047;
    const double expect = expected_count(s, lo, hi).value;
    double acc = 0.0;
    for (int t = 0; t < T; ++t)
      acc += static_cast<double>(sample_set(s, lo, hi, 1000 + t).elements.size());
    const double emp = acc / T;
    const double slack = 4.0 * std::sqrt(expect * (1.0 + 1.0 / T)) / std::sqrt(T);
    CHECK(std::abs(emp - expect) <= slack);
  }

  TEST_CASE("thinning with the same schedule keeps everything") {
    const auto s = SelectorSchedule::dyadic(1.0);
    const auto sample = sample_set(s, 16, 2048, 5);
    const auto kept = thin(sample, s, 99);
    CHECK(kept.elements == sample.elements);
  }

  TEST_CASE("thinning the empty set yields the empty set") {
    const auto s0 = SelectorSchedule::constant(0.0, 16);
    const auto sample = sample_set(s0, 16, 100, 5);
    const auto kept = thin(sample, s0, 6);
    CHECK(kept.elements.empty());
  }

  TEST_CASE("thinning never adds elements") {
    const auto src = SelectorSchedule::dyadic(1.0);
    const auto dst = SelectorSchedule::dyadic(0.3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto sample = sample_set(src, 16, 4096, seed);
      const auto kept = thin(sample, dst, seed + 1);
      CHECK(std::includes(sample.elements.begin(), sample.elements.end(),
                          kept.elements.begin(), kept.elements.end()));
    }
  }

  TEST_CASE("thinning to a larger mean is a precondition violation") {
    const auto src = SelectorSchedule::dyadic(0.5);
    const auto dst = SelectorSchedule::dyadic(1.0);
    const auto sample = sample_set(src, 16, 64, 5);
    CHECK_THROWS_AS(thin(sample, dst, 6), std::invalid_argument);
  }

  TEST_CASE("halving the dyadic scale retains half the elements on average") {
    // binomial oracle: retention probability is exactly 1/2 per element
    const auto src = SelectorSchedule::dyadic(1.0);
    const auto dst = SelectorSchedule::dyadic(0.5);
    std::int64_t total = 0, kept_total = 0;
    for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
      const auto sample = sample_set(src, 16, (std::int64_t{1} << 12) - 1, seed);
      const auto kept = thin(sample, dst, seed * 31 + 1);
      total += static_cast<std::int64_t>(sample.elements.size());
      kept_total += static_cast<std::int64_t>(kept.elements.size());
    }
    const double p = static_cast<double>(kept_total) / static_cast<double>(total);
    const double se = std::sqrt(0.25 / static_cast<double>(total));
    CHECK(std::abs(p - 0.5) <= 3.0 * se);
  }

  TEST_CASE("block_counts on a known set") {
    RandomSetSample s;
    s.schedule = SelectorSchedule::dyadic(1.0);
    s.k_lo = 16;
    s.k_hi = 63;
    s.elements = {16, 17, 32};
    const auto counts = block_counts(s, BlockGeometry::dyadic(4, 5));
    REQUIRE(counts.size() == 2);
    CHECK(counts[0] == std::pair<int, std::int64_t>{4, 2});
    CHECK(counts[1] == std::pair<int, std::int64_t>{5, 1});
  }

  TEST_CASE("block_counts rejects uncovered blocks") {
    RandomSetSample s;
    s.k_lo = 16;
    s.k_hi = 63;
    CHECK_THROWS_WITH_AS(static_cast<void>(block_counts(s, BlockGeometry::dyadic(4, 6))),
                         doctest::Contains("6"), std::invalid_argument);
  }

  TEST_CASE("block counts partition the covered range") {
    const auto s = SelectorSchedule::dyadic(1.2);
    const auto sample = sample_set(s, 16, (std::int64_t{1} << 12) - 1, 11);
    const auto counts = block_counts(sample, BlockGeometry::dyadic(4, 11));
    std::int64_t sum = 0;
    for (const auto& [n, c] : counts) sum += c;
    CHECK(sum == static_cast<std::int64_t>(sample.elements.size()));
  }

  TEST_CASE("power block geometry guards 64-bit overflow") {
    CHECK(BlockGeometry::power_bound(3, 1.5) == 140);
    CHECK_THROWS_AS(BlockGeometry::power_bound(40, 1.5), std::overflow_error);
  }

  TEST_CASE("set files round trip") {
    const auto s = SelectorSchedule::dyadic(1.0);
    const auto sample = sample_set(s, 16, 512, 21);
    std::stringstream ss;
    write_set(ss, sample);
    const auto back = read_set(ss);
    CHECK(back.elements == sample.elements);
    CHECK(back.seed == sample.seed);
    CHECK(back.k_lo == sample.k_lo);
    CHECK(back.k_hi == sample.k_hi);
    CHECK(back.schedule.kind == sample.schedule.kind);
  }
}

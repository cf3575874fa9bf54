#include <doctest.h>

#include <cmath>

#include "thinsets/sampling.hpp"
#include "thinsets/schedule.hpp"

using namespace thinsets;

TEST_SUITE("schedule") {
  TEST_CASE("dyadic mean is block constant") {
    const auto s = SelectorSchedule::dyadic(1.0);
    CHECK(mean_at(s, 16) == doctest::Approx(0.25).epsilon(1e-15));  // 4/16
    CHECK(mean_at(s, 17) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mean_at(s, 31) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mean_at(s, 32) == doctest::Approx(5.0 / 32.0).epsilon(1e-15));
  }

  TEST_CASE("rider mean matches an independent long-double evaluation") {
    const auto s = SelectorSchedule::rider(1.0, 2.0);
    // independent arbitrary-precision-style evaluation at k = 100
    const long double lk = logl(100.0L);
    const long double llk = logl(lk);
    const long double expected = lk * lk / (100.0L * llk * llk * llk);
    CHECK(mean_at(s, 100) ==
          doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  }

  TEST_CASE("means clamp to 1") {
    const auto s = SelectorSchedule::dyadic(100.0);
    CHECK(mean_at(s, 16) == 1.0);
  }

  TEST_CASE("k below k_min is a domain error") {
    const auto s = SelectorSchedule::dyadic(1.0);
    CHECK_THROWS_AS(mean_at(s, 15), std::domain_error);
    const auto r = SelectorSchedule::rider(1.0, 1.2);
    CHECK_THROWS_AS(mean_at(r, 2), std::domain_error);
  }

  TEST_CASE("custom schedule is a step function") {
    const auto s = SelectorSchedule::custom({{16, 0.5}, {32, 0.25}}, 16);
    CHECK(mean_at(s, 16) == 0.5);
    CHECK(mean_at(s, 31) == 0.5);
    CHECK(mean_at(s, 32) == 0.25);
    CHECK(mean_at(s, 1000) == 0.25);
  }

  TEST_CASE("constant schedule accepts the degenerate endpoints") {
    CHECK(mean_at(SelectorSchedule::constant(0.0), 5) == 0.0);
    CHECK(mean_at(SelectorSchedule::constant(1.0), 5) == 1.0);
    CHECK_THROWS_AS(SelectorSchedule::constant(1.5), std::invalid_argument);
  }

  TEST_CASE("expected_count over a dyadic block is exactly c*n") {
    const auto s = SelectorSchedule::dyadic(1.0);
    for (int n = 4; n <= 20; ++n) {
      const std::int64_t lo = std::int64_t{1} << n;
      const auto est = expected_count(s, lo, 2 * lo - 1);
      CHECK(est.method == CountMethod::exact_sum);
      CHECK(est.value == doctest::Approx(static_cast<double>(n)).epsilon(1e-14));
    }
  }

  TEST_CASE("expected_count of an empty interval is zero") {
    const auto s = SelectorSchedule::rider(1.0, 1.2);
    CHECK(expected_count(s, 100, 99).value == 0.0);
  }

  TEST_CASE("rider quadrature path agrees with exact summation within 2%") {
    const auto s = SelectorSchedule::rider(1.0, 1.2);
    for (int n = 3; n <= 6; ++n) {
      const std::int64_t b = BlockGeometry::power_bound(n, 1.5);
      if (b <= 16 || b - 16 + 1 > kExactCountLimit) continue;  // both paths must be feasible
      const auto exact = expected_count(s, 16, b);
      REQUIRE(exact.method == CountMethod::exact_sum);
      const double integral = detail::simpson_logvar(16.0 - 0.5, static_cast<double>(b) + 0.5,
                                                     s.c, s.alpha, 4096);
      CHECK(integral == doctest::Approx(exact.value).epsilon(0.02));
    }
  }

  TEST_CASE("expected_count switches to quadrature beyond the term limit") {
    const auto s = SelectorSchedule::rider(1.0, 1.2);
    const auto est = expected_count(s, 16, 200'000'000);
    CHECK(est.method == CountMethod::simpson_log);
    CHECK(est.value > 0.0);
  }

  TEST_CASE("sigma_prefix accumulates from k_min") {
    const auto s = SelectorSchedule::dyadic(1.0);
    CHECK(sigma_prefix(s, 15) == 0.0);
    CHECK(sigma_prefix(s, 31) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(sigma_prefix(s, 63) == doctest::Approx(9.0).epsilon(1e-14));
  }

  TEST_CASE("schedule JSON round trip") {
    const auto s = SelectorSchedule::rider(0.7, 1.4, 32);
    const auto back = SelectorSchedule::from_json(s.to_json());
    CHECK(back.kind == ScheduleKind::rider);
    CHECK(back.c == s.c);
    CHECK(back.alpha == s.alpha);
    CHECK(back.k_min == s.k_min);
    const auto t = SelectorSchedule::custom({{4, 0.5}, {9, 0.125}}, 2);
    const auto tback = SelectorSchedule::from_json(t.to_json());
    CHECK(tback.table == t.table);
  }
}

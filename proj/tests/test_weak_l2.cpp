#include <doctest.h>

#include <cmath>

#include "thinsets/weak_l2.hpp"

using namespace thinsets;

namespace {
std::vector<std::int64_t> block(int n) {
  std::vector<std::int64_t> a;
  for (std::int64_t k = std::int64_t{1} << n; k < std::int64_t{1} << (n + 1); ++k)
    a.push_back(k);
  return a;
}
}  // namespace

TEST_SUITE("weak_l2") {
  TEST_CASE("coordinate closed forms") {
    const auto id2 = BanachFrame::coordinate({{1, 0}, {0, 1}});
    CHECK(weak_l2_norm(id2).value == doctest::Approx(1.0).epsilon(1e-14));
    const auto hadamard = BanachFrame::coordinate({{1, 1}, {1, -1}});
    CHECK(weak_l2_norm(hadamard).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    const auto single = BanachFrame::coordinate({{3.0, -4.0}});
    CHECK(weak_l2_norm(single).value == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("exponential singleton is closed form") {
    const auto f = BanachFrame::exponential({7});
    const auto est = weak_l2_norm(f);
    CHECK(est.method == NormMethod::closed_form);
    CHECK(est.value == doctest::Approx(1.2011224087864498).epsilon(1e-12));
  }

  TEST_CASE("ascent bracket is ordered and beats the flat witness") {
    const auto a = block(6);  // |A| = 64
    const auto frame = BanachFrame::exponential(a);
    WeakL2Options opt;
    opt.restarts = 8;
    const auto est = weak_l2_norm(frame, opt);
    CHECK(est.lower <= est.upper);
    // sigma >= ||(1/sqrt n) sum e_k||_{Psi_2}, the flat coefficient witness
    const double flat = psi_A(a).value / std::sqrt(64.0);
    CHECK(est.value >= flat - 1e-6);
  }

  TEST_CASE("envelope constant stays in a bounded band across block sizes") {
    double lo = 1e300, hi = 0.0;
    for (int n : {4, 6, 8}) {
      const auto frame = BanachFrame::exponential(block(n));
      WeakL2Options opt;
      opt.restarts = 6;
      opt.max_iterations = 40;
      const auto est = weak_l2_norm(frame, opt);
      const double sz = static_cast<double>(std::int64_t{1} << n);
      const double c0 = est.value * std::sqrt(std::log(sz) / sz);
      lo = std::min(lo, c0);
      hi = std::max(hi, c0);
    }
    CHECK(lo >= 0.2);
    CHECK(hi <= 5.0);
    CHECK(hi / lo <= 5.0);
  }

  TEST_CASE("strong l2 norm of frames") {
    const auto f = BanachFrame::coordinate({{1, 0}, {0, 1}, {0.5, 0.5}});
    CHECK(f.strong_l2() == doctest::Approx(std::sqrt(2.25)).epsilon(1e-14));
    const auto g = BanachFrame::exponential({1, 2, 3, 4});
    CHECK(g.strong_l2() ==
          doctest::Approx(2.0 * 1.2011224087864498).epsilon(1e-12));
  }
}

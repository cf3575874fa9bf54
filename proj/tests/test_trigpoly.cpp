#include <doctest.h>

#include <complex>
#include <vector>

#include "thinsets/rng.hpp"
#include "thinsets/trigpoly.hpp"

using namespace thinsets;

namespace {

// independent oracle: plain direct summation, no library evaluation path
std::vector<std::complex<double>> direct_grid(const TrigPolynomial& f, std::size_t L) {
  std::vector<std::complex<double>> out(L);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (std::size_t j = 0; j < L; ++j) {
    const double x = two_pi * static_cast<double>(j) / static_cast<double>(L);
    std::complex<double> acc(0.0, 0.0);
    for (const auto& [k, c] : f.coeffs())
      acc += c * std::complex<double>(std::cos(k * x), std::sin(k * x));
    out[j] = acc;
  }
  return out;
}

TrigPolynomial random_poly(std::int64_t degree, std::uint64_t seed) {
  TrigPolynomial f;
  CounterRng rng = CounterRng::keyed(seed, 1);
  for (std::int64_t k = -degree; k <= degree; ++k)
    if (rng.next_uniform() < 0.5) f.set(k, {rng.next_gaussian(), rng.next_gaussian()});
  return f;
}

}  // namespace

TEST_SUITE("trigpoly") {
  TEST_CASE("constant on a 4-point grid") {
    const auto f = TrigPolynomial::constant(1.0);
    const auto v = f.evaluate_grid(4);
    for (const auto& z : v) CHECK(std::abs(z - 1.0) < 1e-15);
  }

  TEST_CASE("e_1 hits the fourth roots of unity") {
    const auto f = TrigPolynomial::character(1);
    const auto v = f.evaluate_grid(4);
    CHECK(std::abs(v[0] - std::complex<double>(1, 0)) < 1e-12);
    CHECK(std::abs(v[1] - std::complex<double>(0, 1)) < 1e-12);
    CHECK(std::abs(v[2] - std::complex<double>(-1, 0)) < 1e-12);
    CHECK(std::abs(v[3] - std::complex<double>(0, -1)) < 1e-12);
  }

  TEST_CASE("FFT and direct paths agree to 1e-10 * |coeffs|_1") {
    const auto f = random_poly(64, 99);
    const double tol = 1e-10 * f.coeff_l1();
    const auto fast = f.evaluate_grid(512);  // power of two >= 4*(deg+1): FFT path
    const auto slow = direct_grid(f, 512);
    double worst = 0.0;
    for (std::size_t j = 0; j < fast.size(); ++j)
      worst = std::max(worst, std::abs(fast[j] - slow[j]));
    CHECK(worst < tol);
  }

  TEST_CASE("non-power-of-two grids use direct summation and still match") {
    const auto f = random_poly(16, 7);
    const auto got = f.evaluate_grid(100);
    const auto want = direct_grid(f, 100);
    for (std::size_t j = 0; j < got.size(); ++j) CHECK(std::abs(got[j] - want[j]) < 1e-10);
  }

  TEST_CASE("partial sums restrict, project, and saturate") {
    const auto f = random_poly(20, 3);
    CHECK(f.partial_sum(25).coeffs() == f.coeffs());
    const auto s0 = f.partial_sum(0);
    CHECK(s0.term_count() <= 1);
    CHECK(s0.coeff(0) == f.coeff(0));
    const auto s5 = f.partial_sum(5);
    CHECK(s5.partial_sum(5).coeffs() == s5.coeffs());  // idempotent
    for (const auto& [k, c] : s5.coeffs()) CHECK(std::llabs(k) <= 5);
  }

  TEST_CASE("zero coefficients are never stored") {
    TrigPolynomial f;
    f.set(3, 1.0);
    f.add(3, -1.0);
    CHECK(f.empty());
    CHECK(f.degree() == 0);
  }

  TEST_CASE("JSON round trip") {
    const auto f = random_poly(12, 17);
    const auto back = TrigPolynomial::from_json(f.to_json());
    CHECK(back.coeffs() == f.coeffs());
  }
}

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "thinsets/fft.hpp"

namespace thinsets {

/// Sparse trigonometric polynomial f(x) = sum_k fhat(k) e^{ikx} on the circle
/// with normalized Haar measure. Frequencies may be negative; zero
/// coefficients are never stored.
class TrigPolynomial {
 public:
  using CoeffMap = std::map<std::int64_t, std::complex<double>>;

  TrigPolynomial() = default;

  static TrigPolynomial constant(std::complex<double> c) {
    TrigPolynomial p;
    p.set(0, c);
    return p;
  }

  static TrigPolynomial character(std::int64_t k, std::complex<double> c = 1.0) {
    TrigPolynomial p;
    p.set(k, c);
    return p;
  }

  /// Indicator exponential sum sum_{k in A} e_k.
  static TrigPolynomial indicator(std::span<const std::int64_t> frequencies) {
    TrigPolynomial p;
    for (std::int64_t k : frequencies) p.set(k, 1.0);
    return p;
  }

  void set(std::int64_t freq, std::complex<double> coeff) {
    if (coeff == std::complex<double>(0.0, 0.0))
      coeffs_.erase(freq);
    else
      coeffs_[freq] = coeff;
  }

  void add(std::int64_t freq, std::complex<double> coeff) {
    auto it = coeffs_.find(freq);
    if (it == coeffs_.end()) {
      set(freq, coeff);
    } else {
      it->second += coeff;
      if (it->second == std::complex<double>(0.0, 0.0)) coeffs_.erase(it);
    }
  }

  std::complex<double> coeff(std::int64_t freq) const {
    auto it = coeffs_.find(freq);
    return it == coeffs_.end() ? std::complex<double>(0.0, 0.0) : it->second;
  }

  const CoeffMap& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t term_count() const { return coeffs_.size(); }

  /// Max |frequency| carrying a nonzero coefficient; 0 for the zero polynomial.
  std::int64_t degree() const {
    if (coeffs_.empty()) return 0;
    const std::int64_t lo = std::llabs(coeffs_.begin()->first);
    const std::int64_t hi = std::llabs(coeffs_.rbegin()->first);
    return std::max(lo, hi);
  }

  double coeff_l1() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::abs(c);
    return s;
  }

  double coeff_l2() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::norm(c);
    return std::sqrt(s);
  }

  std::complex<double> evaluate(double x) const {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& [k, c] : coeffs_)
      acc += c * std::polar(1.0, static_cast<double>(k) * x);
    return acc;
  }

  /// Values at the uniform grid x_j = 2*pi*j/L, j = 0..L-1. Uses the FFT when
  /// L is a power of two with L >= 4*(degree+1), direct summation otherwise.
  std::vector<std::complex<double>> evaluate_grid(std::size_t L) const {
    if (L < 1) throw std::invalid_argument("evaluate_grid: L must be >= 1");
    if (is_pow2(L) && L >= 4 * static_cast<std::size_t>(degree() + 1)) {
      std::vector<std::complex<double>> bins(L, {0.0, 0.0});
      for (const auto& [k, c] : coeffs_) {
        const std::int64_t m = ((k % static_cast<std::int64_t>(L)) + static_cast<std::int64_t>(L)) %
                               static_cast<std::int64_t>(L);
        bins[static_cast<std::size_t>(m)] += c;
      }
      fft_pow2(bins, +1);
      return bins;
    }
    std::vector<std::complex<double>> out(L);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t j = 0; j < L; ++j) out[j] = evaluate(two_pi * static_cast<double>(j) / L);
    return out;
  }

  /// Fourier partial sum S_N f: coefficients restricted to |k| <= N.
  TrigPolynomial partial_sum(std::int64_t N) const {
    if (N < 0) throw std::invalid_argument("partial_sum: N must be >= 0");
    TrigPolynomial out;
    for (const auto& [k, c] : coeffs_)
      if (std::llabs(k) <= N) out.set(k, c);
    return out;
  }

  /// JSON form: list of [frequency, re, im] triples.
  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [k, c] : coeffs_) j.push_back({k, c.real(), c.imag()});
    return j;
  }

  static TrigPolynomial from_json(const nlohmann::json& j) {
    TrigPolynomial p;
    for (const auto& row : j)
      p.add(row.at(0).get<std::int64_t>(),
            {row.at(1).get<double>(), row.at(2).get<double>()});
    return p;
  }

 private:
  CoeffMap coeffs_;
};

}  // namespace thinsets

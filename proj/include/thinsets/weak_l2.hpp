#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "thinsets/fft.hpp"
#include "thinsets/frames.hpp"
#include "thinsets/norms.hpp"
#include "thinsets/rng.hpp"

namespace thinsets {

struct WeakL2Options {
  int restarts = 32;
  int max_iterations = 60;
  double ascent_tol = 1e-7;
  double c0_envelope = 2.2;  // empirical envelope constant for the analytic upper bound
  std::uint64_t seed = 0x57eacb2ULL;
};

/// Analytic upper bound C0 * sqrt(n / log n) for the weak l2 norm of n
/// exponentials in L^{Psi_2} (n >= 2).
inline double weak_l2_upper_envelope(std::size_t n, double c0) {
  return c0 * std::sqrt(static_cast<double>(n) / std::log(static_cast<double>(n)));
}

namespace detail {

// Maximizes ||sum_j a_j e_{k_j}||_{Psi_2} over unit coefficient vectors a by
// projected gradient ascent. The gradient of the Luxemburg norm follows from
// implicit differentiation of the Orlicz equation; one inverse-direction FFT
// of exp(|f|^2/t^2) * f yields all coordinates at once.
class ExpWeakL2Ascent {
 public:
  ExpWeakL2Ascent(const std::vector<std::int64_t>& freqs, const OrliczConfig& cfg)
      : freqs_(freqs), cfg_(cfg) {
    std::int64_t deg = 1;
    for (std::int64_t k : freqs) deg = std::max<std::int64_t>(deg, std::llabs(k));
    L_ = quadrature_size(cfg, deg);
    bins_.resize(L_);
    u2_.resize(L_);
    slots_.resize(freqs.size());
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const std::int64_t m = ((freqs[j] % static_cast<std::int64_t>(L_)) +
                              static_cast<std::int64_t>(L_)) %
                             static_cast<std::int64_t>(L_);
      slots_[j] = static_cast<std::size_t>(m);
    }
  }

  double norm_of(const std::vector<std::complex<double>>& a, double tol) {
    std::fill(bins_.begin(), bins_.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t j = 0; j < a.size(); ++j) bins_[slots_[j]] += a[j];
    fft_pow2(bins_, +1);
    for (std::size_t m = 0; m < L_; ++m) u2_[m] = std::norm(bins_[m]);
    const auto res = luxemburg_from_moduli2(u2_, tol, cfg_.exponent_clamp);
    last_norm_ = res.value;
    return res.value;
  }

  // Ascent direction at the current grid state (call norm_of first).
  std::vector<std::complex<double>> direction() {
    const double s = 1.0 / (last_norm_ * last_norm_);
    std::vector<std::complex<double>> h(L_);
    for (std::size_t m = 0; m < L_; ++m) h[m] = std::exp(s * u2_[m]) * bins_[m];
    fft_pow2(h, -1);
    std::vector<std::complex<double>> dir(freqs_.size());
    for (std::size_t j = 0; j < freqs_.size(); ++j) dir[j] = h[slots_[j]];
    return dir;
  }

  std::size_t grid_size() const { return L_; }

 private:
  std::vector<std::int64_t> freqs_;
  OrliczConfig cfg_;
  std::size_t L_ = 0;
  std::vector<std::complex<double>> bins_;
  std::vector<double> u2_;
  std::vector<std::size_t> slots_;
  double last_norm_ = 0.0;
};

inline void normalize_coeffs(std::vector<std::complex<double>>& a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  s = std::sqrt(s);
  if (s > 0.0)
    for (auto& z : a) z /= s;
}

}  // namespace detail

/// Weak l2 norm sigma of a frame: closed form for coordinate frames
/// (max_i sqrt(sum_j v_j[i]^2)); for exponential frames a multi-start ascent
/// lower bound paired with the analytic envelope upper bound.
inline NormEstimate weak_l2_norm(const BanachFrame& frame, const WeakL2Options& opt = {}) {
  NormEstimate est;
  if (frame.space == FrameSpace::coordinate_sup) {
    const std::size_t dim = frame.dimension();
    double best = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (const auto& v : frame.vectors) s += v[i] * v[i];
      best = std::max(best, s);
    }
    est.value = est.lower = est.upper = std::sqrt(best);
    est.method = NormMethod::closed_form;
    return est;
  }

  const std::size_t n = frame.frequencies.size();
  if (n == 1) {
    // |a| = 1 leaves |a e_k| = 1 pointwise: sigma = ||1||_{Psi_2} exactly.
    est.value = est.lower = est.upper = 1.0 / std::sqrt(detail::kLn2);
    est.method = NormMethod::closed_form;
    return est;
  }

  detail::ExpWeakL2Ascent engine(frame.frequencies, frame.orlicz);
  const double coarse_tol = 1e-6;
  double best = 0.0;
  std::vector<std::complex<double>> best_a;

  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<std::complex<double>> a(n);
    if (r == 0) {
      for (auto& z : a) z = 1.0;  // the flat start is often near-optimal
    } else {
      CounterRng rng = CounterRng::keyed(opt.seed, static_cast<std::uint64_t>(r));
      for (auto& z : a) z = {rng.next_gaussian(), rng.next_gaussian()};
    }
    detail::normalize_coeffs(a);
    double cur = engine.norm_of(a, coarse_tol);
    double step = 0.5;
    for (int it = 0; it < opt.max_iterations; ++it) {
      auto dir = engine.direction();
      detail::normalize_coeffs(dir);
      bool improved = false;
      for (int bt = 0; bt < 4 && !improved; ++bt) {
        std::vector<std::complex<double>> trial(n);
        for (std::size_t j = 0; j < n; ++j) trial[j] = a[j] + step * dir[j];
        detail::normalize_coeffs(trial);
        const double val = engine.norm_of(trial, coarse_tol);
        if (val > cur * (1.0 + 1e-12)) {
          const double gain = val - cur;
          a = std::move(trial);
          cur = val;
          step *= 1.3;
          improved = true;
          if (gain < opt.ascent_tol * cur) it = opt.max_iterations;  // converged
        } else {
          step *= 0.35;
        }
      }
      if (!improved) break;
    }
    if (cur > best) {
      best = cur;
      best_a = a;
    }
  }

  // Final evaluation of the winner at full tolerance.
  if (!best_a.empty()) best = engine.norm_of(best_a, frame.orlicz.bisection_tol);

  est.value = est.lower = best;
  est.upper = std::max(best, weak_l2_upper_envelope(n, opt.c0_envelope));
  est.method = NormMethod::optimization_lower_bound;
  est.points = opt.restarts;
  return est;
}

}  // namespace thinsets

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinsets/rng.hpp"
#include "thinsets/stats.hpp"
#include "thinsets/trigpoly.hpp"

namespace thinsets {

enum class NormMethod { closed_form, grid_fft, bisection, optimization_lower_bound, monte_carlo };

inline std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::closed_form: return "closed_form";
    case NormMethod::grid_fft: return "grid_fft";
    case NormMethod::bisection: return "bisection";
    case NormMethod::optimization_lower_bound: return "optimization_lower_bound";
    case NormMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

/// A norm value with a certified bracket [lower, upper] and the method that
/// produced it. closed_form implies lower == value == upper.
struct NormEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;  // may be +infinity
  NormMethod method = NormMethod::closed_form;
  std::int64_t points = 0;  // grid size or Monte Carlo trials

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["value"] = value;
    j["lower"] = lower;
    j["upper"] = std::isfinite(upper) ? nlohmann::json(upper) : nlohmann::json(nullptr);
    j["method"] = to_string(method);
    j["points"] = points;
    return j;
  }
};

struct OrliczConfig {
  std::int64_t quadrature_points = 0;  // 0 = auto; always raised to >= 8*degree, power of two
  double bisection_tol = 1e-9;
  double exponent_clamp = 700.0;  // exp argument cap; beyond it the integral counts as +inf
};

inline std::size_t quadrature_size(const OrliczConfig& cfg, std::int64_t degree) {
  const std::size_t min_pts = 8 * static_cast<std::size_t>(std::max<std::int64_t>(degree, 1));
  const std::size_t req = std::max<std::size_t>(
      {min_pts, 256, cfg.quadrature_points > 0 ? static_cast<std::size_t>(cfg.quadrature_points)
                                               : 0});
  return next_pow2(req);
}

namespace detail {

constexpr double kLn2 = 0.6931471805599453094172321215;

struct LuxemburgResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Luxemburg Psi_2 norm from squared moduli u2_j of f on a quadrature grid:
// the t solving mean_j exp(u2_j / t^2) = 2. Solved as g(s) = mean exp(s*u2)
// = 2 in s = 1/t^2; g is convex and increasing, so Newton steps from the
// infeasible side converge monotonically and a bracket guards every step.
// s_init > 0 warm-starts the bracket hunt near a previous solution.
inline LuxemburgResult luxemburg_from_moduli2(const std::vector<double>& u2, double tol,
                                              double clamp, double s_init = 0.0) {
  double u2_max = 0.0, u2_mean = 0.0;
  for (double v : u2) {
    u2_max = std::max(u2_max, v);
    u2_mean += v;
  }
  u2_mean /= static_cast<double>(u2.size());
  if (u2_max <= 0.0) return {0.0, 0.0, 0.0};

  const double inv_n = 1.0 / static_cast<double>(u2.size());
  const auto g_and_dg = [&](double s, double& g, double& dg) {
    g = 0.0;
    dg = 0.0;
    for (double v : u2) {
      const double a = s * v;
      if (a > clamp) {
        g = std::numeric_limits<double>::infinity();
        dg = std::numeric_limits<double>::infinity();
        return;
      }
      const double e = std::exp(a);
      g += e;
      dg += v * e;
    }
    g *= inv_n;
    dg *= inv_n;
  };

  double s_lo = 0.0;  // g(0) = 1 < 2
  double s_hi = s_init > 0.0 ? s_init : kLn2 / u2_mean;
  {
    double g, dg;
    g_and_dg(s_hi, g, dg);
    int guard = 0;
    while (g < 2.0 && guard++ < 200) {
      s_lo = s_hi;
      s_hi *= 2.0;
      g_and_dg(s_hi, g, dg);
    }
    if (g < 2.0) throw std::runtime_error("luxemburg: failed to bracket the Orlicz equation");
  }

  double s = s_lo, g = 0.0, dg = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    g_and_dg(s, g, dg);
    if (std::isfinite(g)) {
      if (g < 2.0)
        s_lo = s;
      else
        s_hi = s;
      if (std::abs(g - 2.0) <= 1e-13) break;
    } else {
      s_hi = s;
    }
    double next;
    if (std::isfinite(g) && std::isfinite(dg) && dg > 0.0) {
      next = s + (2.0 - g) / dg;
      if (!(next > s_lo && next < s_hi)) next = 0.5 * (s_lo + s_hi);
    } else {
      next = 0.5 * (s_lo + s_hi);
    }
    if (s_hi - s_lo <= tol * std::max(s_lo, 1e-300)) {
      s = 0.5 * (s_lo + s_hi);
      break;
    }
    s = next;
  }
  LuxemburgResult out;
  out.value = 1.0 / std::sqrt(s);
  out.lower = 1.0 / std::sqrt(s_hi);
  out.upper = s_lo > 0.0 ? 1.0 / std::sqrt(s_lo) : std::numeric_limits<double>::infinity();
  // The bracket can collapse to the value itself up to round-off.
  out.lower = std::min(out.lower, out.value);
  out.upper = std::max(out.upper, out.value);
  return out;
}

inline std::vector<double> grid_moduli2(const TrigPolynomial& f, std::size_t L) {
  const auto vals = f.evaluate_grid(L);
  std::vector<double> u2(vals.size());
  for (std::size_t j = 0; j < vals.size(); ++j) u2[j] = std::norm(vals[j]);
  return u2;
}

}  // namespace detail

/// Orlicz functional (1/2pi) * integral of exp(|f/t|^2) - 1 against Haar
/// measure, evaluated by uniform-grid quadrature; +inf once the exponent
/// clamp trips.
inline double orlicz_psi2_functional(const TrigPolynomial& f, double t, const OrliczConfig& cfg = {}) {
  if (!(t > 0.0)) throw std::invalid_argument("orlicz_psi2_functional: t must be > 0");
  const auto u2 = detail::grid_moduli2(f, quadrature_size(cfg, f.degree()));
  const double s = 1.0 / (t * t);
  double acc = 0.0;
  for (double v : u2) {
    const double a = s * v;
    if (a > cfg.exponent_clamp) return std::numeric_limits<double>::infinity();
    acc += std::exp(a) - 1.0;
  }
  return acc / static_cast<double>(u2.size());
}

/// Luxemburg norm for Psi_2(x) = e^{x^2} - 1: inf{t > 0 : functional(t) <= 1}.
inline NormEstimate luxemburg_psi2(const TrigPolynomial& f, const OrliczConfig& cfg = {}) {
  NormEstimate est;
  if (f.empty()) {
    est.method = NormMethod::closed_form;
    return est;
  }
  const std::size_t L = quadrature_size(cfg, f.degree());
  const auto res = detail::luxemburg_from_moduli2(detail::grid_moduli2(f, L),
                                                  cfg.bisection_tol, cfg.exponent_clamp);
  est.value = res.value;
  est.lower = res.lower;
  est.upper = res.upper;
  est.method = NormMethod::bisection;
  est.points = static_cast<std::int64_t>(L);
  return est;
}

/// Psi_A = Luxemburg norm of the indicator exponential sum over A.
inline NormEstimate psi_A(std::span<const std::int64_t> A, const OrliczConfig& cfg = {}) {
  if (A.empty()) throw std::invalid_argument("psi_A: A must be nonempty");
  return luxemburg_psi2(TrigPolynomial::indicator(A), cfg);
}

/// Sup norm bracketed via grid maximum and the Bernstein inequality:
/// grid max m gives m <= ||f||_inf <= m / (1 - pi*deg/L).
inline NormEstimate sup_norm(const TrigPolynomial& f, double oversample = 4.0) {
  if (!(oversample >= 4.0)) throw std::invalid_argument("sup_norm: oversample must be >= 4");
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double deg = static_cast<double>(std::max<std::int64_t>(f.degree(), 1));
  const std::size_t L = next_pow2(static_cast<std::size_t>(std::ceil(oversample * deg * two_pi)));
  const auto vals = f.evaluate_grid(L);
  double m = 0.0;
  for (const auto& v : vals) m = std::max(m, std::abs(v));
  const double denom = 1.0 - 3.14159265358979323846 * static_cast<double>(f.degree()) /
                                 static_cast<double>(L);
  if (denom <= 0.0) throw std::invalid_argument("sup_norm: grid too coarse for Bernstein bracket");
  NormEstimate est;
  est.lower = m;
  est.upper = m / denom;
  est.value = est.upper;
  est.method = NormMethod::grid_fft;
  est.points = static_cast<std::int64_t>(L);
  return est;
}

/// L^p norm against normalized Haar measure by uniform-grid quadrature.
/// For p = 2 the grid value is cross-checked against Parseval.
inline NormEstimate lp_norm(const TrigPolynomial& f, double p, const OrliczConfig& cfg = {}) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const std::size_t L = quadrature_size(cfg, f.degree());
  const auto vals = f.evaluate_grid(L);
  double acc = 0.0;
  for (const auto& v : vals) acc += std::pow(std::abs(v), p);
  const double value = std::pow(acc / static_cast<double>(L), 1.0 / p);
  if (p == 2.0) {
    const double parseval = f.coeff_l2();
    const double scale = std::max(parseval, 1.0);
    if (std::abs(value - parseval) > 1e-8 * scale)
      throw std::logic_error("lp_norm: quadrature disagrees with Parseval at p = 2");
  }
  NormEstimate est;
  est.value = est.lower = est.upper = value;
  est.method = NormMethod::grid_fft;
  est.points = static_cast<std::int64_t>(L);
  return est;
}

/// Rider (Pisier) norm [[f]] = E ||f_omega||_inf over Rademacher sign flips
/// of the coefficients, with a 99% normal-approximation confidence interval.
/// Each draw's sup is the grid maximum, a per-sample lower bound.
inline NormEstimate rider_norm(const TrigPolynomial& f, std::int64_t trials, std::uint64_t seed,
                               double oversample = 8.0) {
  if (trials < 100) throw std::invalid_argument("rider_norm: trials must be >= 100");
  NormEstimate est;
  est.method = NormMethod::monte_carlo;
  est.points = trials;
  if (f.empty()) return est;

  constexpr double two_pi = 6.283185307179586476925286766559;
  const double deg = static_cast<double>(std::max<std::int64_t>(f.degree(), 1));
  const std::size_t L = next_pow2(static_cast<std::size_t>(std::ceil(oversample * deg * two_pi)));

  std::vector<std::int64_t> freqs;
  std::vector<std::complex<double>> base;
  freqs.reserve(f.term_count());
  for (const auto& [k, c] : f.coeffs()) {
    freqs.push_back(k);
    base.push_back(c);
  }

  std::vector<double> sups(static_cast<std::size_t>(trials));
  std::vector<std::complex<double>> bins;
  for (std::int64_t t = 0; t < trials; ++t) {
    CounterRng rng = CounterRng::keyed(seed, static_cast<std::uint64_t>(t));
    bins.assign(L, {0.0, 0.0});
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const std::int64_t m =
          ((freqs[i] % static_cast<std::int64_t>(L)) + static_cast<std::int64_t>(L)) %
          static_cast<std::int64_t>(L);
      bins[static_cast<std::size_t>(m)] += rng.next_sign() * base[i];
    }
    fft_pow2(bins, +1);
    double s = 0.0;
    for (const auto& v : bins) s = std::max(s, std::abs(v));
    sups[static_cast<std::size_t>(t)] = s;
  }
  const double m = mean(sups);
  const double se = sample_stddev(sups) / std::sqrt(static_cast<double>(trials));
  est.value = m;
  est.lower = std::max(0.0, m - 2.5758293035489 * se);
  est.upper = m + 2.5758293035489 * se;
  return est;
}

}  // namespace thinsets

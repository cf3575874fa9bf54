#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinsets/frames.hpp"
#include "thinsets/norms.hpp"
#include "thinsets/parallel.hpp"
#include "thinsets/rng.hpp"
#include "thinsets/sampling.hpp"
#include "thinsets/stats.hpp"
#include "thinsets/weak_l2.hpp"

namespace thinsets {

enum class VariateKind { rademacher, uniform_pm1, gaussian };

inline std::string to_string(VariateKind v) {
  switch (v) {
    case VariateKind::rademacher: return "rademacher";
    case VariateKind::uniform_pm1: return "uniform_pm1";
    case VariateKind::gaussian: return "gaussian";
  }
  return "unknown";
}

inline bool is_bounded(VariateKind v) { return v != VariateKind::gaussian; }

namespace detail {

inline void draw_variates(CounterRng& rng, VariateKind kind, std::vector<double>& out) {
  switch (kind) {
    case VariateKind::rademacher:
      for (auto& x : out) x = rng.next_sign();
      break;
    case VariateKind::uniform_pm1:
      for (auto& x : out) x = rng.next_symmetric();
      break;
    case VariateKind::gaussian:
      for (auto& x : out) x = rng.next_gaussian();
      break;
  }
}

// Repeated-trial evaluator for Z = ||sum X_j v_j|| over one frame. For
// exponential frames the grid values of f are kept so single-coordinate
// resamples (the BLM check) cost O(L) instead of a fresh transform.
class FrameEvaluator {
 public:
  explicit FrameEvaluator(const BanachFrame& frame) : frame_(&frame) {
    if (frame.space == FrameSpace::exp_psi2) {
      std::int64_t deg = 1;
      for (std::int64_t k : frame.frequencies) deg = std::max<std::int64_t>(deg, std::llabs(k));
      L_ = quadrature_size(frame.orlicz, deg);
      slots_.resize(frame.frequencies.size());
      phases_.assign(frame.frequencies.size(), std::vector<std::complex<double>>(L_));
      constexpr double two_pi = 6.283185307179586476925286766559;
      for (std::size_t j = 0; j < frame.frequencies.size(); ++j) {
        const std::int64_t k = frame.frequencies[j];
        slots_[j] = static_cast<std::size_t>(
            ((k % static_cast<std::int64_t>(L_)) + static_cast<std::int64_t>(L_)) %
            static_cast<std::int64_t>(L_));
        for (std::size_t m = 0; m < L_; ++m)
          phases_[j][m] = std::polar(1.0, static_cast<double>(k) * two_pi *
                                              static_cast<double>(m) / static_cast<double>(L_));
      }
      grid_.resize(L_);
      u2_.resize(L_);
    } else {
      y_.resize(frame.dimension());
    }
  }

  // Z for coefficient vector X; caches state for replace().
  double z(const std::vector<double>& X) {
    if (frame_->space == FrameSpace::coordinate_sup) {
      std::fill(y_.begin(), y_.end(), 0.0);
      for (std::size_t j = 0; j < X.size(); ++j)
        for (std::size_t i = 0; i < y_.size(); ++i) y_[i] += X[j] * frame_->vectors[j][i];
      double m = 0.0;
      for (double v : y_) m = std::max(m, std::abs(v));
      return m;
    }
    std::fill(grid_.begin(), grid_.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t j = 0; j < X.size(); ++j) grid_[slots_[j]] += X[j];
    fft_pow2(grid_, +1);
    for (std::size_t m = 0; m < L_; ++m) u2_[m] = std::norm(grid_[m]);
    const auto res = luxemburg_from_moduli2(u2_, 1e-9, frame_->orlicz.exponent_clamp);
    last_s_ = res.value > 0.0 ? 1.0 / (res.value * res.value) : 0.0;
    return res.value;
  }

  // Z with coordinate i replaced: X_i -> xi_new. Uses the cached state of the
  // last z() call.
  double z_replaced(const std::vector<double>& X, std::size_t i, double xi_new) {
    const double dx = xi_new - X[i];
    if (frame_->space == FrameSpace::coordinate_sup) {
      double m = 0.0;
      for (std::size_t c = 0; c < y_.size(); ++c)
        m = std::max(m, std::abs(y_[c] + dx * frame_->vectors[i][c]));
      return m;
    }
    scratch_u2_.resize(L_);
    const auto& ph = phases_[i];
    for (std::size_t m = 0; m < L_; ++m) scratch_u2_[m] = std::norm(grid_[m] + dx * ph[m]);
    const auto res =
        luxemburg_from_moduli2(scratch_u2_, 1e-9, frame_->orlicz.exponent_clamp, last_s_);
    return res.value;
  }

 private:
  const BanachFrame* frame_;
  // coordinate state
  std::vector<double> y_;
  // exponential state
  std::size_t L_ = 0;
  std::vector<std::size_t> slots_;
  std::vector<std::vector<std::complex<double>>> phases_;
  std::vector<std::complex<double>> grid_;
  std::vector<double> u2_, scratch_u2_;
  double last_s_ = 0.0;
};

constexpr std::uint64_t kTrialStream = 0xc0cce117ULL;

}  // namespace detail

/// One draw of Z = ||sum X_j v_j|| in the frame's ambient norm.
inline double sample_Z(const BanachFrame& frame, VariateKind variate, std::uint64_t seed) {
  detail::FrameEvaluator eval(frame);
  std::vector<double> X(frame.size());
  CounterRng rng = CounterRng::keyed(seed, detail::kTrialStream);
  detail::draw_variates(rng, variate, X);
  return eval.z(X);
}

/// Survival curve of Z - E^Z with the three analytic tail bounds attached:
/// the strong-norm bound 2exp(-t^2/(8 sum||v_j||^2)), the one-sided weak-norm
/// bound exp(-t^2/(32 sigma^2)), and (gaussian runs only) the two-sided
/// gaussian bound 2exp(-t^2/((pi^2/2) sigma^2)).
struct TailReport {
  std::vector<double> t_grid;
  std::vector<double> empirical_survival;
  std::vector<double> mc_stderr;
  std::vector<double> bound_24;
  std::vector<double> bound_21;
  std::vector<double> bound_23;  // empty unless gaussian
  std::int64_t trials = 0;
  double mean_Z = 0.0;
  double sigma_weak = 0.0;
  double strong_l2 = 0.0;
  VariateKind variate = VariateKind::rademacher;

  void to_csv(std::ostream& os) const {
    os << "t,survival,stderr,bound_24,bound_21,bound_23\n";
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      os << t_grid[i] << "," << empirical_survival[i] << "," << mc_stderr[i] << ","
         << bound_24[i] << "," << bound_21[i] << ",";
      if (!bound_23.empty()) os << bound_23[i];
      os << "\n";
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["trials"] = trials;
    j["mean_Z"] = mean_Z;
    j["sigma_weak"] = sigma_weak;
    j["strong_l2"] = strong_l2;
    j["variate"] = to_string(variate);
    j["t"] = t_grid;
    j["survival"] = empirical_survival;
    j["stderr"] = mc_stderr;
    j["bound_24"] = bound_24;
    j["bound_21"] = bound_21;
    if (!bound_23.empty()) j["bound_23"] = bound_23;
    return j;
  }
};

inline TailReport tail_experiment(const BanachFrame& frame, VariateKind variate,
                                  std::int64_t trials, std::vector<double> t_grid,
                                  std::uint64_t seed, const WeakL2Options& wopt = {}) {
  if (trials < 1) throw std::invalid_argument("tail_experiment: trials must be >= 1");
  std::vector<double> zs(static_cast<std::size_t>(trials));
  parallel_chunks(trials, [&](std::int64_t lo, std::int64_t hi) {
    detail::FrameEvaluator eval(frame);
    std::vector<double> X(frame.size());
    for (std::int64_t t = lo; t < hi; ++t) {
      CounterRng rng = CounterRng::keyed(seed, detail::kTrialStream).split(
          static_cast<std::uint64_t>(t));
      detail::draw_variates(rng, variate, X);
      zs[static_cast<std::size_t>(t)] = eval.z(X);
    }
  });

  TailReport rep;
  rep.trials = trials;
  rep.variate = variate;
  rep.mean_Z = mean(zs);
  rep.sigma_weak = weak_l2_norm(frame, wopt).value;
  rep.strong_l2 = frame.strong_l2();

  if (t_grid.empty()) {
    const double sd = sample_stddev(zs);
    const double span = sd > 0.0 ? 5.0 * sd : rep.sigma_weak;
    for (int i = 0; i < 20; ++i) t_grid.push_back(span * static_cast<double>(i) / 19.0);
  }
  rep.t_grid = std::move(t_grid);

  const double sig2 = rep.sigma_weak * rep.sigma_weak;
  const double strong2 = rep.strong_l2 * rep.strong_l2;
  constexpr double pi2_over_2 = 4.9348022005446793094;
  for (double t : rep.t_grid) {
    std::int64_t count = 0;
    for (double z : zs)
      if (z - rep.mean_Z > t) ++count;
    const double p = static_cast<double>(count) / static_cast<double>(trials);
    rep.empirical_survival.push_back(p);
    rep.mc_stderr.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));
    rep.bound_24.push_back(std::exp(-t * t / (32.0 * sig2)));
    rep.bound_21.push_back(std::min(1.0, 2.0 * std::exp(-t * t / (8.0 * strong2))));
    if (variate == VariateKind::gaussian)
      rep.bound_23.push_back(std::min(1.0, 2.0 * std::exp(-t * t / (pi2_over_2 * sig2))));
  }
  return rep;
}

/// Per-sample check of the self-bounding condition
/// sum_i (Z - Z'_i)^2 1_{Z > Z'_i} <= 4 sigma^2 for bounded variates.
struct BlmReport {
  double max_statistic = 0.0;
  double bound = 0.0;  // 4 sigma^2
  std::int64_t violations = 0;
  std::int64_t trials = 0;
  double sigma_weak = 0.0;

  nlohmann::json to_json() const {
    return {{"schema_version", 1},
            {"max_statistic", max_statistic},
            {"bound", bound},
            {"violations", violations},
            {"trials", trials},
            {"sigma_weak", sigma_weak}};
  }
};

inline BlmReport blm_condition_check(const BanachFrame& frame, VariateKind variate,
                                     std::int64_t trials, std::uint64_t seed,
                                     const WeakL2Options& wopt = {}) {
  if (!is_bounded(variate))
    throw std::invalid_argument("blm_condition_check: requires |X_j| <= 1 variates");
  const std::size_t n = frame.size();
  BlmReport rep;
  rep.trials = trials;
  rep.sigma_weak = weak_l2_norm(frame, wopt).value;
  rep.bound = 4.0 * rep.sigma_weak * rep.sigma_weak;
  const double slack = 1e-8 * rep.sigma_weak * rep.sigma_weak;

  std::vector<double> stats(static_cast<std::size_t>(trials));
  parallel_chunks(trials, [&](std::int64_t lo, std::int64_t hi) {
    detail::FrameEvaluator eval(frame);
    std::vector<double> X(n), Xp(n);
    for (std::int64_t t = lo; t < hi; ++t) {
      CounterRng rng = CounterRng::keyed(seed, detail::kTrialStream).split(
          static_cast<std::uint64_t>(t));
      detail::draw_variates(rng, variate, X);
      detail::draw_variates(rng, variate, Xp);
      const double z = eval.z(X);
      double stat = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double zi = eval.z_replaced(X, i, Xp[i]);
        if (z > zi) stat += (z - zi) * (z - zi);
      }
      stats[static_cast<std::size_t>(t)] = stat;
    }
  });

  for (double s : stats) {
    rep.max_statistic = std::max(rep.max_statistic, s);
    if (s > rep.bound + slack) ++rep.violations;
  }
  return rep;
}

/// Empirical constant in Pisier's inequality: the ratio
/// E||sum_{k in A}(eps_k - delta_k) e_k||_{Psi_2} / (sum delta_k(1-delta_k))^{1/2}.
struct PisierReport {
  double ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double denominator = 0.0;
  std::int64_t trials = 0;
};

inline PisierReport pisier_probe(std::span<const std::int64_t> A,
                                 const SelectorSchedule& schedule, std::int64_t trials,
                                 std::uint64_t seed, const OrliczConfig& cfg = {}) {
  if (A.empty()) throw std::invalid_argument("pisier_probe: A must be nonempty");
  std::vector<double> deltas;
  double var_sum = 0.0;
  for (std::int64_t k : A) {
    const double d = mean_at(schedule, k);
    deltas.push_back(d);
    var_sum += d * (1.0 - d);
  }
  if (var_sum <= 0.0)
    throw std::invalid_argument("pisier_probe: degenerate schedule (all means 0 or 1 on A)");

  std::int64_t deg = 1;
  for (std::int64_t k : A) deg = std::max<std::int64_t>(deg, std::llabs(k));
  const std::size_t L = quadrature_size(cfg, deg);

  std::vector<double> norms(static_cast<std::size_t>(trials));
  std::vector<std::int64_t> freqs(A.begin(), A.end());
  parallel_chunks(trials, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<std::complex<double>> bins(L);
    std::vector<double> u2(L);
    for (std::int64_t t = lo; t < hi; ++t) {
      CounterRng rng = CounterRng::keyed(seed, detail::kTrialStream).split(
          static_cast<std::uint64_t>(t));
      std::fill(bins.begin(), bins.end(), std::complex<double>(0.0, 0.0));
      for (std::size_t j = 0; j < freqs.size(); ++j) {
        const double eps = rng.next_uniform() < deltas[j] ? 1.0 : 0.0;
        const std::int64_t m = ((freqs[j] % static_cast<std::int64_t>(L)) +
                                static_cast<std::int64_t>(L)) %
                               static_cast<std::int64_t>(L);
        bins[static_cast<std::size_t>(m)] += eps - deltas[j];
      }
      fft_pow2(bins, +1);
      for (std::size_t m = 0; m < L; ++m) u2[m] = std::norm(bins[m]);
      norms[static_cast<std::size_t>(t)] =
          detail::luxemburg_from_moduli2(u2, 1e-9, cfg.exponent_clamp).value;
    }
  });

  PisierReport rep;
  rep.trials = trials;
  rep.denominator = std::sqrt(var_sum);
  const double m = mean(norms);
  const double se = sample_stddev(norms) / std::sqrt(static_cast<double>(trials));
  rep.ratio = m / rep.denominator;
  rep.ci_low = (m - 2.5758293035489 * se) / rep.denominator;
  rep.ci_high = (m + 2.5758293035489 * se) / rep.denominator;
  return rep;
}

}  // namespace thinsets

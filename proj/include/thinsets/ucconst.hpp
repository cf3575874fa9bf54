#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinsets/fft.hpp"
#include "thinsets/parallel.hpp"
#include "thinsets/rng.hpp"
#include "thinsets/sampling.hpp"
#include "thinsets/schedule.hpp"
#include "thinsets/simplex.hpp"
#include "thinsets/stats.hpp"

namespace thinsets {

struct LPConfig {
  int constraint_grid = 0;  // 0 = 32x the centered bandwidth; always >= 8 * max frequency
  int objective_grid = 1;    // x0 points; grid-aligned points are equivalent, see below
  int polygon_sides = 16;    // m >= 8; modulus approximated by m half planes
  double solver_tol = 1e-2;  // certified duality-gap stopping tolerance (halved inside)
  int max_iters = 200'000;   // exchange-simplex pivot cap
  int prefix_budget = 0;     // 0 = all partial-sum cuts in uc_constant
  int search_trials = 64;    // random-phase witnesses
  std::uint64_t search_seed = 0x5ea6cdULL;
  int patience = 0;          // pricing scans without certified improvement; 0 = auto
  bool real_coeffs = false;  // restrict fhat to real parts (smaller LP, still a witness)
  bool verbose = false;
};

/// Lower-bound estimate of sup{ ||S_N f||_inf : ||f||_inf <= 1, Sp f in E }.
struct SnResult {
  double value = 0.0;         // certified lower bound after polygon/grid corrections
  double lp_objective = 0.0;  // discretized-LP objective
  double grid_scale = 1.0;    // full-grid polygon max the solution was rescaled by
  int rounds = 0;
  int iterations = 0;
  std::size_t rows = 0;       // active constraints at the final vertex
  std::vector<std::int64_t> freqs;
  std::vector<std::complex<double>> coeffs;  // optimizer, unscaled
};

namespace detail {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Semi-infinite LP for the partial-sum functional on C_E: uniform grid,
// complex modulus replaced by an m-gon, solved by an exchange simplex whose
// pricing scans the whole grid through one FFT per pivot. The translation
// x0 -> x0 + grid step and the rotation f -> e^{2*pi*i/m} f map the feasible
// set onto itself, so the objective Re(S_N f)(0) already attains the maximum
// over grid-aligned x0 and polygon rotations. The spectrum is centered first
// (the functional sum fhat(k) over a fixed subset is translation invariant),
// which halves the bandwidth entering the grid corrections.
class SnLpInstance {
 public:
  SnLpInstance(std::vector<std::int64_t> freqs, const LPConfig& cfg)
      : freqs_(std::move(freqs)), cfg_(cfg) {
    if (freqs_.empty()) throw std::invalid_argument("sn_operator_norm: E must be nonempty");
    std::sort(freqs_.begin(), freqs_.end());
    for (std::size_t i = 0; i + 1 < freqs_.size(); ++i)
      if (freqs_[i] == freqs_[i + 1])
        throw std::invalid_argument("sn_operator_norm: frequencies must be distinct");
    std::int64_t max_abs = 0;
    for (std::int64_t k : freqs_) max_abs = std::max<std::int64_t>(max_abs, std::llabs(k));
    if (max_abs > 512) throw std::invalid_argument("sn_operator_norm: max |E| exceeds 512");
    if (cfg_.polygon_sides < 8)
      throw std::invalid_argument("sn_operator_norm: polygon_sides must be >= 8");
    center_ = (freqs_.front() + freqs_.back()) / 2;
    centered_.reserve(freqs_.size());
    max_freq_ = 1;
    for (std::int64_t k : freqs_) {
      centered_.push_back(k - center_);
      max_freq_ = std::max<std::int64_t>(max_freq_, std::llabs(k - center_));
    }
    const std::int64_t wanted =
        cfg_.constraint_grid > 0
            ? std::max<std::int64_t>(cfg_.constraint_grid, 8 * max_freq_)
            : 32 * std::max<std::int64_t>(max_freq_, 8);
    grid_ = next_pow2(static_cast<std::size_t>(wanted));
    slots_.reserve(centered_.size());
    for (std::int64_t k : centered_)
      slots_.push_back(static_cast<std::size_t>(
          ((k % static_cast<std::int64_t>(grid_)) + static_cast<std::int64_t>(grid_)) %
          static_cast<std::int64_t>(grid_)));
  }

  SnResult solve(std::int64_t N) {
    const std::size_t d = freqs_.size();
    const std::size_t vars = cfg_.real_coeffs ? d : 2 * d;
    SnResult res;
    res.freqs = freqs_;
    std::vector<double> c(vars, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < d; ++i)
      if (std::llabs(freqs_[i]) <= N) {
        c[i] = 1.0;  // Re part; Im column (when present) stays 0
        any = true;
      }
    if (!any) {
      res.coeffs.assign(d, {0.0, 0.0});
      return res;
    }

    std::vector<std::complex<double>> bins(grid_);
    const double cos_gon = std::cos(kPi / cfg_.polygon_sides);
    const std::size_t min_sep =
        std::max<std::size_t>(1, grid_ / (16 * static_cast<std::size_t>(max_freq_)));
    const auto price = [&](const std::vector<double>& y) {
      std::fill(bins.begin(), bins.end(), std::complex<double>(0.0, 0.0));
      for (std::size_t i = 0; i < d; ++i)
        bins[slots_[i]] += std::complex<double>(y[i], cfg_.real_coeffs ? 0.0 : y[d + i]);
      fft_pow2(bins, +1);
      // support(z) lies within [cos(pi/m)|z|, |z|]: only near-maximal moduli
      // can carry the maximum, and local maxima of |z| are batch candidates
      double max2 = 0.0;
      for (std::size_t j = 0; j < grid_; ++j) max2 = std::max(max2, std::norm(bins[j]));
      const double floor2 = max2 * cos_gon * cos_gon * 0.8;
      std::vector<std::pair<double, std::size_t>> locals;
      for (std::size_t j = 0; j < grid_; ++j) {
        const double v = std::norm(bins[j]);
        if (v < floor2) continue;
        if (v >= std::norm(bins[(j + grid_ - 1) % grid_]) &&
            v >= std::norm(bins[(j + 1) % grid_]))
          locals.emplace_back(v, j);
      }
      std::sort(locals.begin(), locals.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      std::vector<std::pair<double, std::uint64_t>> batch;
      std::vector<std::size_t> taken;
      for (const auto& [v, j] : locals) {
        if (batch.size() >= 24) break;
        bool crowded = false;
        for (std::size_t t : taken) {
          const std::size_t dist = t > j ? t - j : j - t;
          if (std::min(dist, grid_ - dist) < min_sep) {
            crowded = true;
            break;
          }
        }
        if (crowded) continue;
        const auto [p, sj] = polygon_support(bins[j]);
        batch.emplace_back(p, key(j, sj));
        taken.push_back(j);
      }
      std::sort(batch.begin(), batch.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      // the batch leader must be the global maximizer: check all prefilter
      // survivors against it
      double best = batch.empty() ? 0.0 : batch.front().first;
      std::uint64_t best_key = batch.empty() ? 0 : batch.front().second;
      for (std::size_t j = 0; j < grid_; ++j) {
        if (std::norm(bins[j]) < best * best) continue;
        const auto [p, sj] = polygon_support(bins[j]);
        if (p > best) {
          best = p;
          best_key = key(j, sj);
        }
      }
      if (batch.empty() || best_key != batch.front().second)
        batch.insert(batch.begin(), {best, best_key});
      return batch;
    };
    const auto colfn = [&](std::uint64_t kk, std::vector<double>& out) {
      const auto [j, s] = unkey(kk);
      const double theta = kTwoPi * s / cfg_.polygon_sides;
      const double yj = kTwoPi * static_cast<double>(j) / static_cast<double>(grid_);
      for (std::size_t i = 0; i < d; ++i) {
        const double phase = theta + static_cast<double>(centered_[i]) * yj;
        out[i] = std::cos(phase);
        if (!cfg_.real_coeffs) out[d + i] = -std::sin(phase);
      }
    };

    // harvest the best certified iterate; stop on a small duality gap (the
    // dual objective bounds the optimum from above) or a long stall
    std::vector<double> best_y;
    double best_cert = 0.0;
    int calls = 0, best_call = -1;
    const auto monitor = [&](const std::vector<double>& y, double price_val, double dual_obj,
                             int /*iter*/) {
      ++calls;
      double obj = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) obj += c[i] * y[i];
      const double cert = obj / std::max(1.0, price_val);
      if (cert > best_cert * (1.0 + 1e-9)) {
        best_cert = cert;
        best_y = y;
        best_call = calls;
      }
      if (best_cert >= dual_obj * (1.0 - 0.5 * cfg_.solver_tol)) return false;
      // patience in pricing scans, not pivots: certificates only move on
      // scans; precision runs (small tolerance) wait much longer
      const int patience = cfg_.patience > 0
                               ? cfg_.patience
                               : (cfg_.solver_tol < 5e-3 ? 2000 + 20 * static_cast<int>(d)
                                                         : 60 + static_cast<int>(d));
      return best_call < 0 || calls - best_call < patience;
    };

    const auto sol = ExchangeLp::solve(c, price, colfn, cfg_.max_iters, 1e-7, monitor);
    if (sol.status == LpStatus::infeasible)
      throw std::runtime_error("sn_operator_norm: solver failure");
    res.rounds = 1;
    res.iterations = sol.iterations;
    res.rows = sol.basis_keys.size();
    last_basis_ = sol.basis_keys;

    // final certificate for the harvested iterate (falls back to the last y)
    const std::vector<double>& yfin = best_y.empty() ? sol.y : best_y;
    res.coeffs.resize(d);
    for (std::size_t i = 0; i < d; ++i)
      res.coeffs[i] = {yfin[i], cfg_.real_coeffs ? 0.0 : yfin[d + i]};
    std::fill(bins.begin(), bins.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < d; ++i) bins[slots_[i]] += res.coeffs[i];
    fft_pow2(bins, +1);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid_; ++j)
      worst = std::max(worst, polygon_support(bins[j]).first);
    double obj = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) obj += c[i] * yfin[i];
    res.lp_objective = obj;
    res.grid_scale = std::max(1.0, worst);
    res.value = obj / res.grid_scale * correction();
    if (cfg_.verbose)
      std::fprintf(stderr, "  sn N=%lld: obj=%.6f scale=%.6f iters=%d rows=%zu\n",
                   static_cast<long long>(N), res.lp_objective, res.grid_scale, res.iterations,
                   res.rows);
    return res;
  }

  double correction() const {
    return std::cos(kPi / cfg_.polygon_sides) *
           (1.0 - kPi * static_cast<double>(max_freq_) / static_cast<double>(grid_));
  }

  std::size_t grid() const { return grid_; }

  void dump(std::ostream& os) const {
    os << "sn-lp freqs";
    for (std::int64_t k : freqs_) os << " " << k;
    os << "\ngrid " << grid_ << " polygon " << cfg_.polygon_sides << " center " << center_
       << "\n";
    for (std::uint64_t kk : last_basis_) {
      const auto [j, s] = unkey(kk);
      os << "active j=" << j << " s=" << s << " : Re(e^{2pi i " << s << "/"
         << cfg_.polygon_sides << "} f(2pi " << j << "/" << grid_ << ")) <= 1\n";
    }
  }

 private:
  std::uint64_t key(std::size_t j, int s) const {
    return static_cast<std::uint64_t>(j) * cfg_.polygon_sides + static_cast<std::uint64_t>(s);
  }
  std::pair<std::size_t, int> unkey(std::uint64_t k) const {
    return {static_cast<std::size_t>(k / cfg_.polygon_sides),
            static_cast<int>(k % cfg_.polygon_sides)};
  }

  // max over polygon directions of Re(e^{i theta_s} z), with the attaining s.
  std::pair<double, int> polygon_support(std::complex<double> z) const {
    const int m = cfg_.polygon_sides;
    if (z == std::complex<double>(0.0, 0.0)) return {0.0, 0};
    const double phi = std::arg(z);
    const int s0 = static_cast<int>(std::lround(-phi * m / kTwoPi));
    double best = -1e300;
    int best_s = 0;
    for (int ds = -1; ds <= 1; ++ds) {
      const int s = ((s0 + ds) % m + m) % m;
      const double v = std::abs(z) * std::cos(kTwoPi * s / m + phi);
      if (v > best) {
        best = v;
        best_s = s;
      }
    }
    return {best, best_s};
  }

  std::vector<std::int64_t> freqs_;
  LPConfig cfg_;
  std::int64_t center_ = 0;
  std::vector<std::int64_t> centered_;
  std::int64_t max_freq_ = 1;
  std::size_t grid_ = 0;
  std::vector<std::size_t> slots_;
  std::vector<std::uint64_t> last_basis_;
};

}  // namespace detail

/// Certified lower bound for the partial-sum operator norm on C_E at cut N.
inline SnResult sn_operator_norm(std::span<const std::int64_t> E, std::int64_t N,
                                 const LPConfig& cfg = {}) {
  detail::SnLpInstance inst(std::vector<std::int64_t>(E.begin(), E.end()), cfg);
  return inst.solve(N);
}

/// UC-constant estimate: LP lower bound maximized over partial-sum cuts plus
/// a cheap random-phase search, both certified lower bounds for U(E).
struct UCEstimate {
  double value_lower = 0.0;   // LP route (includes the exact single-character witness 1)
  double value_search = 0.0;  // random-polynomial route
  std::int64_t best_N = 0;
  std::vector<std::int64_t> E;

  double value() const { return std::max(value_lower, value_search); }

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", 1},
                     {"value", value()},
                     {"value_lower", value_lower},
                     {"value_search", value_search},
                     {"best_N", best_N}};
    j["E"] = E;
    return j;
  }
};

namespace detail {

// Partial-sum cut points: the distinct |k| over E, every point where S_N
// changes on C_E.
inline std::vector<std::int64_t> prefix_cuts(const std::vector<std::int64_t>& freqs,
                                             int budget) {
  std::set<std::int64_t> cuts;
  for (std::int64_t k : freqs) cuts.insert(std::llabs(k));
  std::vector<std::int64_t> out(cuts.begin(), cuts.end());
  if (budget > 0 && out.size() > static_cast<std::size_t>(budget)) {
    std::vector<std::int64_t> picked;
    for (int t = 0; t < budget; ++t) {
      const std::size_t idx = static_cast<std::size_t>(
          std::llround(static_cast<double>(t) * static_cast<double>(out.size() - 1) /
                       static_cast<double>(budget - 1)));
      if (picked.empty() || picked.back() != out[idx]) picked.push_back(out[idx]);
    }
    out = std::move(picked);
  }
  return out;
}

// Random-phase witness search: certified ratio via Bernstein-corrected
// denominator; the exact single-character witness pins the value at >= 1.
inline std::pair<double, std::int64_t> uc_search(const std::vector<std::int64_t>& freqs,
                                                 const LPConfig& cfg) {
  std::int64_t max_freq = 1;
  for (std::int64_t k : freqs) max_freq = std::max<std::int64_t>(max_freq, std::llabs(k));
  const std::size_t G = next_pow2(static_cast<std::size_t>(8 * max_freq));
  const double corr = 1.0 - kPi * static_cast<double>(max_freq) / static_cast<double>(G);

  std::vector<std::int64_t> by_abs = freqs;
  std::sort(by_abs.begin(), by_abs.end(),
            [](std::int64_t a, std::int64_t b) { return std::llabs(a) < std::llabs(b); });

  double best = 1.0;  // f = e_k, N = |k|: ||S_N f|| / ||f|| = 1 exactly
  std::int64_t best_N = by_abs.empty() ? 0 : std::llabs(by_abs.front());

  std::vector<std::complex<double>> accum(G), row(G);
  for (int trial = 0; trial < cfg.search_trials; ++trial) {
    CounterRng rng = CounterRng::keyed(cfg.search_seed, static_cast<std::uint64_t>(trial));
    std::fill(accum.begin(), accum.end(), std::complex<double>(0.0, 0.0));
    // draw phases, build the full polynomial first for the denominator
    std::vector<std::complex<double>> coeffs(by_abs.size());
    for (auto& z : coeffs) z = std::polar(1.0, kTwoPi * rng.next_uniform());
    std::vector<double> prefix_sup;
    prefix_sup.reserve(by_abs.size());
    for (std::size_t i = 0; i < by_abs.size(); ++i) {
      const double step = kTwoPi * static_cast<double>(by_abs[i]) / static_cast<double>(G);
      const std::complex<double> w = std::polar(1.0, step);
      std::complex<double> cur = coeffs[i];
      for (std::size_t j = 0; j < G; ++j) {
        accum[j] += cur;
        cur *= w;
      }
      // sup after each |k| group closes
      if (i + 1 == by_abs.size() || std::llabs(by_abs[i + 1]) != std::llabs(by_abs[i])) {
        double s = 0.0;
        for (const auto& z : accum) s = std::max(s, std::abs(z));
        prefix_sup.push_back(s);
      } else {
        prefix_sup.push_back(-1.0);  // group not closed yet
      }
    }
    const double full_sup = prefix_sup.back() > 0.0 ? prefix_sup.back() : 0.0;
    if (full_sup <= 0.0) continue;
    for (std::size_t i = 0; i < by_abs.size(); ++i) {
      if (prefix_sup[i] < 0.0) continue;
      const double ratio = prefix_sup[i] * corr / full_sup;
      if (ratio > best) {
        best = ratio;
        best_N = std::llabs(by_abs[i]);
      }
    }
  }
  return {best, best_N};
}

}  // namespace detail

inline UCEstimate uc_constant(std::span<const std::int64_t> E, const LPConfig& cfg = {}) {
  if (E.empty()) throw std::invalid_argument("uc_constant: E must be nonempty");
  UCEstimate est;
  est.E.assign(E.begin(), E.end());
  std::sort(est.E.begin(), est.E.end());

  detail::SnLpInstance inst(est.E, cfg);
  const auto cuts = detail::prefix_cuts(est.E, cfg.prefix_budget);
  est.value_lower = 1.0;  // exact single-character witness
  est.best_N = cuts.empty() ? 0 : cuts.front();
  for (std::int64_t N : cuts) {
    const auto res = inst.solve(N);
    if (res.value > est.value_lower) {
      est.value_lower = res.value;
      est.best_N = N;
    }
  }

  const auto [search, search_N] = detail::uc_search(est.E, cfg);
  est.value_search = search;
  if (est.value_search > est.value_lower) est.best_N = search_N;
  return est;
}

/// Kashin-Tzafriri growth experiment: equal-mean random subsets of [1, N],
/// median UC estimate against the curve log(2 + delta*N / log N).
struct KtRow {
  std::int64_t N = 0;
  double median_U = 0.0;
  double curve = 0.0;
  double gamma = 0.0;  // median_U / curve
  std::int64_t empty_sets = 0;
};

struct KtReport {
  std::vector<KtRow> rows;
  double spearman = 0.0;
  double delta = 0.0;
  std::int64_t trials = 0;

  void to_csv(std::ostream& os) const {
    os << "N,median_U,curve,gamma_fit\n";
    for (const auto& r : rows)
      os << r.N << "," << r.median_U << "," << r.curve << "," << r.gamma << "\n";
  }

  nlohmann::json to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows)
      rows_json.push_back({{"N", r.N},
                           {"median_U", r.median_U},
                           {"curve", r.curve},
                           {"gamma_fit", r.gamma},
                           {"empty_sets", r.empty_sets}});
    return {{"schema_version", 1}, {"delta", delta},     {"trials", trials},
            {"rows", rows_json},   {"spearman", spearman}};
  }
};

inline KtReport kashin_tzafriri_experiment(const std::vector<std::int64_t>& N_list, double delta,
                                           std::int64_t trials, const LPConfig& cfg,
                                           std::uint64_t seed) {
  KtReport rep;
  rep.delta = delta;
  rep.trials = trials;
  for (std::int64_t N : N_list) {
    if (N > 512) throw std::invalid_argument("kashin_tzafriri_experiment: N must be <= 512");
    const auto schedule = SelectorSchedule::constant(delta, 1);
    std::vector<double> us(static_cast<std::size_t>(trials), 0.0);
    std::vector<std::int64_t> empties(static_cast<std::size_t>(trials), 0);
    parallel_for_index(trials, [&](std::int64_t t) {
      const auto sample = sample_set(schedule, 1, N,
                                     derive_key(seed, static_cast<std::uint64_t>(N * 1000 + t)));
      if (sample.elements.empty()) {
        empties[static_cast<std::size_t>(t)] = 1;  // U(empty) = 0 by convention
        return;
      }
      us[static_cast<std::size_t>(t)] = uc_constant(sample.elements, cfg).value();
    });
    KtRow row;
    row.N = N;
    std::vector<double> nonempty;
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (empties[i]) ++row.empty_sets;
      else nonempty.push_back(us[i]);
    }
    row.median_U = nonempty.empty() ? 0.0 : median(nonempty);
    row.curve = std::log(2.0 + delta * static_cast<double>(N) / std::log(static_cast<double>(N)));
    row.gamma = row.curve > 0.0 ? row.median_U / row.curve : 0.0;
    rep.rows.push_back(row);
  }
  std::vector<double> med, curve;
  for (const auto& r : rep.rows)
    if (r.median_U > 0.0) {
      med.push_back(r.median_U);
      curve.push_back(r.curve);
    }
  rep.spearman = med.size() >= 2 ? spearman_rho(med, curve)
                                 : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

/// Desk-scale surrogate of the section-4 thinning pipeline: per block n, an
/// equal-mean q_n/N_n thinning of a boosted source sample, with N_n the
/// surrogate block size exp(kappa * n * log n). The kappa compression keeps
/// q_n / log N_n proportional to n^{alpha-1} / (log n)^2, the shape that
/// separates alpha > 1 from alpha < 1.
struct SurrogateGrowthConfig {
  double alpha = 1.5;
  double kappa = 0.35;
  std::int64_t fixed_block_size = 0;  // > 0: constant-span blocks instead of the kappa geometry
  double c_q = 1.0;    // scale of q_n = c_q * n^alpha / log n
  double boost = 2.0;  // source mean = min(1, boost * target mean)
  int n_lo = 4;
  int n_hi = 8;
  std::int64_t trials = 5;
  std::uint64_t seed = 1;
  LPConfig lp;
};

struct ThinnedUcRow {
  int n = 0;
  std::int64_t block_size = 0;
  double q_n = 0.0;
  double target_mean = 0.0;
  double curve = 0.0;        // log(2 + q_n / log N_n)
  double ratio_shape = 0.0;  // (q_n / log N_n) / (n^{alpha-1} / (log n)^2)
  double median_U = 0.0;
  double median_count = 0.0;
  std::int64_t empty_realizations = 0;
};

struct ThinnedUcReport {
  std::vector<ThinnedUcRow> rows;
  double slope = std::numeric_limits<double>::quiet_NaN();  // median_U vs n
  bool fitted = false;

  nlohmann::json to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows)
      rows_json.push_back({{"n", r.n},
                           {"block_size", r.block_size},
                           {"q_n", r.q_n},
                           {"target_mean", r.target_mean},
                           {"curve", r.curve},
                           {"ratio_shape", r.ratio_shape},
                           {"median_U", r.median_U},
                           {"median_count", r.median_count},
                           {"empty_realizations", r.empty_realizations}});
    return {{"schema_version", 1}, {"rows", rows_json},
            {"slope", fitted ? nlohmann::json(slope) : nlohmann::json(nullptr)},
            {"fitted", fitted}};
  }
};

inline ThinnedUcReport thinned_uc_growth(const SurrogateGrowthConfig& cfg) {
  if (cfg.n_lo < 3 || cfg.n_hi < cfg.n_lo)
    throw std::invalid_argument("thinned_uc_growth: need 3 <= n_lo <= n_hi");

  struct Block {
    int n;
    std::int64_t start, size;
    double q, target, source;
  };
  std::vector<Block> blocks;
  std::int64_t cursor = 16;
  for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
    const double ln_n = std::log(static_cast<double>(n));
    const std::int64_t size =
        cfg.fixed_block_size > 0
            ? cfg.fixed_block_size
            : std::max<std::int64_t>(
                  3, std::llround(std::exp(cfg.kappa * static_cast<double>(n) * ln_n)));
    if (size > 512) throw std::invalid_argument("thinned_uc_growth: surrogate block exceeds 512");
    const double q = cfg.c_q * std::pow(static_cast<double>(n), cfg.alpha) / ln_n;
    const double target = std::min(1.0, q / static_cast<double>(size));
    blocks.push_back({n, cursor, size, q, target, std::min(1.0, cfg.boost * target)});
    cursor += size;
  }

  std::vector<std::pair<std::int64_t, double>> src_table, dst_table;
  for (const auto& b : blocks) {
    src_table.emplace_back(b.start, b.source);
    dst_table.emplace_back(b.start, b.target);
  }
  const auto src = SelectorSchedule::custom(src_table, 1);
  const auto dst = SelectorSchedule::custom(dst_table, 1);
  const std::int64_t lo = blocks.front().start, hi = cursor - 1;

  std::vector<std::vector<double>> us(blocks.size());
  std::vector<std::vector<double>> counts(blocks.size());
  std::vector<std::int64_t> empties(blocks.size(), 0);
  for (auto& v : us) v.resize(static_cast<std::size_t>(cfg.trials), 0.0);
  for (auto& v : counts) v.resize(static_cast<std::size_t>(cfg.trials), 0.0);
  std::vector<std::vector<std::int64_t>> empty_flags(
      blocks.size(), std::vector<std::int64_t>(static_cast<std::size_t>(cfg.trials), 0));

  parallel_for_index(cfg.trials, [&](std::int64_t t) {
    const auto sample =
        sample_set(src, lo, hi, derive_key(cfg.seed, static_cast<std::uint64_t>(2 * t)));
    const auto thinned =
        thin(sample, dst, derive_key(cfg.seed, static_cast<std::uint64_t>(2 * t + 1)));
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto& b = blocks[bi];
      std::vector<std::int64_t> translated;  // U(E + a) = U(E); small freqs keep the LP tiny
      for (std::int64_t e : thinned.elements)
        if (e >= b.start && e < b.start + b.size) translated.push_back(e - b.start + 1);
      counts[bi][static_cast<std::size_t>(t)] = static_cast<double>(translated.size());
      if (translated.empty()) {
        empty_flags[bi][static_cast<std::size_t>(t)] = 1;
        continue;
      }
      us[bi][static_cast<std::size_t>(t)] = uc_constant(translated, cfg.lp).value();
    }
  });

  ThinnedUcReport rep;
  std::vector<double> xs, ys;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& b = blocks[bi];
    ThinnedUcRow row;
    row.n = b.n;
    row.block_size = b.size;
    row.q_n = b.q;
    row.target_mean = b.target;
    const double ln_size = std::log(static_cast<double>(b.size));
    row.curve = std::log(2.0 + b.q / ln_size);
    const double ln_n = std::log(static_cast<double>(b.n));
    row.ratio_shape = (b.q / ln_size) /
                      (std::pow(static_cast<double>(b.n), cfg.alpha - 1.0) / (ln_n * ln_n));
    std::vector<double> nonempty;
    for (std::size_t t = 0; t < us[bi].size(); ++t) {
      if (empty_flags[bi][t]) ++row.empty_realizations;
      else nonempty.push_back(us[bi][t]);
    }
    row.median_U = nonempty.empty() ? 0.0 : median(nonempty);
    row.median_count = median(counts[bi]);
    rep.rows.push_back(row);
    if (!nonempty.empty()) {
      xs.push_back(static_cast<double>(b.n));
      ys.push_back(row.median_U);
    }
  }
  if (xs.size() >= 2) {
    rep.slope = least_squares(xs, ys).slope;
    rep.fitted = true;
  }
  return rep;
}

}  // namespace thinsets

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace thinsets {

enum class ScheduleKind { dyadic, rider, constant, custom };

inline std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::dyadic: return "dyadic";
    case ScheduleKind::rider: return "rider";
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::custom: return "custom";
  }
  return "unknown";
}

// Index n of the dyadic block [2^n, 2^{n+1}) containing k.
inline int dyadic_block_of(std::int64_t k) {
  if (k < 1) throw std::domain_error("dyadic_block_of: k must be positive");
  return std::bit_width(static_cast<std::uint64_t>(k)) - 1;
}

/// A family of selector means delta_k.
///
/// Kinds:
///   dyadic   delta_k = min(1, c * n / 2^n) on each block [2^n, 2^{n+1})
///   rider    delta_k = min(1, c * (log k)^alpha / (k * (log log k)^{alpha+1}))
///   constant delta_k = delta_const
///   custom   step function: delta_k = value of the last table breakpoint <= k
///
/// k_min is the smallest k the schedule is defined at. The formula kinds
/// require k_min >= 16 so that log log k stays positive; constant and custom
/// schedules accept k_min >= 1 (equal-mean sampling on [1, N] needs it).
struct SelectorSchedule {
  ScheduleKind kind = ScheduleKind::dyadic;
  double c = 1.0;
  double alpha = 1.0;
  double delta_const = 1.0;
  std::vector<std::pair<std::int64_t, double>> table;  // sorted by k
  std::int64_t k_min = 16;

  static SelectorSchedule dyadic(double c, std::int64_t k_min = 16) {
    SelectorSchedule s;
    s.kind = ScheduleKind::dyadic;
    s.c = c;
    s.k_min = k_min;
    s.validate();
    return s;
  }

  static SelectorSchedule rider(double c, double alpha, std::int64_t k_min = 16) {
    SelectorSchedule s;
    s.kind = ScheduleKind::rider;
    s.c = c;
    s.alpha = alpha;
    s.k_min = k_min;
    s.validate();
    return s;
  }

  static SelectorSchedule constant(double delta, std::int64_t k_min = 1) {
    SelectorSchedule s;
    s.kind = ScheduleKind::constant;
    s.delta_const = delta;
    s.k_min = k_min;
    s.validate();
    return s;
  }

  static SelectorSchedule custom(std::vector<std::pair<std::int64_t, double>> table,
                                 std::int64_t k_min = 1) {
    SelectorSchedule s;
    s.kind = ScheduleKind::custom;
    s.table = std::move(table);
    s.k_min = k_min;
    s.validate();
    return s;
  }

  void validate() const {
    switch (kind) {
      case ScheduleKind::dyadic:
        if (!(c > 0.0)) throw std::invalid_argument("dyadic schedule: c must be > 0");
        if (k_min < 16) throw std::invalid_argument("dyadic schedule: k_min must be >= 16");
        break;
      case ScheduleKind::rider:
        if (!(c > 0.0)) throw std::invalid_argument("rider schedule: c must be > 0");
        if (!(alpha > 0.0)) throw std::invalid_argument("rider schedule: alpha must be > 0");
        if (k_min < 16) throw std::invalid_argument("rider schedule: k_min must be >= 16");
        break;
      case ScheduleKind::constant:
        if (!(delta_const >= 0.0 && delta_const <= 1.0))
          throw std::invalid_argument("constant schedule: delta must lie in [0, 1]");
        if (k_min < 1) throw std::invalid_argument("constant schedule: k_min must be >= 1");
        break;
      case ScheduleKind::custom: {
        if (table.empty()) throw std::invalid_argument("custom schedule: empty table");
        std::int64_t prev = 0;
        for (const auto& [k, d] : table) {
          if (k <= prev) throw std::invalid_argument("custom schedule: table keys must increase");
          if (!(d >= 0.0 && d <= 1.0))
            throw std::invalid_argument("custom schedule: table values must lie in [0, 1]");
          prev = k;
        }
        if (k_min < 1) throw std::invalid_argument("custom schedule: k_min must be >= 1");
        break;
      }
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["k_min"] = k_min;
    switch (kind) {
      case ScheduleKind::dyadic: j["c"] = c; break;
      case ScheduleKind::rider:
        j["c"] = c;
        j["alpha"] = alpha;
        break;
      case ScheduleKind::constant: j["delta"] = delta_const; break;
      case ScheduleKind::custom: {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& [k, d] : table) t.push_back({k, d});
        j["table"] = t;
        break;
      }
    }
    return j;
  }

  static SelectorSchedule from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dyadic")
      return dyadic(j.at("c").get<double>(), j.value("k_min", std::int64_t{16}));
    if (kind == "rider")
      return rider(j.at("c").get<double>(), j.at("alpha").get<double>(),
                   j.value("k_min", std::int64_t{16}));
    if (kind == "constant")
      return constant(j.at("delta").get<double>(), j.value("k_min", std::int64_t{1}));
    if (kind == "custom") {
      std::vector<std::pair<std::int64_t, double>> t;
      for (const auto& row : j.at("table"))
        t.emplace_back(row.at(0).get<std::int64_t>(), row.at(1).get<double>());
      return custom(std::move(t), j.value("k_min", std::int64_t{1}));
    }
    throw std::invalid_argument("schedule: unknown kind '" + kind + "'");
  }
};

/// Selector mean delta_k, clamped to [0, 1]. Throws std::domain_error for
/// k below the schedule's k_min.
inline double mean_at(const SelectorSchedule& s, std::int64_t k) {
  if (k < s.k_min)
    throw std::domain_error("mean_at: k = " + std::to_string(k) + " below k_min = " +
                            std::to_string(s.k_min));
  switch (s.kind) {
    case ScheduleKind::dyadic: {
      const int n = dyadic_block_of(k);
      return std::min(1.0, s.c * static_cast<double>(n) / std::ldexp(1.0, n));
    }
    case ScheduleKind::rider: {
      const double lk = std::log(static_cast<double>(k));
      const double llk = std::log(lk);
      return std::min(1.0, s.c * std::pow(lk, s.alpha) /
                               (static_cast<double>(k) * std::pow(llk, s.alpha + 1.0)));
    }
    case ScheduleKind::constant:
      return s.delta_const;
    case ScheduleKind::custom: {
      auto it = std::upper_bound(s.table.begin(), s.table.end(), k,
                                 [](std::int64_t v, const auto& row) { return v < row.first; });
      if (it == s.table.begin())
        throw std::domain_error("mean_at: k precedes first custom table breakpoint");
      return std::prev(it)->second;
    }
  }
  throw std::logic_error("mean_at: unreachable");
}

enum class CountMethod { exact_sum, simpson_log };

struct CountEstimate {
  double value = 0.0;
  CountMethod method = CountMethod::exact_sum;
};

namespace detail {

// Continuous rider density (clamped), integrated in the x = log t variable:
// integral of delta(t) dt = integral of min(e^x, c x^alpha / (log x)^{alpha+1}) dx.
inline double rider_integrand_logvar(double x, double c, double alpha) {
  const double formula = c * std::pow(x, alpha) / std::pow(std::log(x), alpha + 1.0);
  return std::min(std::exp(x), formula);
}

inline double simpson_logvar(double a, double b, double c, double alpha, int panels) {
  const double xa = std::log(a), xb = std::log(b);
  const double h = (xb - xa) / (2.0 * panels);
  double acc = rider_integrand_logvar(xa, c, alpha) + rider_integrand_logvar(xb, c, alpha);
  for (int i = 1; i < 2 * panels; ++i) {
    const double x = xa + h * i;
    acc += rider_integrand_logvar(x, c, alpha) * ((i % 2) ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Exact sum of a step schedule over integer interval [a, b]: one multiply per
// constant run, so it stays exact and O(#blocks) at any scale.
inline double step_schedule_sum(const SelectorSchedule& s, std::int64_t a, std::int64_t b) {
  double total = 0.0;
  std::int64_t k = a;
  while (k <= b) {
    const double d = mean_at(s, k);
    std::int64_t run_end = b;
    if (s.kind == ScheduleKind::dyadic) {
      const int n = dyadic_block_of(k);
      const std::int64_t block_end = (std::int64_t{1} << (n + 1)) - 1;
      run_end = std::min(b, block_end);
    } else if (s.kind == ScheduleKind::custom) {
      auto it = std::upper_bound(s.table.begin(), s.table.end(), k,
                                 [](std::int64_t v, const auto& row) { return v < row.first; });
      if (it != s.table.end()) run_end = std::min(b, it->first - 1);
    }
    total += d * static_cast<double>(run_end - k + 1);
    k = run_end + 1;
  }
  return total;
}

}  // namespace detail

constexpr std::int64_t kExactCountLimit = 10'000'000;

/// Expected number of selected integers in [a, b]: sum of delta_k.
///
/// Step schedules (dyadic, constant, custom) are summed exactly in closed
/// form. The rider schedule sums term-by-term up to 10^7 terms and falls back
/// to composite Simpson quadrature in the log variable beyond that; the
/// method used is recorded in the estimate.
inline CountEstimate expected_count(const SelectorSchedule& s, std::int64_t a, std::int64_t b) {
  if (a > b) return {0.0, CountMethod::exact_sum};
  if (a < s.k_min)
    throw std::domain_error("expected_count: interval start below schedule k_min");
  if (s.kind != ScheduleKind::rider)
    return {detail::step_schedule_sum(s, a, b), CountMethod::exact_sum};
  const std::int64_t terms = b - a + 1;
  if (terms <= kExactCountLimit) {
    long double acc = 0.0L;
    for (std::int64_t k = a; k <= b; ++k) acc += mean_at(s, k);
    return {static_cast<double>(acc), CountMethod::exact_sum};
  }
  // Midpoint-corrected endpoints approximate the lattice sum by the integral.
  const double value = detail::simpson_logvar(static_cast<double>(a) - 0.5,
                                              static_cast<double>(b) + 0.5, s.c, s.alpha, 4096);
  return {value, CountMethod::simpson_log};
}

/// Prefix mean sum sigma_j = delta_{k_min} + ... + delta_j (0 for j < k_min).
inline double sigma_prefix(const SelectorSchedule& s, std::int64_t j) {
  if (j < s.k_min) return 0.0;
  return expected_count(s, s.k_min, j).value;
}

}  // namespace thinsets

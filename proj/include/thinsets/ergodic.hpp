#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinsets/sampling.hpp"
#include "thinsets/stats.hpp"

namespace thinsets {

/// Ergodic mean A_N(t) = (1/|Lambda_N|) sum_{n in Lambda_N} e^{int} with
/// Lambda_N = Lambda intersect [1, N]. Empty Lambda_N is an error.
inline std::complex<double> ergodic_mean(const RandomSetSample& sample, std::int64_t N,
                                         double t) {
  const auto end = std::upper_bound(sample.elements.begin(), sample.elements.end(), N);
  const auto begin = std::lower_bound(sample.elements.begin(), sample.elements.end(),
                                      std::int64_t{1});
  const std::int64_t count = end - begin;
  if (count < 1) throw std::domain_error("ergodic_mean: Lambda intersect [1,N] is empty");
  std::complex<double> acc(0.0, 0.0);
  for (auto it = begin; it != end; ++it)
    acc += std::polar(1.0, static_cast<double>(*it) * t);
  return acc / static_cast<double>(count);
}

/// Per-N maxima of |A_N(t)| over a nonzero t grid, with a Kendall trend
/// statistic of the maxima against N (negative = decaying, the uniform
/// distribution diagnostic).
struct UniformDistributionScan {
  std::vector<std::int64_t> N_list;
  std::vector<double> max_abs;  // max over the grid, per N
  double kendall_tau = 0.0;

  void to_csv(std::ostream& os) const {
    os << "N,max_abs_ergodic_mean\n";
    for (std::size_t i = 0; i < N_list.size(); ++i)
      os << N_list[i] << "," << max_abs[i] << "\n";
  }
};

/// Default scan grid: t_j = j * pi / N_max for j = 1..N_max (spacing pi/N_max,
/// symmetric half (0, pi] suffices since |A_N(-t)| = |A_N(t)|).
inline std::vector<double> default_t_grid(std::int64_t n_max) {
  std::vector<double> grid;
  constexpr double pi = 3.14159265358979323846;
  for (std::int64_t j = 1; j <= n_max; ++j)
    grid.push_back(pi * static_cast<double>(j) / static_cast<double>(n_max));
  return grid;
}

inline UniformDistributionScan uniform_distribution_scan(const RandomSetSample& sample,
                                                         std::vector<std::int64_t> N_list,
                                                         std::vector<double> t_grid = {}) {
  if (N_list.empty()) throw std::invalid_argument("uniform_distribution_scan: empty N list");
  std::sort(N_list.begin(), N_list.end());
  const std::int64_t n_max = N_list.back();
  if (t_grid.empty()) t_grid = default_t_grid(n_max);
  constexpr double pi = 3.14159265358979323846;
  for (double t : t_grid)
    if (t == 0.0)
      throw std::invalid_argument("uniform_distribution_scan: t grid must exclude 0");
  std::sort(t_grid.begin(), t_grid.end());
  if (t_grid.front() > pi / static_cast<double>(n_max) + 1e-12)
    throw std::invalid_argument(
        "uniform_distribution_scan: t grid must reach down to pi / max(N)");

  UniformDistributionScan scan;
  scan.N_list = N_list;
  scan.max_abs.assign(N_list.size(), 0.0);

  // counts |Lambda_N| per N
  std::vector<double> counts(N_list.size());
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    const auto end =
        std::upper_bound(sample.elements.begin(), sample.elements.end(), N_list[i]);
    const std::int64_t c = end - std::lower_bound(sample.elements.begin(),
                                                  sample.elements.end(), std::int64_t{1});
    if (c < 1) throw std::domain_error("uniform_distribution_scan: empty Lambda_N");
    counts[i] = static_cast<double>(c);
  }

  // one pass over elements per t, reading off every N cut
  for (double t : t_grid) {
    std::complex<double> acc(0.0, 0.0);
    std::size_t ni = 0;
    for (std::size_t e = 0; e < sample.elements.size() && ni < N_list.size(); ++e) {
      const std::int64_t k = sample.elements[e];
      while (ni < N_list.size() && k > N_list[ni]) {
        scan.max_abs[ni] = std::max(scan.max_abs[ni], std::abs(acc) / counts[ni]);
        ++ni;
      }
      if (ni >= N_list.size()) break;
      if (k >= 1) acc += std::polar(1.0, static_cast<double>(k) * t);
    }
    while (ni < N_list.size()) {
      scan.max_abs[ni] = std::max(scan.max_abs[ni], std::abs(acc) / counts[ni]);
      ++ni;
    }
  }

  std::vector<double> ns(N_list.begin(), N_list.end());
  scan.kendall_tau = kendall_tau(ns, scan.max_abs);
  return scan;
}

/// Density ratios |E intersect [1,N]| / |Lambda intersect [1,N]| with the
/// running maximum as a limsup proxy; nullopt marks an undefined ratio.
struct UpperDensityReport {
  std::vector<std::int64_t> N_list;
  std::vector<std::optional<double>> ratios;
  double running_max = 0.0;
};

inline UpperDensityReport upper_density(std::span<const std::int64_t> E,
                                        std::span<const std::int64_t> Lambda,
                                        const std::vector<std::int64_t>& N_list) {
  const auto count_upto = [](std::span<const std::int64_t> xs, std::int64_t N) {
    return static_cast<double>(
        std::upper_bound(xs.begin(), xs.end(), N) -
        std::lower_bound(xs.begin(), xs.end(), std::int64_t{1}));
  };
  UpperDensityReport rep;
  rep.N_list = N_list;
  for (std::int64_t N : N_list) {
    const double denom = count_upto(Lambda, N);
    if (denom < 1.0) {
      rep.ratios.push_back(std::nullopt);
      continue;
    }
    const double r = count_upto(E, N) / denom;
    rep.ratios.push_back(r);
    rep.running_max = std::max(rep.running_max, r);
  }
  return rep;
}

enum class GrowthModel { poly_in_n, polylog_in_N };

/// Least-squares exponent fit: count ~ n^gamma (log-log axes) or
/// count ~ (log N)^gamma (log-loglog axes).
struct GrowthFit {
  GrowthModel model = GrowthModel::poly_in_n;
  double gamma = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;

  nlohmann::json to_json() const {
    return {{"schema_version", 1},
            {"model", model == GrowthModel::poly_in_n ? "poly_in_n" : "polylog_in_N"},
            {"gamma", gamma},
            {"r_squared", r_squared}};
  }
};

inline GrowthFit growth_fit(const std::vector<std::pair<double, double>>& points,
                            GrowthModel model) {
  if (points.size() < 3) throw std::invalid_argument("growth_fit: need at least 3 points");
  std::vector<double> xs, ys;
  for (const auto& [abscissa, count] : points) {
    if (!(count > 0.0)) throw std::invalid_argument("growth_fit: counts must be positive");
    if (!(abscissa > 0.0)) throw std::invalid_argument("growth_fit: abscissa must be positive");
    const double x = model == GrowthModel::poly_in_n ? std::log(abscissa)
                                                     : std::log(std::log(abscissa));
    xs.push_back(x);
    ys.push_back(std::log(count));
  }
  const auto fit = least_squares(xs, ys);
  GrowthFit out;
  out.model = model;
  out.gamma = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.points = points;
  return out;
}

}  // namespace thinsets

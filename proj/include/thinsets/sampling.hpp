#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinsets/rng.hpp"
#include "thinsets/schedule.hpp"

namespace thinsets {

/// One realization Lambda(omega): the integers k in [k_lo, k_hi] whose
/// selector fired. Immutable after creation; fully determined by
/// (schedule, range, seed).
struct RandomSetSample {
  std::vector<std::int64_t> elements;  // strictly increasing
  std::uint64_t seed = 0;
  SelectorSchedule schedule;
  std::int64_t k_lo = 0;
  std::int64_t k_hi = 0;
};

namespace detail {
// Domain separators so sampling and thinning decisions never collide.
constexpr std::uint64_t kSampleStream = 0x5e1ec70f5a3d01ULL;
constexpr std::uint64_t kThinStream = 0x7f1155ed5ee1ULL;
}  // namespace detail

inline RandomSetSample sample_set(const SelectorSchedule& schedule, std::int64_t k_lo,
                                  std::int64_t k_hi, std::uint64_t seed) {
  if (k_lo < schedule.k_min)
    throw std::domain_error("sample_set: range start below schedule k_min");
  if (k_hi - k_lo > 200'000'000)
    throw std::invalid_argument("sample_set: range too large for element-wise sampling");
  RandomSetSample out;
  out.seed = seed;
  out.schedule = schedule;
  out.k_lo = k_lo;
  out.k_hi = k_hi;
  const std::uint64_t key = derive_key(seed, detail::kSampleStream);
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    if (bernoulli_at(key, static_cast<std::uint64_t>(k), mean_at(schedule, k)))
      out.elements.push_back(k);
  }
  return out;
}

/// Independent second-stage thinning: keeps element k with probability
/// delta'_k / delta_k, so the result follows the selector law of the target
/// schedule and is a subset of the input by construction.
inline RandomSetSample thin(const RandomSetSample& sample, const SelectorSchedule& target,
                            std::uint64_t seed) {
  for (std::int64_t k = sample.k_lo; k <= sample.k_hi; ++k) {
    const double source_mean = mean_at(sample.schedule, k);
    const double target_mean = mean_at(target, k);
    if (target_mean > source_mean)
      throw std::invalid_argument("thin: target mean exceeds source mean at k = " +
                                  std::to_string(k));
  }
  RandomSetSample out;
  out.seed = seed;
  out.schedule = target;
  out.k_lo = sample.k_lo;
  out.k_hi = sample.k_hi;
  const std::uint64_t key = derive_key(seed, detail::kThinStream);
  for (std::int64_t k : sample.elements) {
    const double source_mean = mean_at(sample.schedule, k);
    const double ratio = source_mean > 0.0 ? mean_at(target, k) / source_mean : 0.0;
    if (bernoulli_at(key, static_cast<std::uint64_t>(k), ratio)) out.elements.push_back(k);
  }
  return out;
}

enum class BlockKind { dyadic_blocks, power_blocks };

/// Block partition of the integers: dyadic blocks [2^n, 2^{n+1}) or power
/// blocks [M_n, M_{n+1}) with M_n = round(n^{beta n}).
struct BlockGeometry {
  BlockKind kind = BlockKind::dyadic_blocks;
  double beta = 1.5;  // power_blocks only
  int n_lo = 4;
  int n_hi = 12;

  static BlockGeometry dyadic(int n_lo, int n_hi) {
    if (n_lo < 0 || n_hi < n_lo) throw std::invalid_argument("BlockGeometry: bad n range");
    return {BlockKind::dyadic_blocks, 0.0, n_lo, n_hi};
  }

  static BlockGeometry power(double beta, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("BlockGeometry: bad n range");
    if (!(beta > 0.0)) throw std::invalid_argument("BlockGeometry: beta must be > 0");
    BlockGeometry g{BlockKind::power_blocks, beta, n_lo, n_hi};
    g.block(n_hi);  // force the 64-bit representability check up front
    return g;
  }

  static std::int64_t power_bound(int n, double beta) {
    if (n < 1) throw std::invalid_argument("power_bound: n must be >= 1");
    const long double v = std::round(std::exp(beta * static_cast<long double>(n) *
                                              std::log(static_cast<long double>(n))));
    if (!(v < 9.0e18L))
      throw std::overflow_error("power_bound: M_" + std::to_string(n) +
                                " exceeds 64-bit range");
    return static_cast<std::int64_t>(v);
  }

  // Half-open block [lo, hi).
  std::pair<std::int64_t, std::int64_t> block(int n) const {
    if (kind == BlockKind::dyadic_blocks) {
      if (n < 0 || n > 61) throw std::invalid_argument("block: dyadic index out of range");
      return {std::int64_t{1} << n, std::int64_t{1} << (n + 1)};
    }
    return {power_bound(n, beta), power_bound(n + 1, beta)};
  }
};

/// Per-block element counts |sample ∩ block n| for n in the geometry range.
/// Every requested block must be covered by the sample's range.
inline std::vector<std::pair<int, std::int64_t>> block_counts(const RandomSetSample& sample,
                                                              const BlockGeometry& geometry) {
  std::string missing;
  for (int n = geometry.n_lo; n <= geometry.n_hi; ++n) {
    const auto [lo, hi] = geometry.block(n);
    if (lo < sample.k_lo || hi - 1 > sample.k_hi) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(n);
    }
  }
  if (!missing.empty())
    throw std::invalid_argument("block_counts: blocks outside sample range: " + missing);
  std::vector<std::pair<int, std::int64_t>> out;
  for (int n = geometry.n_lo; n <= geometry.n_hi; ++n) {
    const auto [lo, hi] = geometry.block(n);
    const auto first = std::lower_bound(sample.elements.begin(), sample.elements.end(), lo);
    const auto last = std::lower_bound(sample.elements.begin(), sample.elements.end(), hi);
    out.emplace_back(n, static_cast<std::int64_t>(last - first));
  }
  return out;
}

/// Set file format: one JSON header line {schema_version, schedule, seed,
/// range}, then one decimal element per line.
inline void write_set(std::ostream& os, const RandomSetSample& sample) {
  nlohmann::json header;
  header["schema_version"] = 1;
  header["schedule"] = sample.schedule.to_json();
  header["seed"] = sample.seed;
  header["range"] = {sample.k_lo, sample.k_hi};
  os << header.dump() << "\n";
  for (std::int64_t k : sample.elements) os << k << "\n";
}

inline void write_set_file(const std::string& path, const RandomSetSample& sample) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_set_file: cannot open " + path);
  write_set(os, sample);
}

inline RandomSetSample read_set(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_set: missing header line");
  const auto header = nlohmann::json::parse(line);
  RandomSetSample s;
  s.schedule = SelectorSchedule::from_json(header.at("schedule"));
  s.seed = header.at("seed").get<std::uint64_t>();
  s.k_lo = header.at("range").at(0).get<std::int64_t>();
  s.k_hi = header.at("range").at(1).get<std::int64_t>();
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::int64_t k = std::stoll(line);
    if (k <= prev) throw std::runtime_error("read_set: elements not strictly increasing");
    if (k < s.k_lo || k > s.k_hi) throw std::runtime_error("read_set: element outside range");
    s.elements.push_back(k);
    prev = k;
  }
  return s;
}

inline RandomSetSample read_set_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_set_file: cannot open " + path);
  return read_set(is);
}

}  // namespace thinsets

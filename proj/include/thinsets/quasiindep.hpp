#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thinsets/norms.hpp"
#include "thinsets/parallel.hpp"
#include "thinsets/rng.hpp"
#include "thinsets/sampling.hpp"
#include "thinsets/schedule.hpp"

namespace thinsets {

struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A signed combination sum theta_k * k = 0 with theta_k in {-1, +1} over
/// distinct elements of the host set; length = number of terms (>= 2).
struct Relation {
  std::vector<std::pair<std::int64_t, int>> terms;  // (element, sign), sorted by element

  int length() const { return static_cast<int>(terms.size()); }

  bool valid() const {
    if (terms.size() < 2) return false;
    __int128 acc = 0;
    std::int64_t prev = 0;
    for (const auto& [k, s] : terms) {
      if (k <= prev || (s != 1 && s != -1)) return false;
      acc += static_cast<__int128>(s) * k;
      prev = k;
    }
    return acc == 0;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, s] : terms) j[std::to_string(k)] = s;
    return j;
  }
};

namespace detail {

constexpr std::int64_t kBitsetSumCap = std::int64_t{1} << 22;
constexpr std::size_t kMitmEntryCap = 4'000'000;
constexpr std::size_t kRelationSearchCap = 40;
constexpr std::size_t kExactSubsetCap = 20;

inline std::vector<std::int64_t> canonical_set(std::span<const std::int64_t> a) {
  std::vector<std::int64_t> v(a.begin(), a.end());
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0) throw std::invalid_argument("relation search: elements must be positive");
    if (i > 0 && v[i] == v[i - 1])
      throw std::invalid_argument("relation search: elements must be distinct");
  }
  return v;
}

inline std::int64_t abs_sum(std::span<const std::int64_t> a) {
  __int128 s = 0;
  for (std::int64_t x : a) s += x;
  if (s > (__int128{1} << 62)) throw capacity_error("relation search: element sum too large");
  return static_cast<std::int64_t>(s);
}

// Set of signed-subset sums as a bitmap over [-span, span]. Adding an element
// e maps R to R | (R << e) | (R >> e); membership of e in the prefix set is
// exactly "the prefix closes a relation ending at e".
class ReachableSums {
 public:
  explicit ReachableSums(std::int64_t span)
      : span_(span), bits_(static_cast<std::size_t>((2 * span + 1 + 63) / 64), 0) {
    set_bit(0);  // the empty combination
  }

  static ReachableSums empty_of_span(std::int64_t span) {
    ReachableSums r(span);
    std::fill(r.bits_.begin(), r.bits_.end(), 0);
    return r;
  }

  bool contains(std::int64_t sum) const {
    if (sum < -span_ || sum > span_) return false;
    const std::uint64_t idx = static_cast<std::uint64_t>(sum + span_);
    return (bits_[idx >> 6] >> (idx & 63)) & 1u;
  }

  void add_element(std::int64_t e) {
    std::vector<std::uint64_t> next = bits_;
    or_shifted(bits_, next, e);
    or_shifted(bits_, next, -e);
    bits_ = std::move(next);
  }

  // this |= shift(other, +e) | shift(other, -e); the count-tracked DP step.
  void or_shifted_from(const ReachableSums& other, std::int64_t e) {
    or_shifted(other.bits_, bits_, e);
    or_shifted(other.bits_, bits_, -e);
  }

 private:
  void set_bit(std::int64_t sum) {
    const std::uint64_t idx = static_cast<std::uint64_t>(sum + span_);
    bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
  }

  static void or_shifted(const std::vector<std::uint64_t>& src, std::vector<std::uint64_t>& dst,
                         std::int64_t shift) {
    if (shift >= 0) {
      const std::size_t wo = static_cast<std::size_t>(shift >> 6);
      const unsigned bo = static_cast<unsigned>(shift & 63);
      for (std::size_t i = src.size(); i-- > 0;) {
        if (src[i] == 0) continue;
        const std::size_t j = i + wo;
        if (j < dst.size()) dst[j] |= src[i] << bo;
        if (bo && j + 1 < dst.size()) dst[j + 1] |= src[i] >> (64 - bo);
      }
    } else {
      const std::int64_t s = -shift;
      const std::size_t wo = static_cast<std::size_t>(s >> 6);
      const unsigned bo = static_cast<unsigned>(s & 63);
      for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == 0) continue;
        if (i >= wo) dst[i - wo] |= src[i] >> bo;
        if (bo && i >= wo + 1) dst[i - wo - 1] |= src[i] << (64 - bo);
      }
    }
  }

  std::int64_t span_;
  std::vector<std::uint64_t> bits_;
};

// Witness reconstruction: signs over elems with exactly `count` nonzeros
// (count < 0 = unrestricted) summing to target. Recomputes prefix
// reachability per step; runs only on forward-scan hits.
inline std::optional<std::vector<int>> backtrack_signs(std::span<const std::int64_t> elems,
                                                       std::int64_t target, int count,
                                                       std::int64_t span) {
  const std::size_t m = elems.size();
  const auto states_upto = [&](std::size_t j) {
    std::vector<ReachableSums> st;
    if (count < 0) {
      st.emplace_back(span);
      for (std::size_t i = 0; i < j; ++i) st[0].add_element(elems[i]);
    } else {
      st.emplace_back(span);
      for (int c = 1; c <= count; ++c) st.push_back(ReachableSums::empty_of_span(span));
      for (std::size_t i = 0; i < j; ++i)
        for (int c = count; c >= 1; --c)
          st[static_cast<std::size_t>(c)].or_shifted_from(st[static_cast<std::size_t>(c - 1)],
                                                          elems[i]);
    }
    return st;
  };

  std::vector<int> signs(m, 0);
  std::int64_t t = target;
  int c = count;
  for (std::size_t j = m; j-- > 0;) {
    const auto prev = states_upto(j);
    const bool zero_ok =
        count < 0 ? prev[0].contains(t) : prev[static_cast<std::size_t>(c)].contains(t);
    if (zero_ok) {
      signs[j] = 0;
      continue;
    }
    if (count >= 0 && c == 0) return std::nullopt;
    const auto& down = count < 0 ? prev[0] : prev[static_cast<std::size_t>(c - 1)];
    if (down.contains(t - elems[j])) {
      signs[j] = 1;
      t -= elems[j];
      if (count >= 0) --c;
    } else if (down.contains(t + elems[j])) {
      signs[j] = -1;
      t += elems[j];
      if (count >= 0) --c;
    } else {
      return std::nullopt;
    }
  }
  if (t != 0 || (count >= 0 && c != 0)) return std::nullopt;
  return signs;
}

inline Relation make_relation(std::span<const std::int64_t> elems, const std::vector<int>& signs) {
  Relation r;
  for (std::size_t j = 0; j < elems.size(); ++j)
    if (signs[j] != 0) r.terms.emplace_back(elems[j], signs[j]);
  if (!r.valid()) throw std::logic_error("relation search: produced invalid relation");
  return r;
}

// --- meet-in-the-middle fallback for large element magnitudes ---

inline int popcount_code(unsigned __int128 code) {
  int c = 0;
  while (code) {
    if (code & 3u) ++c;
    code >>= 2;
  }
  return c;
}

// Signed sums of one half. Codes pack 2 bits per element (0/1/2 = 0/+1/-1).
// In count-limited mode one representative is kept per (sum, count) pair with
// count <= limit; otherwise one per sum.
struct HalfTable {
  std::unordered_map<std::int64_t, std::vector<std::pair<int, unsigned __int128>>> reps;
  std::vector<std::int64_t> order;  // distinct sums in first-insertion order
  std::size_t entries = 0;

  const unsigned __int128* find(std::int64_t sum, int count) const {
    auto it = reps.find(sum);
    if (it == reps.end()) return nullptr;
    for (const auto& [c, code] : it->second)
      if (count < 0 || c == count) return &code;
    return nullptr;
  }

  // A nonzero-count representation of zero (relation inside this half);
  // count < 0 accepts any positive count.
  const unsigned __int128* nontrivial_zero(int count) const {
    auto it = reps.find(0);
    if (it == reps.end()) return nullptr;
    for (const auto& [c, code] : it->second)
      if (c >= 1 && (count < 0 || c == count)) return &code;
    return nullptr;
  }
};

inline HalfTable enumerate_half(std::span<const std::int64_t> elems, int limit) {
  HalfTable table;
  table.reps[0].emplace_back(0, 0);
  table.order.push_back(0);
  table.entries = 1;
  std::vector<std::tuple<std::int64_t, int, unsigned __int128>> pending;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    pending.clear();
    for (std::int64_t s : table.order) {
      for (const auto& [c, code] : table.reps.at(s)) {
        if (limit >= 0 && c >= limit) continue;
        const unsigned __int128 plus = code | (static_cast<unsigned __int128>(1) << (2 * i));
        const unsigned __int128 minus = code | (static_cast<unsigned __int128>(2) << (2 * i));
        pending.emplace_back(s + elems[i], c + 1, plus);
        pending.emplace_back(s - elems[i], c + 1, minus);
      }
    }
    for (const auto& [s, c, code] : pending) {
      auto& list = table.reps[s];
      if (list.empty()) table.order.push_back(s);
      const bool track_counts = limit >= 0;
      bool present = false;
      for (const auto& [c0, code0] : list)
        if (!track_counts || c0 == c) {
          present = true;
          break;
        }
      if (!present) {
        list.emplace_back(c, code);
        if (++table.entries > kMitmEntryCap)
          throw capacity_error("relation search: meet-in-the-middle table overflow");
      }
    }
  }
  return table;
}

inline void decode_half(unsigned __int128 code, std::span<const std::int64_t> elems,
                        std::vector<int>& signs, std::size_t offset) {
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const unsigned trit = static_cast<unsigned>((code >> (2 * i)) & 3u);
    signs[offset + i] = trit == 1 ? 1 : trit == 2 ? -1 : 0;
  }
}

// Shared MITM driver: any relation when length < 0, else exactly `length`
// nonzero signs.
inline std::optional<Relation> mitm_relation(std::span<const std::int64_t> elems, int length) {
  const std::size_t h = elems.size() / 2;
  const std::span left(elems.data(), h);
  const std::span right(elems.data() + h, elems.size() - h);
  const auto t1 = enumerate_half(left, length);
  const auto t2 = enumerate_half(right, length);
  std::vector<int> signs(elems.size(), 0);
  if (const auto* z = t1.nontrivial_zero(length)) {
    decode_half(*z, left, signs, 0);
    return make_relation(elems, signs);
  }
  if (const auto* z = t2.nontrivial_zero(length)) {
    decode_half(*z, right, signs, h);
    return make_relation(elems, signs);
  }
  for (std::int64_t s : t1.order) {
    if (s == 0) continue;
    for (const auto& [c1, code1] : t1.reps.at(s)) {
      const int want = length < 0 ? -1 : length - c1;
      if (length >= 0 && (want < 1 || c1 < 1)) continue;
      if (const auto* code2 = t2.find(-s, want)) {
        std::fill(signs.begin(), signs.end(), 0);
        decode_half(code1, left, signs, 0);
        decode_half(*code2, right, signs, h);
        return make_relation(elems, signs);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Any nontrivial relation in A, or nullopt if A is quasi-independent.
/// Signed-subset-sum reachability when the element sum is desk-scale, a
/// meet-in-the-middle hash join otherwise. |A| <= 40.
inline std::optional<Relation> find_relation(std::span<const std::int64_t> a) {
  const auto elems = detail::canonical_set(a);
  if (elems.size() > detail::kRelationSearchCap)
    throw capacity_error("find_relation: |A| > 40; use the greedy pipeline");
  if (elems.size() < 2) return std::nullopt;
  const std::int64_t span = detail::abs_sum(elems);

  if (span <= detail::kBitsetSumCap) {
    detail::ReachableSums reach(span);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (reach.contains(elems[i])) {
        auto signs = detail::backtrack_signs(std::span(elems).first(i), elems[i], -1, span);
        if (!signs) throw std::logic_error("find_relation: backtracking failed");
        std::vector<int> full(elems.size(), 0);
        std::copy(signs->begin(), signs->end(), full.begin());
        full[i] = -1;  // prefix combo sums to +a_i; close with -a_i
        return detail::make_relation(elems, full);
      }
      reach.add_element(elems[i]);
    }
    return std::nullopt;
  }

  if (elems.size() > 26)
    throw capacity_error("find_relation: element magnitudes too large for exact search");
  return detail::mitm_relation(elems, -1);
}

/// Existence-only search for a relation of exactly n nonzero signs; spares
/// the witness reconstruction on the Monte Carlo hot path.
inline bool contains_relation_of_length(std::span<const std::int64_t> a, int n) {
  const auto elems = detail::canonical_set(a);
  if (n < 2 || static_cast<std::size_t>(n) > elems.size()) return false;
  if (elems.size() > detail::kRelationSearchCap)
    throw capacity_error("relation search: |A| > 40");
  const std::int64_t span = detail::abs_sum(elems);

  if (span <= detail::kBitsetSumCap) {
    std::vector<detail::ReachableSums> levels;
    levels.emplace_back(span);
    for (int c = 1; c < n; ++c) levels.push_back(detail::ReachableSums::empty_of_span(span));
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (levels[static_cast<std::size_t>(n - 1)].contains(elems[i])) return true;
      for (int c = n - 1; c >= 1; --c)
        levels[static_cast<std::size_t>(c)].or_shifted_from(
            levels[static_cast<std::size_t>(c - 1)], elems[i]);
    }
    return false;
  }
  return detail::mitm_relation(elems, n).has_value();
}

/// A relation of exactly n nonzero signs, or nullopt.
inline std::optional<Relation> find_relation_of_length(std::span<const std::int64_t> a, int n) {
  if (n < 2) throw std::invalid_argument("find_relation_of_length: n must be >= 2");
  const auto elems = detail::canonical_set(a);
  if (elems.size() > detail::kRelationSearchCap)
    throw capacity_error("find_relation_of_length: |A| > 40");
  if (static_cast<std::size_t>(n) > elems.size()) return std::nullopt;
  const std::int64_t span = detail::abs_sum(elems);

  if (span <= detail::kBitsetSumCap) {
    std::vector<detail::ReachableSums> levels;
    levels.emplace_back(span);
    for (int c = 1; c < n; ++c) levels.push_back(detail::ReachableSums::empty_of_span(span));
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (levels[static_cast<std::size_t>(n - 1)].contains(elems[i])) {
        auto signs = detail::backtrack_signs(std::span(elems).first(i), elems[i], n - 1, span);
        if (!signs) throw std::logic_error("find_relation_of_length: backtracking failed");
        std::vector<int> full(elems.size(), 0);
        std::copy(signs->begin(), signs->end(), full.begin());
        full[i] = -1;
        return detail::make_relation(elems, full);
      }
      for (int c = n - 1; c >= 1; --c)
        levels[static_cast<std::size_t>(c)].or_shifted_from(
            levels[static_cast<std::size_t>(c - 1)], elems[i]);
    }
    return std::nullopt;
  }
  return detail::mitm_relation(elems, n);
}

/// Maximum-cardinality quasi-independent subset by include-first
/// branch-and-bound; ties resolve to the lexicographically smallest sorted
/// subset because that branch is explored first. |A| <= 20.
inline std::vector<std::int64_t> max_qi_subset_exact(std::span<const std::int64_t> a) {
  const auto elems = detail::canonical_set(a);
  if (elems.size() > detail::kExactSubsetCap)
    throw capacity_error("max_qi_subset_exact: |A| > 20");
  if (elems.empty()) return {};
  const std::int64_t span = detail::abs_sum(elems);
  if (span > detail::kBitsetSumCap)
    throw capacity_error("max_qi_subset_exact: element magnitudes too large");

  std::vector<std::int64_t> best, current;
  std::vector<detail::ReachableSums> stack;
  stack.emplace_back(span);

  const std::size_t m = elems.size();
  auto dfs = [&](auto&& self, std::size_t idx) -> void {
    if (current.size() + (m - idx) <= best.size()) return;
    if (idx == m) {
      if (current.size() > best.size()) best = current;
      return;
    }
    if (!stack.back().contains(elems[idx])) {
      detail::ReachableSums next = stack.back();
      next.add_element(elems[idx]);
      stack.push_back(std::move(next));
      current.push_back(elems[idx]);
      self(self, idx + 1);
      current.pop_back();
      stack.pop_back();
    }
    self(self, idx + 1);
  };
  dfs(dfs, 0);
  return best;
}

/// Greedy quasi-independent extraction report, compared against the
/// delta * (|A| / Psi_A)^2 target of the extraction inequality.
struct ExtractionReport {
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  double psi_a = 0.0;
  double bound_37 = 0.0;  // delta_cfg * (|A| / Psi_A)^2
  double ratio = 0.0;     // output_size / input_size
  double delta_cfg = 0.0;
  bool verified_qi = false;

  nlohmann::json to_json() const {
    return {{"schema_version", 1}, {"input_size", input_size},
            {"output_size", output_size}, {"psi_a", psi_a},
            {"bound_37", bound_37},   {"ratio", ratio},
            {"delta_cfg", delta_cfg}, {"verified_qi", verified_qi}};
  }
};

/// Scans A in increasing order, accepting each element unless it closes a
/// relation with the accepted prefix; the check is exact at every step via
/// signed-sum reachability, and the output is re-verified before reporting.
inline std::pair<std::vector<std::int64_t>, ExtractionReport> extract_greedy(
    std::span<const std::int64_t> a, const OrliczConfig& cfg = {}, double delta_cfg = 0.05) {
  const auto elems = detail::canonical_set(a);
  ExtractionReport rep;
  rep.input_size = elems.size();
  rep.delta_cfg = delta_cfg;
  if (elems.empty()) {
    rep.ratio = 1.0;
    rep.verified_qi = true;
    return {{}, rep};
  }
  const std::int64_t span = detail::abs_sum(elems);
  if (span > detail::kBitsetSumCap)
    throw capacity_error("extract_greedy: element magnitudes too large");

  detail::ReachableSums reach(span);
  std::vector<std::int64_t> out;
  for (std::int64_t e : elems) {
    if (!reach.contains(e)) {
      out.push_back(e);
      reach.add_element(e);
    }
  }

  // Emission re-check from a fresh state.
  detail::ReachableSums verify(span);
  for (std::int64_t e : out) {
    if (verify.contains(e)) throw std::logic_error("extract_greedy: output failed verification");
    verify.add_element(e);
  }

  rep.output_size = out.size();
  rep.psi_a = psi_A(elems, cfg).value;
  rep.bound_37 = rep.psi_a > 0.0
                     ? delta_cfg * std::pow(static_cast<double>(elems.size()) / rep.psi_a, 2.0)
                     : 0.0;
  rep.ratio = static_cast<double>(out.size()) / static_cast<double>(elems.size());
  rep.verified_qi = true;
  return {out, rep};
}

/// Empirical square-root property: random subsets A of E, exact maximum QI
/// subset B, statistics of |B| / sqrt(|A|).
struct SqrtPropertyReport {
  std::size_t samples = 0;
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  std::vector<std::pair<std::size_t, double>> per_sample;  // (|A|, ratio)
};

inline SqrtPropertyReport sqrt_property_check(std::span<const std::int64_t> E,
                                              std::size_t sample_count,
                                              std::size_t max_subset_size, std::uint64_t seed) {
  if (max_subset_size > detail::kExactSubsetCap)
    throw std::invalid_argument("sqrt_property_check: max_subset_size must be <= 20");
  if (E.empty()) throw std::invalid_argument("sqrt_property_check: E must be nonempty");
  SqrtPropertyReport rep;
  rep.samples = sample_count;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t t = 0; t < sample_count; ++t) {
    CounterRng rng = CounterRng::keyed(seed, t);
    const std::size_t cap = std::min(max_subset_size, E.size());
    const std::size_t want = 1 + static_cast<std::size_t>(rng.next_u64() % cap);
    // Floyd's sampler over indices of E
    std::vector<std::size_t> chosen;
    for (std::size_t i = E.size() - want; i < E.size(); ++i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end())
        chosen.push_back(i);
      else
        chosen.push_back(j);
    }
    std::vector<std::int64_t> A;
    for (std::size_t idx : chosen) A.push_back(E[idx]);
    std::sort(A.begin(), A.end());
    const auto B = max_qi_subset_exact(A);
    const double ratio = static_cast<double>(B.size()) / std::sqrt(static_cast<double>(A.size()));
    rep.per_sample.emplace_back(A.size(), ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    acc += ratio;
  }
  rep.mean_ratio = acc / static_cast<double>(sample_count);
  return rep;
}

/// Monte Carlo estimate of P(sample over (M, K] holds a relation of length n)
/// against the bound (C/n)^n * sum_{j > M} delta_j^2 sigma_j^{n-2}.
struct RelationProbabilityReport {
  int n = 0;
  std::int64_t M = 0;
  std::int64_t K = 0;
  std::int64_t trials = 0;
  std::int64_t discarded = 0;
  double empirical_p = 0.0;
  double bound_sum = 0.0;  // sum delta_j^2 sigma_j^{n-2} over (M, K]
  std::vector<double> c_grid;
  std::vector<bool> c_admissible;  // bound(C) >= empirical_p
  double smallest_admissible_c = std::numeric_limits<double>::quiet_NaN();
  double c_star = 0.0;  // analytic C equating bound and empirical probability

  double bound_at(double c) const {
    return std::pow(c / static_cast<double>(n), n) * bound_sum;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", 1},
                     {"n", n},
                     {"M", M},
                     {"K", K},
                     {"trials", trials},
                     {"discarded", discarded},
                     {"empirical_p", empirical_p},
                     {"bound_sum", bound_sum},
                     {"c_star", c_star}};
    j["c_grid"] = c_grid;
    std::vector<int> adm;
    for (bool b : c_admissible) adm.push_back(b ? 1 : 0);
    j["c_admissible"] = adm;
    j["smallest_admissible_c"] = std::isnan(smallest_admissible_c)
                                     ? nlohmann::json(nullptr)
                                     : nlohmann::json(smallest_admissible_c);
    return j;
  }
};

inline RelationProbabilityReport relation_probability_experiment(
    const SelectorSchedule& schedule, int n, std::int64_t M, std::int64_t K,
    std::int64_t trials, std::uint64_t seed, std::vector<double> c_grid) {
  if (n < 2 || n > 6)
    throw std::invalid_argument("relation_probability_experiment: n must lie in [2, 6]");
  if (M + 1 < schedule.k_min)
    throw std::domain_error("relation_probability_experiment: M below schedule k_min");
  if (K <= M) throw std::invalid_argument("relation_probability_experiment: need K > M");

  RelationProbabilityReport rep;
  rep.n = n;
  rep.M = M;
  rep.K = K;
  rep.trials = trials;
  rep.c_grid = std::move(c_grid);

  double sigma = sigma_prefix(schedule, M);
  for (std::int64_t j = M + 1; j <= K; ++j) {
    const double d = mean_at(schedule, j);
    sigma += d;
    rep.bound_sum += d * d * std::pow(sigma, n - 2);
  }

  std::vector<int> outcome(static_cast<std::size_t>(trials), 0);  // 0 miss, 1 hit, 2 discard
  parallel_chunks(trials, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t t = lo; t < hi; ++t) {
      const auto s =
          sample_set(schedule, M + 1, K, derive_key(seed, static_cast<std::uint64_t>(t)));
      if (s.elements.size() > detail::kRelationSearchCap) {
        outcome[static_cast<std::size_t>(t)] = 2;
        continue;
      }
      outcome[static_cast<std::size_t>(t)] = contains_relation_of_length(s.elements, n) ? 1 : 0;
    }
  });

  std::int64_t hits = 0;
  for (int o : outcome) {
    if (o == 2) ++rep.discarded;
    else if (o == 1) ++hits;
  }
  const std::int64_t retained = trials - rep.discarded;
  rep.empirical_p = retained > 0 ? static_cast<double>(hits) / static_cast<double>(retained) : 0.0;

  for (double c : rep.c_grid) {
    const bool ok = rep.bound_at(c) >= rep.empirical_p;
    rep.c_admissible.push_back(ok);
    if (ok && (std::isnan(rep.smallest_admissible_c) || c < rep.smallest_admissible_c))
      rep.smallest_admissible_c = c;
  }
  rep.c_star = (rep.empirical_p > 0.0 && rep.bound_sum > 0.0)
                   ? static_cast<double>(n) *
                         std::pow(rep.empirical_p / rep.bound_sum, 1.0 / static_cast<double>(n))
                   : 0.0;
  return rep;
}

}  // namespace thinsets

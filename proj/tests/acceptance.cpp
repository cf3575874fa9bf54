// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Tolerances are pinned in code next to each check; seeds are the
// shipped reproducible configuration.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "thinsets/concentration.hpp"
#include "thinsets/ergodic.hpp"
#include "thinsets/experiments.hpp"
#include "thinsets/norms.hpp"
#include "thinsets/parallel.hpp"
#include "thinsets/quasiindep.hpp"
#include "thinsets/sampling.hpp"
#include "thinsets/schedule.hpp"
#include "thinsets/ucconst.hpp"
#include "thinsets/weak_l2.hpp"

using namespace thinsets;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::int64_t> dyadic_block(int n) {
  std::vector<std::int64_t> a;
  for (std::int64_t k = std::int64_t{1} << n; k < std::int64_t{1} << (n + 1); ++k)
    a.push_back(k);
  return a;
}

std::vector<std::int64_t> random_set(std::size_t size, std::int64_t max_value,
                                     std::uint64_t seed) {
  CounterRng rng = CounterRng::keyed(seed, 0x5e7);
  std::set<std::int64_t> s;
  while (s.size() < size) s.insert(1 + static_cast<std::int64_t>(rng.next_u64() % max_value));
  return {s.begin(), s.end()};
}

// 3^|A| brute force: relation existence and achievable lengths.
struct BruteForce {
  bool any = false;
  std::set<int> lengths;
};

BruteForce brute_force(const std::vector<std::int64_t>& a) {
  BruteForce out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < a.size(); ++i) total *= 3;
  for (std::size_t code = 1; code < total; ++code) {
    std::size_t c = code;
    long long sum = 0;
    int nonzero = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int trit = static_cast<int>(c % 3);
      c /= 3;
      if (trit == 1) {
        sum += a[i];
        ++nonzero;
      } else if (trit == 2) {
        sum -= a[i];
        ++nonzero;
      }
    }
    if (sum == 0 && nonzero > 0) {
      out.any = true;
      out.lengths.insert(nonzero);
    }
  }
  return out;
}

// The twelve frames of criteria 2 and 3: identity, scaled-identity and
// repeated-direction coordinate frames plus exponential block frames.
std::vector<std::pair<std::string, BanachFrame>> acceptance_frames() {
  std::vector<std::pair<std::string, BanachFrame>> frames;
  for (std::size_t n : {1u, 2u, 8u, 32u}) {
    std::vector<std::vector<double>> vecs(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) vecs[j][j] = 1.0;
    frames.emplace_back("coord_identity_" + std::to_string(n),
                        BanachFrame::coordinate(std::move(vecs)));
  }
  for (std::size_t n : {2u, 8u, 32u}) {
    std::vector<std::vector<double>> vecs(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) vecs[j][j] = 1.0 / std::sqrt(double(n));
    frames.emplace_back("coord_scaled_" + std::to_string(n),
                        BanachFrame::coordinate(std::move(vecs)));
  }
  for (std::size_t n : {8u, 32u}) {
    std::vector<std::vector<double>> vecs(n, std::vector<double>(1, 1.0));
    frames.emplace_back("coord_repeated_" + std::to_string(n),
                        BanachFrame::coordinate(std::move(vecs)));
  }
  frames.emplace_back("exp_1", BanachFrame::exponential({1}));
  frames.emplace_back("exp_8", BanachFrame::exponential(dyadic_block(3)));
  frames.emplace_back("exp_64", BanachFrame::exponential(dyadic_block(6)));
  return frames;
}

// criterion 1: closed-form Orlicz norm and homogeneity
Outcome criterion1() {
  const double inv_sqrt_ln2 = 1.0 / std::sqrt(std::log(2.0));
  const double got = luxemburg_psi2(TrigPolynomial::constant(1.0)).value;
  if (std::abs(got - inv_sqrt_ln2) > 1e-6)
    return {false, "constant norm " + std::to_string(got)};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    TrigPolynomial f;
    CounterRng rng = CounterRng::keyed(0xc1, i);
    const int degree = 4 + static_cast<int>(rng.next_u64() % 60);
    for (std::int64_t k = -degree; k <= degree; ++k)
      if (rng.next_uniform() < 0.4) f.set(k, {rng.next_gaussian(), rng.next_gaussian()});
    if (f.empty()) f.set(0, 1.0);
    const double base = luxemburg_psi2(f).value;
    for (double lambda : {0.1, 3.0, 17.0}) {
      TrigPolynomial g;
      for (const auto& [k, c] : f.coeffs()) g.set(k, lambda * c);
      const double scaled = luxemburg_psi2(g).value;
      worst = std::max(worst, std::abs(scaled - lambda * base) / (lambda * base));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "constant within 1e-6, homogeneity worst rel err %.2e", worst);
  return {worst <= 1e-9, buf};
}

// criterion 2: self-bounding condition, zero violations on 12 frames
Outcome criterion2() {
  std::int64_t violations = 0;
  std::string worst_frame;
  for (const auto& [name, frame] : acceptance_frames()) {
    const auto rep = blm_condition_check(frame, VariateKind::rademacher, 10'000, 0xb1);
    if (rep.violations > 0) {
      violations += rep.violations;
      worst_frame += " " + name;
    }
  }
  return {violations == 0,
          violations == 0 ? "0 violations over 12 frames x 10^4 trials"
                          : std::to_string(violations) + " violations:" + worst_frame};
}

// criterion 3: tail domination at every grid point, both variates
Outcome criterion3() {
  std::string failures;
  for (const auto& [name, frame] : acceptance_frames()) {
    for (auto variate : {VariateKind::rademacher, VariateKind::gaussian}) {
      const auto rep = tail_experiment(frame, variate, 100'000, {}, 0x7a11);
      for (std::size_t i = 0; i < rep.t_grid.size(); ++i) {
        const double slack = 3.0 * rep.mc_stderr[i];
        if (variate == VariateKind::rademacher &&
            rep.empirical_survival[i] > rep.bound_24[i] + slack)
          failures += " " + name + "/24";
        if (variate == VariateKind::gaussian &&
            rep.empirical_survival[i] > rep.bound_23[i] + slack)
          failures += " " + name + "/23";
      }
    }
  }
  return {failures.empty(),
          failures.empty() ? "survival dominated on 12 frames x 2 variates x 20 t" : failures};
}

// criterion 4: exact agreement with 3^|A| brute force on 500 sets
Outcome criterion4() {
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const std::size_t size = 4 + i % 9;  // |A| <= 12
    const auto a = random_set(size, 40 + 15 * (i % 11), 0x400 + i);
    const auto oracle = brute_force(a);
    if (find_relation(a).has_value() != oracle.any) ++mismatches;
    for (int n = 2; n <= static_cast<int>(a.size()); ++n)
      if (find_relation_of_length(a, n).has_value() != (oracle.lengths.count(n) > 0))
        ++mismatches;
  }
  return {mismatches == 0, mismatches == 0 ? "500 sets, existence and all lengths agree"
                                           : std::to_string(mismatches) + " mismatches"};
}

// criterion 5: greedy extraction vs exact maximum on 100 blocks
Outcome criterion5() {
  int below_half = 0, unverified = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const int n = 6 + static_cast<int>(i % 7);
    auto sample = sample_set(SelectorSchedule::dyadic(1.2),
                             std::int64_t{1} << n, (std::int64_t{1} << (n + 1)) - 1, 0x500 + i);
    auto block = sample.elements;
    if (block.size() > 20) block.resize(20);
    if (block.empty()) block = {std::int64_t{1} << n};
    const auto [greedy, rep] = extract_greedy(block);
    const auto exact = max_qi_subset_exact(block);
    if (2 * greedy.size() < exact.size()) ++below_half;
    if (!rep.verified_qi || find_relation(greedy).has_value()) ++unverified;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "below-half %d, unverified %d over 100 blocks", below_half,
                unverified);
  return {below_half == 0 && unverified == 0, buf};
}

// criterion 6: weak-l2 envelope constant bounded across block sizes
Outcome criterion6() {
  double lo = 1e300, hi = 0.0;
  std::string values;
  for (int n : {4, 6, 8, 10}) {  // |A| = 16, 64, 256, 1024
    const auto frame = BanachFrame::exponential(dyadic_block(n));
    const auto est = weak_l2_norm(frame);
    const double size = static_cast<double>(std::int64_t{1} << n);
    const double c0 = est.value * std::sqrt(std::log(size) / size);
    lo = std::min(lo, c0);
    hi = std::max(hi, c0);
    char buf[48];
    std::snprintf(buf, sizeof buf, " %.3f", c0);
    values += buf;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "envelope constants%s, max/min = %.3f", values.c_str(),
                hi / lo);
  return {hi / lo <= 5.0, buf};
}

// criterion 7: relation-probability bound and monotonicity in M
Outcome criterion7() {
  const auto schedule = SelectorSchedule::dyadic(1.0);
  const std::vector<double> c_grid{0.25, 0.5, 1, 2, 4, 8, 16, 32};
  double prev = 1.0 + 1e-9;
  bool monotone = true, dominated = true;
  std::string detail;
  for (std::int64_t M : {64, 256, 1024}) {
    const auto rep =
        relation_probability_experiment(schedule, 3, M, 2048, 10'000, 0x700, c_grid);
    if (rep.empirical_p > prev + 1e-12) monotone = false;
    prev = rep.empirical_p;
    const bool ok = rep.empirical_p == 0.0 ||
                    (!std::isnan(rep.smallest_admissible_c) &&
                     rep.bound_at(rep.smallest_admissible_c) >= rep.empirical_p);
    dominated = dominated && ok;
    char buf[96];
    std::snprintf(buf, sizeof buf, " M=%lld: p=%.4f C*=%.2f", static_cast<long long>(M),
                  rep.empirical_p, rep.smallest_admissible_c);
    detail += buf;
  }
  return {monotone && dominated, detail};
}

// criterion 8: UC oracle against the integrated Lebesgue constant, plus
// translation invariance
Outcome criterion8() {
  // independent oracle: midpoint quadrature of |D_1| = |1 + 2 cos x|
  const int quad = 200'000;
  double oracle = 0.0;
  for (int j = 0; j < quad; ++j) {
    const double x = 6.283185307179586 * (j + 0.5) / quad;
    oracle += std::abs(1.0 + 2.0 * std::cos(x));
  }
  oracle /= quad;

  LPConfig precise;
  precise.constraint_grid = 16384;
  precise.polygon_sides = 64;
  precise.solver_tol = 1e-3;
  std::vector<std::int64_t> window;
  for (std::int64_t k = -8; k <= 8; ++k) window.push_back(k);
  const auto res = sn_operator_norm(window, 1, precise);
  const bool lebesgue_ok = std::abs(res.value - oracle) <= 2e-2;

  LPConfig tcfg;
  tcfg.constraint_grid = 16384;
  tcfg.polygon_sides = 32;
  tcfg.solver_tol = 2e-2;
  int translation_fails = 0;
  double worst_dev = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto E = random_set(5 + i % 8, 48, 0x800 + i);  // |E| <= 12
    const double base = uc_constant(E, tcfg).value();
    const std::int64_t a = (i % 2 == 0) ? 1 : 17;
    std::vector<std::int64_t> shifted;
    for (std::int64_t k : E) shifted.push_back(k + a);
    const double moved = uc_constant(shifted, tcfg).value();
    const double dev = std::abs(moved - base);
    worst_dev = std::max(worst_dev, dev);
    if (dev > tcfg.solver_tol) ++translation_fails;
  }
  char buf[224];
  std::snprintf(buf, sizeof buf,
                "sn=%.4f vs integral %.4f (|diff| %.4f vs 2e-2)%s; translation worst dev %.4f "
                "(%d/20 fails)",
                res.value, oracle, std::abs(res.value - oracle),
                lebesgue_ok ? "" : " [degree-8 truncation gap, see notes]", worst_dev,
                translation_fails);
  return {lebesgue_ok && translation_fails == 0, buf};
}

// criterion 9: Kashin-Tzafriri growth ordering
Outcome criterion9() {
  LPConfig lp;
  lp.real_coeffs = true;
  lp.prefix_budget = 8;
  lp.solver_tol = 0.04;           // certified duality-gap stop at 2%
  lp.patience = 1'000'000'000;    // gap criterion governs, not stalls
  lp.max_iters = 60'000;
  lp.search_trials = 16;
  const auto rep = kashin_tzafriri_experiment({64, 128, 256, 512}, 0.5, 20, lp, 0x900);
  std::string detail = "medians";
  for (const auto& row : rep.rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %.3f", row.median_U);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, ", spearman %.3f", rep.spearman);
  detail += buf;
  return {std::abs(rep.spearman - 1.0) < 1e-12, detail};
}

// criterion 10: expected-count exponent fits at alpha = 1.2, beta = 1.5
Outcome criterion10() {
  const auto s = SelectorSchedule::rider(1.0, 1.2);
  std::vector<std::pair<double, double>> cumulative, in_block;
  for (int n = 3; n <= 8; ++n) {
    const auto Mn = BlockGeometry::power_bound(n, 1.5);
    const auto Mn1 = BlockGeometry::power_bound(n + 1, 1.5);
    cumulative.emplace_back(n, expected_count(s, s.k_min, Mn).value);
    in_block.emplace_back(n, expected_count(s, Mn, Mn1 - 1).value);
  }
  const double g1 = growth_fit(cumulative, GrowthModel::poly_in_n).gamma;
  const double g2 = growth_fit(in_block, GrowthModel::poly_in_n).gamma;
  char buf[128];
  std::snprintf(buf, sizeof buf, "gamma %.3f vs 2.2, %.3f vs 1.2 (25%% bands)", g1, g2);
  return {std::abs(g1 - 2.2) <= 0.25 * 2.2 && std::abs(g2 - 1.2) <= 0.25 * 1.2, buf};
}

// criterion 11: theorem 3.1 pipeline, shipped seed plus 100-seed campaign
Outcome criterion11() {
  ExperimentConfig cfg;
  cfg.seed = 3;  // shipped seed
  cfg.n_lo = 4;
  cfg.n_hi = 13;
  const auto shipped = run_thm31(cfg);
  int passes = 0;
  std::vector<int> ok(100, 0);
  parallel_for_index(100, [&](std::int64_t i) {
    ExperimentConfig c = cfg;
    c.seed = 1000 + static_cast<std::uint64_t>(i);
    try {
      ok[static_cast<std::size_t>(i)] = run_thm31(c).all_pass() ? 1 : 0;
    } catch (const std::exception&) {
      ok[static_cast<std::size_t>(i)] = 0;
    }
  });
  for (int v : ok) passes += v;
  char buf[128];
  std::snprintf(buf, sizeof buf, "shipped seed %s, campaign %d/100 seeds pass",
                shipped.all_pass() ? "passes" : "FAILS", passes);
  return {shipped.all_pass() && passes >= 90, buf};
}

// criterion 12: thinned-growth slope contrast over 20 paired runs
Outcome criterion12() {
  int wins = 0;
  std::vector<int> win(20, 0);
  for (std::uint64_t i = 0; i < 20; ++i) {
    SurrogateGrowthConfig high;
    high.alpha = 1.5;
    high.fixed_block_size = 384;  // fixed span: growing equal-mean density
    high.c_q = 2.0;
    high.n_lo = 4;
    high.n_hi = 8;
    high.trials = 3;
    high.seed = derive_key(0xc00, i);
    high.lp.real_coeffs = true;
    high.lp.prefix_budget = 8;
    high.lp.search_trials = 8;
    SurrogateGrowthConfig low = high;
    low.alpha = 0.5;
    const auto rep_high = thinned_uc_growth(high);
    const auto rep_low = thinned_uc_growth(low);
    if (rep_high.fitted && rep_low.fitted && rep_high.slope > rep_low.slope)
      win[static_cast<std::size_t>(i)] = 1;
  }
  for (int v : win) wins += v;
  char buf[96];
  std::snprintf(buf, sizeof buf, "alpha=1.5 slope exceeds alpha=0.5 in %d/20 paired runs", wins);
  return {wins >= 16, buf};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria{
      {1, "closed-form Orlicz norm and homogeneity", criterion1},
      {2, "self-bounding condition: zero violations", criterion2},
      {3, "tail bounds dominate empirical survival", criterion3},
      {4, "relation search agrees with brute force", criterion4},
      {5, "greedy extraction quality and certification", criterion5},
      {6, "weak-l2 envelope constant bounded", criterion6},
      {7, "relation-probability bound and monotonicity", criterion7},
      {8, "UC oracle and translation invariance", criterion8},
      {9, "Kashin-Tzafriri growth ordering", criterion9},
      {10, "expected-count exponent fits", criterion10},
      {11, "theorem 3.1 pipeline and seed campaign", criterion11},
      {12, "thinning slope contrast", criterion12},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %2d  %-46s [%7.1fs]  %s\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.label, secs, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}

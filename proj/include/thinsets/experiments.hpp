#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinsets/concentration.hpp"
#include "thinsets/ergodic.hpp"
#include "thinsets/norms.hpp"
#include "thinsets/quasiindep.hpp"
#include "thinsets/sampling.hpp"
#include "thinsets/schedule.hpp"
#include "thinsets/ucconst.hpp"
#include "thinsets/weak_l2.hpp"

namespace thinsets {

struct PipelineError : std::runtime_error {
  std::string step;
  PipelineError(std::string step_name, const std::string& what)
      : std::runtime_error(step_name + ": " + what), step(std::move(step_name)) {}
};

/// Everything a pipeline run depends on; a config plus the code version
/// determines all outputs bit for bit.
struct ExperimentConfig {
  std::string experiment = "thm31";
  std::uint64_t seed = 1;
  double c = 1.0;
  double alpha = 1.5;
  double beta = 1.7;
  int n_lo = 4;
  int n_hi = 13;
  std::int64_t trials = 2000;
  double delta_cfg = 0.05;  // extraction reporting threshold
  std::string output_dir;   // empty = no files written
  std::map<std::string, double> tolerances;

  double tol(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", 1}, {"experiment", experiment}, {"seed", seed},
                     {"c", c},              {"alpha", alpha},           {"beta", beta},
                     {"n_lo", n_lo},        {"n_hi", n_hi},             {"trials", trials},
                     {"delta_cfg", delta_cfg}, {"output_dir", output_dir}};
    j["tolerances"] = tolerances;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.experiment = j.value("experiment", cfg.experiment);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.c = j.value("c", cfg.c);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.n_lo = j.value("n_lo", cfg.n_lo);
    cfg.n_hi = j.value("n_hi", cfg.n_hi);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.delta_cfg = j.value("delta_cfg", cfg.delta_cfg);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("tolerances"))
      cfg.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
    return cfg;
  }
};

struct Assertion {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct StepRecord {
  std::string name;
  double wall_ms = 0.0;
  std::vector<std::string> files;
};

struct RunManifest {
  std::string experiment;
  nlohmann::json config;
  std::vector<StepRecord> steps;
  std::vector<Assertion> assertions;

  bool all_pass() const {
    for (const auto& a : assertions)
      if (!a.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", 1}, {"experiment", experiment}, {"config", config}};
    nlohmann::json steps_json = nlohmann::json::array();
    for (const auto& s : steps)
      steps_json.push_back({{"name", s.name}, {"wall_ms", s.wall_ms}, {"files", s.files}});
    j["steps"] = steps_json;
    nlohmann::json asserts_json = nlohmann::json::array();
    for (const auto& a : assertions)
      asserts_json.push_back({{"name", a.name},
                              {"value", a.value},
                              {"tolerance", a.tolerance},
                              {"pass", a.pass},
                              {"detail", a.detail}});
    j["assertions"] = asserts_json;
    j["all_pass"] = all_pass();
    return j;
  }

  // write-then-rename keeps a crash from leaving a torn manifest behind
  void write(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream os(tmp);
      if (!os) throw std::runtime_error("manifest: cannot open " + tmp);
      os << to_json().dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
  }
};

namespace detail {

class StepTimer {
 public:
  StepTimer(RunManifest& manifest, std::string name)
      : manifest_(manifest), start_(std::chrono::steady_clock::now()) {
    record_.name = std::move(name);
  }
  void add_file(const std::string& path) { record_.files.push_back(path); }
  ~StepTimer() {
    record_.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    manifest_.steps.push_back(record_);
  }

 private:
  RunManifest& manifest_;
  StepRecord record_;
  std::chrono::steady_clock::time_point start_;
};

inline std::string maybe_write(const ExperimentConfig& cfg, const std::string& name,
                               const std::string& contents) {
  if (cfg.output_dir.empty()) return {};
  std::filesystem::create_directories(cfg.output_dir);
  const std::string path = cfg.output_dir + "/" + name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("experiment output: cannot open " + path);
  os << contents;
  return path;
}

}  // namespace detail

/// Dyadic-schedule pipeline: sample, per-block count and Psi checks, greedy
/// quasi-independent extraction, density and distribution diagnostics.
inline RunManifest run_thm31(const ExperimentConfig& cfg) {
  RunManifest manifest;
  manifest.experiment = "thm31";
  manifest.config = cfg.to_json();
  if (cfg.n_lo < 4 || cfg.n_hi < cfg.n_lo || cfg.n_hi > 14)
    throw PipelineError("thm31/config", "n range must sit inside [4, 14]");

  const auto schedule = SelectorSchedule::dyadic(cfg.c);
  const std::int64_t lo = std::int64_t{1} << cfg.n_lo;
  const std::int64_t hi = (std::int64_t{1} << (cfg.n_hi + 1)) - 1;

  RandomSetSample lambda;
  {
    detail::StepTimer step(manifest, "sample");
    lambda = sample_set(schedule, lo, hi, cfg.seed);
    std::ostringstream ss;
    write_set(ss, lambda);
    const auto path = detail::maybe_write(cfg, "lambda.set", ss.str());
    if (!path.empty()) step.add_file(path);
  }

  const auto geometry = BlockGeometry::dyadic(cfg.n_lo, cfg.n_hi);
  std::vector<std::vector<std::int64_t>> blocks;
  {
    detail::StepTimer step(manifest, "block_counts");
    const auto counts = block_counts(lambda, geometry);
    for (const auto& [n, count] : counts)
      if (count == 0)
        throw PipelineError("thm31/block_counts", "empty block n = " + std::to_string(n));
    int within = 0;
    const double slack = cfg.tol("eq34_slack", 1.3);
    for (const auto& [n, count] : counts) {
      const double mean = cfg.c * static_cast<double>(n);
      if (static_cast<double>(count) >= 0.5 * mean / slack &&
          static_cast<double>(count) <= 2.0 * mean * slack)
        ++within;
    }
    const double fraction = static_cast<double>(within) / static_cast<double>(counts.size());
    const double need = cfg.tol("eq34_block_fraction", 0.9);
    manifest.assertions.push_back({"eq34_block_bounds", fraction, need, fraction >= need,
                                   "fraction of blocks with c n/2 <= |L_n| <= 2 c n"});
    for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
      const auto [blo, bhi] = geometry.block(n);
      std::vector<std::int64_t> blk;
      for (std::int64_t k : lambda.elements)
        if (k >= blo && k < bhi) blk.push_back(k);
      blocks.push_back(std::move(blk));
    }
  }

  std::vector<double> psi_values;
  {
    detail::StepTimer step(manifest, "psi_ratio");
    double rlo = 1e300, rhi = 0.0;
    std::ostringstream csv;
    csv << "n,count,psi,psi_over_sqrt\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double psi = psi_A(blocks[i]).value;
      psi_values.push_back(psi);
      const double ratio = psi / std::sqrt(static_cast<double>(blocks[i].size()));
      rlo = std::min(rlo, ratio);
      rhi = std::max(rhi, ratio);
      csv << (cfg.n_lo + static_cast<int>(i)) << "," << blocks[i].size() << "," << psi << ","
          << ratio << "\n";
    }
    const double band = cfg.tol("psi_ratio_band", 3.0);
    manifest.assertions.push_back({"eq35_psi_ratio_band", rhi / rlo, band, rhi / rlo <= band,
                                   "max/min of Psi_{L_n} / sqrt|L_n| across blocks"});
    const auto path = detail::maybe_write(cfg, "psi_blocks.csv", csv.str());
    if (!path.empty()) step.add_file(path);
  }

  std::vector<std::int64_t> extracted;  // E = union E_n
  {
    detail::StepTimer step(manifest, "extract");
    bool all_verified = true;
    double min_margin = 1e300;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      auto [subset, report] = extract_greedy(blocks[i], {}, cfg.delta_cfg);
      all_verified = all_verified && report.verified_qi;
      if (report.bound_37 > 0.0)
        min_margin = std::min(min_margin,
                              static_cast<double>(report.output_size) / report.bound_37);
      rows.push_back(report.to_json());
      extracted.insert(extracted.end(), subset.begin(), subset.end());
    }
    manifest.assertions.push_back({"extraction_verified_qi", all_verified ? 1.0 : 0.0, 1.0,
                                   all_verified, "every E_n re-checked relation-free"});
    manifest.assertions.push_back({"eq37_extraction_margin", min_margin, 1.0, min_margin >= 1.0,
                                   "min over blocks of |E_n| / (delta (|L_n|/Psi)^2)"});
    const auto path = detail::maybe_write(cfg, "extraction.json", rows.dump(2));
    if (!path.empty()) step.add_file(path);
  }

  std::vector<std::int64_t> n_cuts;
  for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) n_cuts.push_back(std::int64_t{1} << (n + 1));
  {
    detail::StepTimer step(manifest, "density_fit");
    // the density claim is asymptotic: fit the upper half of the block range
    // so the missing blocks below n_lo cannot tilt the exponent
    const int fit_lo = std::max(cfg.n_lo, std::min((cfg.n_lo + cfg.n_hi) / 2, cfg.n_hi - 2));
    std::vector<std::pair<double, double>> points;
    std::ostringstream csv;
    csv << "N,count,in_fit\n";
    for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
      const std::int64_t N = std::int64_t{1} << (n + 1);
      const double count = static_cast<double>(
          std::upper_bound(extracted.begin(), extracted.end(), N) - extracted.begin());
      const bool in_fit = n >= fit_lo && count > 0.0;
      if (in_fit) points.emplace_back(static_cast<double>(N), count);
      csv << N << "," << count << "," << (in_fit ? 1 : 0) << "\n";
    }
    if (points.size() < 3) throw PipelineError("thm31/density_fit", "fewer than 3 usable points");
    const auto fit = growth_fit(points, GrowthModel::polylog_in_N);
    const double gamma_lo = cfg.tol("density_gamma_lo", 1.5);
    const double gamma_hi = cfg.tol("density_gamma_hi", 2.8);
    manifest.assertions.push_back(
        {"density_gamma", fit.gamma, gamma_hi, fit.gamma >= gamma_lo && fit.gamma <= gamma_hi,
         "|E cap [1,N]| ~ (log N)^gamma, gamma within [" + std::to_string(gamma_lo) + ", " +
             std::to_string(gamma_hi) + "], R^2 = " + std::to_string(fit.r_squared)});
    // the density exponent 2 matching p/(2-p) at p = 4/3 is the 4/3-Rider link
    manifest.assertions.push_back({"p_rider_exponent", fit.gamma, 2.0,
                                   fit.gamma >= gamma_lo && fit.gamma <= gamma_hi,
                                   "fitted gamma against p/(2-p) = 2 at p = 4/3"});
    const auto path = detail::maybe_write(cfg, "density.csv", csv.str());
    if (!path.empty()) step.add_file(path);
  }

  {
    detail::StepTimer step(manifest, "sqrt_property");
    const auto rep = sqrt_property_check(extracted, 64, 12, derive_key(cfg.seed, 0x541));
    manifest.assertions.push_back({"sqrt_property_min_ratio", rep.min_ratio, 0.0,
                                   rep.min_ratio > 0.0,
                                   "min |B| / sqrt|A| over sampled subsets (reported)"});
  }

  {
    detail::StepTimer step(manifest, "upper_density");
    const auto rep = upper_density(extracted, lambda.elements, n_cuts);
    manifest.assertions.push_back({"upper_density_positive", rep.running_max, 0.0,
                                   rep.running_max > 0.0,
                                   "running max of |E cap [1,N]| / |Lambda cap [1,N]|"});
  }

  {
    detail::StepTimer step(manifest, "ud_scan");
    const auto scan = uniform_distribution_scan(lambda, n_cuts);
    std::ostringstream csv;
    scan.to_csv(csv);
    manifest.assertions.push_back({"ud_kendall_negative", scan.kendall_tau, 0.0,
                                   scan.kendall_tau < 0.0,
                                   "Kendall tau of max_t |A_N(t)| against N"});
    const auto path = detail::maybe_write(cfg, "ud_scan.csv", csv.str());
    if (!path.empty()) step.add_file(path);
  }

  if (!cfg.output_dir.empty()) manifest.write(cfg.output_dir + "/manifest.json");
  return manifest;
}

/// Rider-schedule pipeline: expected-count exponent fits at the real block
/// geometry, the surrogate thinning contrast, and the relation-probability
/// experiment.
inline RunManifest run_thm41(const ExperimentConfig& cfg) {
  RunManifest manifest;
  manifest.experiment = "thm41";
  manifest.config = cfg.to_json();
  if (cfg.n_lo < 3 || cfg.n_hi < cfg.n_lo)
    throw PipelineError("thm41/config", "need 3 <= n_lo <= n_hi");
  if (!(cfg.beta > cfg.alpha))
    throw PipelineError("thm41/config", "beta must exceed alpha");

  const auto schedule = SelectorSchedule::rider(cfg.c, cfg.alpha);

  {
    detail::StepTimer step(manifest, "lemma43_fits");
    if (cfg.n_hi - cfg.n_lo + 1 < 3) {
      manifest.assertions.push_back({"lemma43_fits_skipped", 0.0, 0.0, true,
                                     "n range too short for exponent fits"});
    } else {
      std::vector<std::pair<double, double>> cumulative, in_block;
      std::ostringstream csv;
      csv << "n,M_n,cumulative,in_block\n";
      for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
        const auto Mn = BlockGeometry::power_bound(n, cfg.beta);
        const auto Mn1 = BlockGeometry::power_bound(n + 1, cfg.beta);
        const double cum = expected_count(schedule, schedule.k_min, Mn).value;
        const double blk = expected_count(schedule, Mn, Mn1 - 1).value;
        cumulative.emplace_back(n, cum);
        in_block.emplace_back(n, blk);
        csv << n << "," << Mn << "," << cum << "," << blk << "\n";
      }
      const auto fit_c = growth_fit(cumulative, GrowthModel::poly_in_n);
      const auto fit_b = growth_fit(in_block, GrowthModel::poly_in_n);
      const double rel = cfg.tol("lemma43_rel_tol", 0.25);
      const double t1 = cfg.alpha + 1.0, t2 = cfg.alpha;
      manifest.assertions.push_back({"lemma43_cumulative_gamma", fit_c.gamma, t1,
                                     std::abs(fit_c.gamma - t1) <= rel * t1,
                                     "|Lambda_{M_n}| ~ n^{alpha+1} exponent fit"});
      manifest.assertions.push_back({"lemma43_block_gamma", fit_b.gamma, t2,
                                     std::abs(fit_b.gamma - t2) <= rel * t2,
                                     "|Lambda*_n| ~ n^alpha exponent fit"});
      const auto path = detail::maybe_write(cfg, "lemma43.csv", csv.str());
      if (!path.empty()) step.add_file(path);
    }
  }

  {
    detail::StepTimer step(manifest, "thinned_uc_contrast");
    SurrogateGrowthConfig high;
    high.alpha = cfg.alpha;
    high.fixed_block_size = 384;  // fixed span shows the equal-mean density growth
    high.c_q = 2.0;
    high.n_lo = std::max(4, cfg.n_lo);
    high.n_hi = std::min(8, cfg.n_hi < 4 ? 8 : cfg.n_hi);
    if (high.n_hi < high.n_lo) high.n_hi = high.n_lo;
    high.trials = std::max<std::int64_t>(1, std::min<std::int64_t>(cfg.trials, 8));
    high.seed = derive_key(cfg.seed, 0x41c);
    high.lp.real_coeffs = true;
    high.lp.prefix_budget = 8;
    high.lp.search_trials = 16;
    SurrogateGrowthConfig low = high;
    low.alpha = 0.5;
    const auto rep_high = thinned_uc_growth(high);
    const auto rep_low = thinned_uc_growth(low);
    nlohmann::json j{{"alpha_high", rep_high.to_json()}, {"alpha_low", rep_low.to_json()}};
    if (rep_high.fitted && rep_low.fitted) {
      manifest.assertions.push_back({"uc_growth_contrast", rep_high.slope - rep_low.slope, 0.0,
                                     rep_high.slope > rep_low.slope,
                                     "thinned-block median U slope, alpha = " +
                                         std::to_string(cfg.alpha) + " vs 0.5"});
    } else {
      manifest.assertions.push_back({"uc_growth_fits_skipped", 0.0, 0.0, true,
                                     "single-block range or empty blocks: no slope fits"});
    }
    const auto path = detail::maybe_write(cfg, "thinned_uc.json", j.dump(2));
    if (!path.empty()) step.add_file(path);
  }

  {
    detail::StepTimer step(manifest, "relation_probability");
    nlohmann::json rows = nlohmann::json::array();
    for (int n : {3, 4}) {
      const std::int64_t M =
          std::min<std::int64_t>(BlockGeometry::power_bound(n, cfg.beta), 1024);
      const std::int64_t K = 2048;
      const auto rep = relation_probability_experiment(
          schedule, n, std::max<std::int64_t>(M, schedule.k_min), K,
          std::max<std::int64_t>(cfg.trials, 100), derive_key(cfg.seed, 0x7e1 + n),
          {0.5, 1, 2, 4, 8, 16, 32});
      rows.push_back(rep.to_json());
      const bool dominated =
          rep.empirical_p == 0.0 || (!std::isnan(rep.smallest_admissible_c) &&
                                     rep.bound_at(rep.smallest_admissible_c) >= rep.empirical_p);
      manifest.assertions.push_back(
          {"relation_bound_admissible_n" + std::to_string(n), rep.smallest_admissible_c, 0.0,
           dominated, "empirical P dominated at the smallest admissible C"});
    }
    const auto path = detail::maybe_write(cfg, "relations.json", rows.dump(2));
    if (!path.empty()) step.add_file(path);
  }

  if (!cfg.output_dir.empty()) manifest.write(cfg.output_dir + "/manifest.json");
  return manifest;
}

}  // namespace thinsets

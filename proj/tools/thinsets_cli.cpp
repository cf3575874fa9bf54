// Command-line front end: sampling, norms, concentration experiments,
// quasi-independent extraction, UC constants, and the two end-to-end
// pipelines. All results are emitted as JSON records (CSV where a table is
// the natural shape). Exit codes: 0 = success / all assertions pass,
// 1 = assertion failures, 2 = usage errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thinsets/concentration.hpp"
#include "thinsets/ergodic.hpp"
#include "thinsets/experiments.hpp"
#include "thinsets/norms.hpp"
#include "thinsets/quasiindep.hpp"
#include "thinsets/sampling.hpp"
#include "thinsets/schedule.hpp"
#include "thinsets/trigpoly.hpp"
#include "thinsets/ucconst.hpp"
#include "thinsets/weak_l2.hpp"

using namespace thinsets;

namespace {

struct ScheduleFlags {
  std::string kind = "dyadic";
  double c = 1.0;
  double alpha = 1.5;
  double delta = 0.5;
  std::int64_t k_min = -1;  // -1 = kind default

  void attach(CLI::App* cmd) {
    cmd->add_option("--schedule", kind, "dyadic | rider | constant")->capture_default_str();
    cmd->add_option("--c", c, "schedule scale c")->capture_default_str();
    cmd->add_option("--alpha", alpha, "rider exponent alpha")->capture_default_str();
    cmd->add_option("--delta", delta, "constant schedule mean")->capture_default_str();
    cmd->add_option("--k-min", k_min, "smallest schedule index");
  }

  SelectorSchedule build() const {
    if (kind == "dyadic") return SelectorSchedule::dyadic(c, k_min < 0 ? 16 : k_min);
    if (kind == "rider") return SelectorSchedule::rider(c, alpha, k_min < 0 ? 16 : k_min);
    if (kind == "constant") return SelectorSchedule::constant(delta, k_min < 0 ? 1 : k_min);
    throw CLI::ValidationError("--schedule", "unknown schedule kind '" + kind + "'");
  }
};

std::vector<std::int64_t> parse_elements(const std::string& csv) {
  std::vector<std::int64_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoll(tok));
  }
  return out;
}

std::vector<std::int64_t> load_elements(const std::string& set_file,
                                        const std::string& elements) {
  if (!set_file.empty()) return read_set_file(set_file).elements;
  if (!elements.empty()) return parse_elements(elements);
  throw CLI::ValidationError("input", "need --in <set file> or --elements <list>");
}

void write_or_print(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::cout << contents;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << contents;
}

int manifest_exit(const RunManifest& manifest) {
  for (const auto& a : manifest.assertions)
    std::printf("%-4s %s = %.6g (tolerance %.6g) %s\n", a.pass ? "pass" : "FAIL",
                a.name.c_str(), a.value, a.tolerance, a.detail.c_str());
  if (manifest.all_pass()) return 0;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& a : manifest.assertions)
    if (!a.pass) failures.push_back({{"name", a.name}, {"value", a.value}});
  std::cout << nlohmann::json{{"failed_assertions", failures}}.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random thin sets of integers: norms, concentration, relations, UC constants"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "sample a selector set and write it");
  ScheduleFlags gen_sched;
  gen_sched.attach(gen);
  std::int64_t gen_lo = 16, gen_hi = 4096;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--lo", gen_lo, "range start")->capture_default_str();
  gen->add_option("--hi", gen_hi, "range end (inclusive)")->capture_default_str();
  gen->add_option("--seed", gen_seed, "sampling seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output set file (default stdout)");

  // --- norms ---
  auto* norms = app.add_subcommand("norms", "norms of a trigonometric polynomial");
  std::string norms_poly, norms_set;
  double norms_constant = std::numeric_limits<double>::quiet_NaN();
  bool norms_psi2 = false, norms_sup = false, norms_rider = false;
  double norms_p = 0.0;
  std::int64_t norms_trials = 400;
  std::uint64_t norms_seed = 1;
  norms->add_option("--input", norms_poly, "polynomial JSON file: [[freq, re, im], ...]");
  norms->add_option("--set", norms_set, "set file; uses the indicator exponential sum");
  norms->add_option("--constant", norms_constant, "constant polynomial value");
  norms->add_flag("--psi2", norms_psi2, "Luxemburg Psi_2 norm");
  norms->add_flag("--sup", norms_sup, "sup norm with Bernstein bracket");
  norms->add_option("--lp", norms_p, "L^p norm for the given p");
  norms->add_flag("--rider", norms_rider, "Rider norm (Monte Carlo)");
  norms->add_option("--trials", norms_trials, "Monte Carlo trials")->capture_default_str();
  norms->add_option("--seed", norms_seed, "Monte Carlo seed")->capture_default_str();

  // --- tail ---
  auto* tail = app.add_subcommand("tail", "tail experiment against the analytic bounds");
  std::size_t tail_coord = 0;
  int tail_block = -1;
  std::string tail_variate = "rademacher";
  std::int64_t tail_trials = 10'000;
  std::uint64_t tail_seed = 1;
  std::string tail_csv, tail_json;
  tail->add_option("--coord-dim", tail_coord, "orthonormal coordinate frame of this size");
  tail->add_option("--exp-block", tail_block, "exponential frame on the dyadic block I_n");
  tail->add_option("--variate", tail_variate, "rademacher | uniform_pm1 | gaussian")
      ->capture_default_str();
  tail->add_option("--trials", tail_trials, "")->capture_default_str();
  tail->add_option("--seed", tail_seed, "")->capture_default_str();
  tail->add_option("--out-csv", tail_csv, "CSV output path");
  tail->add_option("--out-json", tail_json, "JSON output path (default stdout)");

  // --- blm ---
  auto* blm = app.add_subcommand("blm", "self-bounding condition check");
  std::size_t blm_coord = 0;
  int blm_block = -1;
  std::string blm_variate = "rademacher";
  std::int64_t blm_trials = 10'000;
  std::uint64_t blm_seed = 1;
  blm->add_option("--coord-dim", blm_coord, "orthonormal coordinate frame of this size");
  blm->add_option("--exp-block", blm_block, "exponential frame on the dyadic block I_n");
  blm->add_option("--variate", blm_variate, "rademacher | uniform_pm1")->capture_default_str();
  blm->add_option("--trials", blm_trials, "")->capture_default_str();
  blm->add_option("--seed", blm_seed, "")->capture_default_str();

  // --- extract ---
  auto* extract = app.add_subcommand("extract", "greedy quasi-independent extraction");
  std::string extract_in, extract_elements, extract_out_set;
  double extract_delta = 0.05;
  extract->add_option("--in", extract_in, "input set file");
  extract->add_option("--elements", extract_elements, "comma-separated elements");
  extract->add_option("--delta-cfg", extract_delta, "reporting threshold")->capture_default_str();
  extract->add_option("--out-set", extract_out_set, "write the extracted subset here");

  // --- relations ---
  auto* relations = app.add_subcommand("relations", "search for a vanishing signed sum");
  std::string rel_in, rel_elements;
  int rel_length = 0;
  relations->add_option("--in", rel_in, "input set file");
  relations->add_option("--elements", rel_elements, "comma-separated elements");
  relations->add_option("--length", rel_length, "restrict to exactly this many terms");

  // --- uc ---
  auto* uc = app.add_subcommand("uc", "UC-constant estimate via the partial-sum LP");
  std::string uc_in, uc_elements, uc_dump;
  int uc_grid = 0, uc_polygon = 16, uc_budget = 0;
  std::int64_t uc_n = -1;
  bool uc_real = false;
  uc->add_option("--in", uc_in, "input set file");
  uc->add_option("--elements", uc_elements, "comma-separated elements");
  uc->add_option("--n", uc_n, "single partial-sum cut (default: maximize over cuts)");
  uc->add_option("--grid", uc_grid, "constraint grid (0 = adaptive)")->capture_default_str();
  uc->add_option("--polygon", uc_polygon, "polygon sides")->capture_default_str();
  uc->add_option("--prefix-budget", uc_budget, "cut budget (0 = all)")->capture_default_str();
  uc->add_flag("--real", uc_real, "restrict coefficients to real parts");
  uc->add_option("--dump-lp", uc_dump, "write the LP instance as text");

  // --- kt ---
  auto* kt = app.add_subcommand("kt", "Kashin-Tzafriri growth experiment");
  std::string kt_list = "64,128,256,512";
  double kt_delta = 0.5;
  std::int64_t kt_trials = 20;
  std::uint64_t kt_seed = 1;
  std::string kt_csv;
  kt->add_option("--n-list", kt_list, "comma-separated N values")->capture_default_str();
  kt->add_option("--delta", kt_delta, "selector mean")->capture_default_str();
  kt->add_option("--trials", kt_trials, "sets per N")->capture_default_str();
  kt->add_option("--seed", kt_seed, "")->capture_default_str();
  kt->add_option("--out-csv", kt_csv, "CSV output path");

  // --- thm31 / thm41 ---
  ExperimentConfig cfg31, cfg41;
  cfg41.experiment = "thm41";
  cfg41.n_lo = 3;
  cfg41.n_hi = 8;
  auto* thm31 = app.add_subcommand("thm31", "dyadic-schedule extraction pipeline");
  std::string cfg31_file;
  thm31->add_option("--config", cfg31_file, "JSON config file (flags override)");
  thm31->add_option("--seed", cfg31.seed, "")->capture_default_str();
  thm31->add_option("--c", cfg31.c, "")->capture_default_str();
  thm31->add_option("--n-lo", cfg31.n_lo, "")->capture_default_str();
  thm31->add_option("--n-hi", cfg31.n_hi, "")->capture_default_str();
  thm31->add_option("--out-dir", cfg31.output_dir, "result directory");

  auto* thm41 = app.add_subcommand("thm41", "rider-schedule thinning pipeline");
  std::string cfg41_file;
  thm41->add_option("--config", cfg41_file, "JSON config file (flags override)");
  thm41->add_option("--seed", cfg41.seed, "")->capture_default_str();
  thm41->add_option("--c", cfg41.c, "")->capture_default_str();
  thm41->add_option("--alpha", cfg41.alpha, "")->capture_default_str();
  thm41->add_option("--beta", cfg41.beta, "")->capture_default_str();
  thm41->add_option("--n-lo", cfg41.n_lo, "")->capture_default_str();
  thm41->add_option("--n-hi", cfg41.n_hi, "")->capture_default_str();
  thm41->add_option("--trials", cfg41.trials, "")->capture_default_str();
  thm41->add_option("--out-dir", cfg41.output_dir, "result directory");

  // --- report ---
  auto* report = app.add_subcommand("report", "render a manifest to CSV");
  std::string report_manifest;
  report->add_option("--manifest", report_manifest, "manifest.json path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto sample = sample_set(gen_sched.build(), gen_lo, gen_hi, gen_seed);
      std::ostringstream ss;
      write_set(ss, sample);
      write_or_print(gen_out, ss.str());
      return 0;
    }

    if (norms->parsed()) {
      TrigPolynomial poly;
      if (!norms_poly.empty()) {
        std::ifstream is(norms_poly);
        if (!is) throw std::runtime_error("cannot open " + norms_poly);
        nlohmann::json j;
        is >> j;
        poly = TrigPolynomial::from_json(j);
      } else if (!norms_set.empty()) {
        poly = TrigPolynomial::indicator(read_set_file(norms_set).elements);
      } else if (!std::isnan(norms_constant)) {
        poly = TrigPolynomial::constant(norms_constant);
      } else {
        throw CLI::ValidationError("norms", "need --input, --set or --constant");
      }
      nlohmann::json out;
      if (norms_psi2) out["psi2"] = luxemburg_psi2(poly).to_json();
      if (norms_sup) out["sup"] = sup_norm(poly).to_json();
      if (norms_p >= 1.0) out["lp"] = lp_norm(poly, norms_p).to_json();
      if (norms_rider) out["rider"] = rider_norm(poly, norms_trials, norms_seed).to_json();
      if (out.empty()) throw CLI::ValidationError("norms", "pick at least one norm flag");
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    const auto build_frame = [](std::size_t coord, int block) {
      if (coord > 0) {
        std::vector<std::vector<double>> vecs(coord, std::vector<double>(coord, 0.0));
        for (std::size_t j = 0; j < coord; ++j) vecs[j][j] = 1.0;
        return BanachFrame::coordinate(std::move(vecs));
      }
      if (block >= 0) {
        std::vector<std::int64_t> freqs;
        for (std::int64_t k = std::int64_t{1} << block; k < std::int64_t{1} << (block + 1); ++k)
          freqs.push_back(k);
        return BanachFrame::exponential(std::move(freqs));
      }
      throw CLI::ValidationError("frame", "need --coord-dim or --exp-block");
    };
    const auto parse_variate = [](const std::string& name) {
      if (name == "rademacher") return VariateKind::rademacher;
      if (name == "uniform_pm1") return VariateKind::uniform_pm1;
      if (name == "gaussian") return VariateKind::gaussian;
      throw CLI::ValidationError("--variate", "unknown variate '" + name + "'");
    };

    if (tail->parsed()) {
      const auto frame = build_frame(tail_coord, tail_block);
      const auto rep = tail_experiment(frame, parse_variate(tail_variate), tail_trials, {},
                                       tail_seed);
      if (!tail_csv.empty()) {
        std::ofstream os(tail_csv);
        rep.to_csv(os);
      }
      write_or_print(tail_json, rep.to_json().dump(2) + "\n");
      return 0;
    }

    if (blm->parsed()) {
      const auto frame = build_frame(blm_coord, blm_block);
      const auto rep = blm_condition_check(frame, parse_variate(blm_variate), blm_trials,
                                           blm_seed);
      std::cout << rep.to_json().dump(2) << "\n";
      return rep.violations == 0 ? 0 : 1;
    }

    if (extract->parsed()) {
      const auto elements = load_elements(extract_in, extract_elements);
      const auto [subset, rep] = extract_greedy(elements, {}, extract_delta);
      if (!extract_out_set.empty()) {
        RandomSetSample s;
        s.elements = subset;
        s.schedule = SelectorSchedule::constant(1.0, 1);
        s.k_lo = subset.empty() ? 1 : subset.front();
        s.k_hi = subset.empty() ? 1 : subset.back();
        write_set_file(extract_out_set, s);
      }
      std::cout << rep.to_json().dump(2) << "\n";
      return 0;
    }

    if (relations->parsed()) {
      const auto elements = load_elements(rel_in, rel_elements);
      const auto rel = rel_length > 0 ? find_relation_of_length(elements, rel_length)
                                      : find_relation(elements);
      if (rel)
        std::cout << rel->to_json().dump() << "\n";
      else
        std::cout << "null\n";
      return 0;
    }

    if (uc->parsed()) {
      const auto elements = load_elements(uc_in, uc_elements);
      LPConfig lp;
      lp.constraint_grid = uc_grid;
      lp.polygon_sides = uc_polygon;
      lp.prefix_budget = uc_budget;
      lp.real_coeffs = uc_real;
      if (!uc_dump.empty()) {
        detail::SnLpInstance inst(elements, lp);
        inst.solve(uc_n >= 0 ? uc_n : elements.back());
        std::ofstream os(uc_dump);
        inst.dump(os);
      }
      if (uc_n >= 0) {
        const auto res = sn_operator_norm(elements, uc_n, lp);
        std::cout << nlohmann::json{{"value", res.value},
                                    {"lp_objective", res.lp_objective},
                                    {"grid_scale", res.grid_scale},
                                    {"N", uc_n}}
                         .dump(2)
                  << "\n";
      } else {
        std::cout << uc_constant(elements, lp).to_json().dump(2) << "\n";
      }
      return 0;
    }

    if (kt->parsed()) {
      LPConfig lp;
      lp.real_coeffs = true;
      lp.prefix_budget = 8;
      lp.solver_tol = 0.04;
      lp.patience = 1'000'000'000;
      lp.max_iters = 60'000;
      lp.search_trials = 16;
      const auto rep = kashin_tzafriri_experiment(parse_elements(kt_list), kt_delta, kt_trials,
                                                  lp, kt_seed);
      if (!kt_csv.empty()) {
        std::ofstream os(kt_csv);
        rep.to_csv(os);
      }
      std::cout << rep.to_json().dump(2) << "\n";
      return 0;
    }

    if (thm31->parsed()) {
      if (!cfg31_file.empty()) {
        std::ifstream is(cfg31_file);
        if (!is) throw std::runtime_error("cannot open " + cfg31_file);
        nlohmann::json j;
        is >> j;
        auto file_cfg = ExperimentConfig::from_json(j);
        file_cfg.seed = thm31->count("--seed") ? cfg31.seed : file_cfg.seed;
        file_cfg.c = thm31->count("--c") ? cfg31.c : file_cfg.c;
        file_cfg.n_lo = thm31->count("--n-lo") ? cfg31.n_lo : file_cfg.n_lo;
        file_cfg.n_hi = thm31->count("--n-hi") ? cfg31.n_hi : file_cfg.n_hi;
        file_cfg.output_dir = thm31->count("--out-dir") ? cfg31.output_dir : file_cfg.output_dir;
        cfg31 = file_cfg;
      }
      cfg31.experiment = "thm31";
      return manifest_exit(run_thm31(cfg31));
    }

    if (thm41->parsed()) {
      if (!cfg41_file.empty()) {
        std::ifstream is(cfg41_file);
        if (!is) throw std::runtime_error("cannot open " + cfg41_file);
        nlohmann::json j;
        is >> j;
        cfg41 = ExperimentConfig::from_json(j);
      }
      cfg41.experiment = "thm41";
      return manifest_exit(run_thm41(cfg41));
    }

    if (report->parsed()) {
      std::ifstream is(report_manifest);
      if (!is) throw std::runtime_error("cannot open " + report_manifest);
      nlohmann::json j;
      is >> j;
      std::cout << "assertion,value,tolerance,pass\n";
      for (const auto& a : j.at("assertions"))
        std::cout << a.at("name").get<std::string>() << "," << a.at("value").get<double>() << ","
                  << a.at("tolerance").get<double>() << ","
                  << (a.at("pass").get<bool>() ? 1 : 0) << "\n";
      std::cout << "step,wall_ms\n";
      for (const auto& s : j.at("steps"))
        std::cout << s.at("name").get<std::string>() << "," << s.at("wall_ms").get<double>()
                  << "\n";
      return j.value("all_pass", false) ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

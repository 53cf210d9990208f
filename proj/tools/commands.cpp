#include "commands.hpp"

#include <algorithm>
#include <iostream>
#include <memory>
#include <set>

#include "cli_common.hpp"
#include "ppcm/cells.hpp"
#include "ppcm/csv_io.hpp"
#include "ppcm/error.hpp"
#include "ppcm/linear_model.hpp"
#include "ppcm/metrics.hpp"
#include "ppcm/mrp.hpp"
#include "ppcm/ppcm_estimator.hpp"
#include "ppcm/study.hpp"
#include "ppcm/weighting_estimators.hpp"

namespace ppcm::cli {
namespace {

void add_common(CLI::App& app, CommonOptions& c) {
  app.add_option("--seed", c.seed, "Master seed (falls back to PPCM_SEED, then 0)");
  app.add_option("--threads", c.threads, "Worker threads (0 = available parallelism)");
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--config", c.config, "JSON file of option defaults keyed by flag name");
}

void apply_common(const CLI::App& app, ConfigFile& cfg, CommonOptions& c) {
  cfg.apply_optional(app, "seed", c.seed);
  cfg.apply(app, "threads", c.threads);
  cfg.apply(app, "out", c.out);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

void write_manifest(const std::filesystem::path& dir, const json& m) { write_file(dir / "manifest.json", m.dump(2) + "\n"); }

// Options shared by the commands that read a population and a cohort.
struct DataOptions {
  std::string population, cohort, schema, sensitivity, age_grid;
  std::optional<double> scale_k;
  std::size_t draws = 1000;
  std::size_t trees = 200;
  std::size_t burn = 1000;
  std::size_t keep = 1000;
  std::size_t response_trees = 50;
};

void add_data(CLI::App& app, DataOptions& d) {
  app.add_option("--population", d.population, "Population frame CSV (long format)");
  app.add_option("--cohort", d.cohort, "Cohort CSV (long format)");
  app.add_option("--schema", d.schema, "Wave schema JSON");
  app.add_option("--sensitivity", d.sensitivity, "Sensitivity prior JSON");
  app.add_option("--scale-k", d.scale_k, "Multiplier applied to every sensitivity bound");
  app.add_option("--age-grid", d.age_grid, "Age grid as lo:hi:step");
  app.add_option("--draws", d.draws, "Posterior draws of the PPCM")->capture_default_str();
  app.add_option("--trees", d.trees, "Trees in each outcome forest")->capture_default_str();
  app.add_option("--burn", d.burn, "MCMC burn-in iterations")->capture_default_str();
  app.add_option("--keep", d.keep, "MCMC iterations kept")->capture_default_str();
  app.add_option("--response-trees", d.response_trees, "Trees in each response forest")->capture_default_str();
}

void apply_data(const CLI::App& app, ConfigFile& cfg, DataOptions& d) {
  cfg.apply(app, "population", d.population);
  cfg.apply(app, "cohort", d.cohort);
  cfg.apply(app, "schema", d.schema);
  cfg.apply(app, "sensitivity", d.sensitivity);
  cfg.apply_optional(app, "scale-k", d.scale_k);
  cfg.apply(app, "age-grid", d.age_grid);
  cfg.apply(app, "draws", d.draws);
  cfg.apply(app, "trees", d.trees);
  cfg.apply(app, "burn", d.burn);
  cfg.apply(app, "keep", d.keep);
  cfg.apply(app, "response-trees", d.response_trees);
}

json data_json(const DataOptions& d) {
  json j;
  j["population"] = d.population;
  j["cohort"] = d.cohort;
  j["schema"] = d.schema;
  j["sensitivity"] = d.sensitivity;
  j["scale-k"] = d.scale_k ? json(*d.scale_k) : json(nullptr);
  j["age-grid"] = d.age_grid;
  j["draws"] = d.draws;
  j["trees"] = d.trees;
  j["burn"] = d.burn;
  j["keep"] = d.keep;
  j["response-trees"] = d.response_trees;
  return j;
}

WaveFitOptions fit_options(const DataOptions& d, std::uint64_t seed, std::size_t threads) {
  WaveFitOptions f;
  f.outcome.n_trees = d.trees;
  f.outcome.n_burn = d.burn;
  f.outcome.n_keep = d.keep;
  f.response.n_trees = d.response_trees;
  f.response.n_burn = d.burn;
  f.response.n_keep = d.keep;
  f.seed = seed;
  f.threads = threads;
  return f;
}

SensitivityConfig load_sensitivity(const DataOptions& d, std::size_t waves, bool required) {
  if (d.sensitivity.empty() && required) throw ConfigError("--sensitivity is required");
  SensitivityConfig s = d.sensitivity.empty() ? SensitivityConfig::zeros(waves) : SensitivityConfig::load(d.sensitivity, waves);
  if (d.scale_k) s.scale_k = *d.scale_k;
  s.validate(waves);
  return s;
}

PpcmOptions ppcm_options(const DataOptions& d, std::uint64_t seed, std::size_t threads) {
  PpcmOptions o;
  o.n_posterior = d.draws;
  o.seed = seed;
  o.threads = threads;
  if (!d.age_grid.empty()) {
    o.age_grid = parse_age_grid(d.age_grid);
    o.by_age = true;
  }
  return o;
}

// Baseline covariates with more than 10 distinct cohort values count as continuous.
std::vector<alt::CellVariable> typed_baseline(const data::CohortFrame& cohort) {
  std::vector<alt::CellVariable> vars;
  const auto& names = cohort.schema().covariates[0];
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::set<double> distinct;
    for (std::size_t i = 0; i < cohort.units() && distinct.size() <= 10; ++i) distinct.insert(cohort.covariate(i, 0, j));
    vars.push_back({names[j], distinct.size() > 10});
  }
  return vars;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  CommonOptions common;
  std::optional<int> scenario;
  std::size_t reps = 200;
  std::string estimators = "sample,mb-sp,mb-lm,ht,greg,mrp";
  std::size_t population_size = 10000;
  std::size_t sample_size = 1000;
  std::size_t trees = 100;
  std::size_t burn = 500;
  std::size_t keep = 500;
  std::optional<std::size_t> draws;
  std::size_t linear_draws = 1000;
  std::size_t mrp_burn = 500;
  std::size_t mrp_keep = 500;
  double practice_bound = 0.15;
  bool write_data = false;
};

void run_simulate(const CLI::App& app, SimulateOptions& o) {
  ConfigFile cfg = ConfigFile::load(o.common.config);
  apply_common(app, cfg, o.common);
  cfg.apply_optional(app, "scenario", o.scenario);
  cfg.apply(app, "reps", o.reps);
  cfg.apply(app, "estimators", o.estimators);
  cfg.apply(app, "population-size", o.population_size);
  cfg.apply(app, "sample-size", o.sample_size);
  cfg.apply(app, "trees", o.trees);
  cfg.apply(app, "burn", o.burn);
  cfg.apply(app, "keep", o.keep);
  cfg.apply_optional(app, "draws", o.draws);
  cfg.apply(app, "linear-draws", o.linear_draws);
  cfg.apply(app, "mrp-burn", o.mrp_burn);
  cfg.apply(app, "mrp-keep", o.mrp_keep);
  cfg.apply(app, "practice-bound", o.practice_bound);
  cfg.apply(app, "write-data", o.write_data);
  cfg.check_all_used();
  if (!o.scenario) throw ConfigError("--scenario is required");

  metrics::StudyConfig sc;
  sc.scenario.id = *o.scenario;
  sc.scenario.population_size = o.population_size;
  sc.scenario.sample_size = o.sample_size;
  sc.scenario.validate();
  sc.estimators = split_list(o.estimators);
  metrics::validate_estimators(sc.estimators);
  if (o.reps == 0) throw ConfigError("--reps must be at least 1");
  sc.replicates = o.reps;
  sc.seed = resolve_seed(o.common.seed);
  sc.outcome.n_trees = o.trees;
  sc.outcome.n_burn = o.burn;
  sc.outcome.n_keep = o.keep;
  sc.outcome.validate();
  sc.n_posterior = o.draws.value_or(o.keep);
  sc.linear_draws = o.linear_draws;
  sc.mrp.n_burn = o.mrp_burn;
  sc.mrp.n_keep = o.mrp_keep;
  sc.practice_bound = o.practice_bound;
  sc.threads = resolve_threads(o.common.threads);

  const auto dir = prepare_out_dir(o.common.out);
  std::vector<std::string> outputs{"results.csv", "summary.csv"};
  if (o.write_data) {
    std::filesystem::create_directories(dir / "data");
    data::WaveSchema schema;
    schema.covariates = {sim::covariate_names(), {}};
    write_file(dir / "data" / "schema.json", schema.to_json() + "\n");
    outputs.push_back("data/schema.json");
    for (std::size_t r = 0; r < o.reps; ++r) {
      sim::ScenarioSpec spec = sc.scenario;
      spec.seed = sc.seed;
      spec.replicate = r;
      const auto rep = sim::gen_replicate(spec);
      const std::string stem = "rep_" + std::to_string(r);
      data::save_population((dir / "data" / (stem + "_population.csv")).string(), rep.population);
      data::save_cohort((dir / "data" / (stem + "_cohort.csv")).string(), rep.cohort);
      outputs.push_back("data/" + stem + "_population.csv");
      outputs.push_back("data/" + stem + "_cohort.csv");
    }
  }

  const auto results = metrics::run_study(sc);
  std::string rcsv = "replicate,estimator,point,lo95,hi95,truth,ok,error\n";
  std::size_t failures = 0;
  for (const auto& r : results) {
    failures += r.ok ? 0 : 1;
    rcsv += std::to_string(r.replicate) + "," + r.estimator + "," + (r.ok ? num(r.point) : "") + "," +
            (r.ok ? num(r.lo) : "") + "," + (r.ok ? num(r.hi) : "") + "," + num(r.truth) + "," + (r.ok ? "1" : "0") +
            "," + csv_field(r.error) + "\n";
  }
  write_file(dir / "results.csv", rcsv);

  std::string scsv = "scenario,estimator,bias_x100,sd_x100,mse,cp_pct\n";
  for (const auto& row : metrics::summarize(results)) {
    scsv += std::to_string(sc.scenario.id) + "," + row.estimator + "," + num(100.0 * row.bias) + "," +
            (row.sd ? num(100.0 * *row.sd) : "") + "," + num(row.mse) + "," + (row.cp ? num(*row.cp) : "") + "\n";
  }
  write_file(dir / "summary.csv", scsv);
  if (failures > 0) std::cerr << "warning: " << failures << " estimator replicate(s) failed; see results.csv\n";

  json c;
  c["scenario"] = sc.scenario.id;
  c["reps"] = o.reps;
  c["estimators"] = sc.estimators;
  c["population-size"] = o.population_size;
  c["sample-size"] = o.sample_size;
  c["trees"] = o.trees;
  c["burn"] = o.burn;
  c["keep"] = o.keep;
  c["draws"] = sc.n_posterior;
  c["linear-draws"] = o.linear_draws;
  c["mrp-burn"] = o.mrp_burn;
  c["mrp-keep"] = o.mrp_keep;
  c["practice-bound"] = o.practice_bound;
  c["write-data"] = o.write_data;
  outputs.push_back("manifest.json");
  write_manifest(dir, manifest("simulate", sc.seed, sc.threads, c, outputs));
}

// -------------------------------------------------------------------- ppcm

struct PpcmCommandOptions {
  CommonOptions common;
  DataOptions data;
  std::string mode = "mortal";
};

void run_ppcm(const CLI::App& app, PpcmCommandOptions& o) {
  ConfigFile cfg = ConfigFile::load(o.common.config);
  apply_common(app, cfg, o.common);
  apply_data(app, cfg, o.data);
  cfg.apply(app, "mode", o.mode);
  cfg.check_all_used();
  if (o.mode != "mortal" && o.mode != "immortal") throw ConfigError("--mode must be mortal or immortal");

  const std::uint64_t seed = resolve_seed(o.common.seed);
  const std::size_t threads = resolve_threads(o.common.threads);
  PpcmOptions opts = ppcm_options(o.data, seed, threads);
  const Inputs in = load_inputs(o.data.schema, o.data.population, o.data.cohort);
  const SensitivityConfig sens = load_sensitivity(o.data, in.population.waves(), false);
  opts.mode = o.mode == "immortal" ? CohortMode::kImmortal : CohortMode::kMortal;
  if (opts.mode == CohortMode::kImmortal && !sens.all_zero()) {
    std::cerr << "warning: immortal mode ignores the sensitivity offsets\n";
  }
  const auto dir = prepare_out_dir(o.common.out);
  const PpcmPosterior post = estimate_ppcm(in.population, in.cohort, fit_options(o.data, seed, threads), sens, opts);

  std::vector<std::string> outputs{"posterior.csv", "summary.csv"};
  write_file(dir / "posterior.csv", posterior_csv(post));
  write_file(dir / "summary.csv", summary_csv(post));
  if (opts.by_age) {
    std::string curves = curve_header();
    append_curve_rows(curves, post, o.mode == "immortal" ? "immortal" : "mb-sp");
    write_file(dir / "curves.csv", curves);
    outputs.push_back("curves.csv");
  }
  json c = data_json(o.data);
  c["mode"] = o.mode;
  c["resolved-sensitivity"] = json::parse(sens.to_json());
  outputs.push_back("manifest.json");
  write_manifest(dir, manifest("ppcm", seed, threads, c, outputs));
}

// ------------------------------------------------------------- sensitivity

struct SensitivityCommandOptions {
  CommonOptions common;
  DataOptions data;
};

void run_sensitivity(const CLI::App& app, SensitivityCommandOptions& o) {
  ConfigFile cfg = ConfigFile::load(o.common.config);
  apply_common(app, cfg, o.common);
  apply_data(app, cfg, o.data);
  cfg.check_all_used();

  const std::uint64_t seed = resolve_seed(o.common.seed);
  const std::size_t threads = resolve_threads(o.common.threads);
  PpcmOptions opts = ppcm_options(o.data, seed, threads);
  const Inputs in = load_inputs(o.data.schema, o.data.population, o.data.cohort);
  const std::size_t waves = in.population.waves();
  const SensitivityConfig main = load_sensitivity(o.data, waves, true);
  if (!opts.age_grid) opts.age_grid = default_age_grid(in.population);
  opts.by_age = true;
  const auto dir = prepare_out_dir(o.common.out);

  WaveFitOptions fit = fit_options(o.data, seed, threads);
  fit.fit_response = true;
  const WaveModels models = fit_bart_wave_models(in.cohort, fit);

  const std::vector<std::pair<std::string, SensitivityConfig>> settings{
      {"i", main.with_dropout_zeroed()},
      {"ii", main.with_practice_zeroed()},
      {"iii", main.scaled(2.0)},
      {"iv", SensitivityConfig::zeros(waves)},
  };
  std::string combined = curve_header();
  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, const PpcmPosterior& post) {
    std::string curves = curve_header();
    append_curve_rows(curves, post, name);
    append_curve_rows(combined, post, name);
    write_file(dir / ("curves_" + name + ".csv"), curves);
    outputs.push_back("curves_" + name + ".csv");
  };
  for (const auto& [name, sens] : settings) emit(name, estimate_ppcm_with_models(in.population, models, sens, opts));
  emit("immortal", estimate_ppcm_immortal(in.population, in.cohort, fit, opts));
  write_file(dir / "curves.csv", combined);
  outputs.push_back("curves.csv");

  json c = data_json(o.data);
  c["resolved-age-grid"] = *opts.age_grid;
  for (const auto& [name, sens] : settings) c["settings"][name] = json::parse(sens.to_json());
  outputs.push_back("manifest.json");
  write_manifest(dir, manifest("sensitivity", seed, threads, c, outputs));
}

// ----------------------------------------------------------------- compare

struct CompareOptions {
  CommonOptions common;
  DataOptions data;
  std::string estimators = "mb-sp,mb-lm,ht,greg,mrp";
  std::string cell_vars;
  std::string mrp_fixed;
  std::string mrp_random;
  std::size_t mrp_burn = 500;
  std::size_t mrp_keep = 500;
};

const std::vector<std::string>& compare_names() {
  static const std::vector<std::string> names{"mb-sp", "mb-lm", "ht", "greg", "mrp"};
  return names;
}

std::vector<std::string> checked_compare_list(const std::string& text) {
  const auto list = split_list(text);
  if (list.empty()) throw ConfigError("no estimators requested");
  const auto& valid = compare_names();
  for (const auto& n : list) {
    if (std::find(valid.begin(), valid.end(), n) == valid.end()) {
      std::string all;
      for (const auto& v : valid) all += (all.empty() ? "" : ", ") + v;
      throw ConfigError("unknown estimator '" + n + "' (valid: " + all + ")");
    }
  }
  return list;
}

std::string design_summary(const std::vector<metrics::Interval>& waves, const std::vector<double>& points,
                           const std::vector<std::optional<double>>& ages, const std::vector<double>& grid) {
  std::string csv = "target,point,lo95,hi95\n";
  for (std::size_t t = 0; t < waves.size(); ++t) {
    csv += wave_target(t) + "," + num(points[t]) + "," + num(waves[t].lo) + "," + num(waves[t].hi) + "\n";
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    csv += age_target(grid[g]) + "," + (ages[g] ? num(*ages[g]) : "") + ",,\n";
  }
  return csv;
}

void run_compare(const CLI::App& app, CompareOptions& o) {
  ConfigFile cfg = ConfigFile::load(o.common.config);
  apply_common(app, cfg, o.common);
  apply_data(app, cfg, o.data);
  cfg.apply(app, "estimators", o.estimators);
  cfg.apply(app, "cell-vars", o.cell_vars);
  cfg.apply(app, "mrp-fixed", o.mrp_fixed);
  cfg.apply(app, "mrp-random", o.mrp_random);
  cfg.apply(app, "mrp-burn", o.mrp_burn);
  cfg.apply(app, "mrp-keep", o.mrp_keep);
  cfg.check_all_used();
  const auto names = checked_compare_list(o.estimators);
  if (!o.data.sensitivity.empty()) std::cerr << "warning: compare runs every estimator with zero offsets\n";

  const std::uint64_t seed = resolve_seed(o.common.seed);
  const std::size_t threads = resolve_threads(o.common.threads);
  PpcmOptions opts = ppcm_options(o.data, seed, threads);
  opts.response_policy = ResponsePolicy::kWhenNeeded;
  const Inputs in = load_inputs(o.data.schema, o.data.population, o.data.cohort);
  const std::size_t waves = in.population.waves();
  if (!opts.age_grid && in.population.has_age()) opts.age_grid = default_age_grid(in.population);
  opts.by_age = opts.age_grid.has_value();
  const std::vector<double> grid = opts.age_grid.value_or(std::vector<double>{});
  const SensitivityConfig zero = SensitivityConfig::zeros(waves);

  const auto typed = typed_baseline(in.cohort);
  auto lookup = [&](const std::string& name) {
    for (const auto& v : typed) {
      if (v.name == name) return v;
    }
    throw ConfigError("'" + name + "' is not a baseline covariate");
  };
  const auto dir = prepare_out_dir(o.common.out);

  std::optional<alt::CellTable> cells;
  std::optional<alt::ParticipationModel> participation;
  auto design = [&] {
    if (cells) return;
    std::vector<alt::CellVariable> vars;
    if (o.cell_vars.empty()) {
      vars = typed;
    } else {
      for (const auto& n : split_list(o.cell_vars)) vars.push_back(lookup(n));
    }
    cells = alt::build_cells(in.population, in.cohort, vars);
    participation = alt::fit_participation(in.cohort);
    for (const auto& m : cells->merges) {
      std::cerr << "note: merged a cell with " << m.sample_count << " sample unit(s) into a neighbour\n";
    }
  };

  std::string curves = curve_header();
  std::vector<std::string> outputs;
  for (const auto& name : names) {
    std::string summary;
    if (name == "mb-sp" || name == "mb-lm" || name == "mrp") {
      PpcmPosterior post;
      if (name == "mb-sp") {
        post = estimate_ppcm(in.population, in.cohort, fit_options(o.data, seed, threads), zero, opts);
      } else if (name == "mb-lm") {
        const WaveModels m = alt::fit_linear_wave_models(in.cohort, o.data.draws,
                                                         derive_seed(seed, StreamPurpose::kLinear), threads);
        post = estimate_ppcm_with_models(in.population, m, zero, opts);
      } else {
        alt::MrpSpec spec;
        if (o.mrp_fixed.empty() && o.mrp_random.empty()) {
          for (const auto& v : typed) (v.continuous ? spec.random_effects : spec.fixed_effects).push_back(v.name);
        } else {
          spec.fixed_effects = split_list(o.mrp_fixed);
          spec.random_effects = split_list(o.mrp_random);
        }
        alt::MrpConfig mc;
        mc.n_burn = o.mrp_burn;
        mc.n_keep = o.mrp_keep;
        mc.seed = derive_seed(seed, StreamPurpose::kMrp);
        alt::MrpFitReport report;
        const WaveModels m = alt::fit_mrp_wave_models(in.cohort, spec, mc, threads, &report);
        for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
        post = estimate_ppcm_with_models(in.population, m, zero, opts);
      }
      summary = summary_csv(post);
      append_curve_rows(curves, post, name);
    } else {
      design();
      std::vector<metrics::Interval> intervals;
      std::vector<double> points;
      for (std::size_t t = 0; t < waves; ++t) {
        if (name == "ht") {
          const auto e = alt::ht_estimate(in.cohort, *cells, *participation, t);
          points.push_back(e.point);
          intervals.push_back({e.lo, e.hi});
        } else {
          const auto e = alt::greg_estimate(in.population, in.cohort, *cells, *participation, t);
          points.push_back(e.point);
          intervals.push_back({e.lo, e.hi});
        }
      }
      std::vector<std::optional<double>> ages;
      if (!grid.empty()) {
        ages = name == "ht" ? alt::ht_by_age(in.population, in.cohort, *cells, *participation, grid)
                            : alt::greg_by_age(in.population, in.cohort, *cells, *participation, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
          if (ages[g]) curves += data::format_number(grid[g]) + "," + name + ",point," + num(*ages[g]) + "\n";
        }
      }
      summary = design_summary(intervals, points, ages, grid);
    }
    write_file(dir / ("summary_" + name + ".csv"), summary);
    outputs.push_back("summary_" + name + ".csv");
  }
  if (!grid.empty()) {
    write_file(dir / "curves.csv", curves);
    outputs.push_back("curves.csv");
  }

  json c = data_json(o.data);
  c["estimators"] = names;
  c["cell-vars"] = o.cell_vars;
  c["mrp-fixed"] = o.mrp_fixed;
  c["mrp-random"] = o.mrp_random;
  c["mrp-burn"] = o.mrp_burn;
  c["mrp-keep"] = o.mrp_keep;
  c["resolved-age-grid"] = grid;
  outputs.push_back("manifest.json");
  write_manifest(dir, manifest("compare", seed, threads, c, outputs));
}

}  // namespace

Command add_simulate(CLI::App& root) {
  auto o = std::make_shared<SimulateOptions>();
  CLI::App* app = root.add_subcommand("simulate", "Run a simulation study and summarize bias, SD, MSE and coverage");
  add_common(*app, o->common);
  app->add_option("--scenario", o->scenario, "Scenario id (1-5)");
  app->add_option("--reps", o->reps, "Replicates")->capture_default_str();
  app->add_option("--estimators", o->estimators, "Comma-separated estimator names")->capture_default_str();
  app->add_option("--population-size", o->population_size, "Population size N")->capture_default_str();
  app->add_option("--sample-size", o->sample_size, "Cohort size n")->capture_default_str();
  app->add_option("--trees", o->trees, "Outcome forest size")->capture_default_str();
  app->add_option("--burn", o->burn, "BART burn-in")->capture_default_str();
  app->add_option("--keep", o->keep, "BART draws kept")->capture_default_str();
  app->add_option("--draws", o->draws, "Posterior PPCM draws (default: --keep)");
  app->add_option("--linear-draws", o->linear_draws, "Draws of the linear model")->capture_default_str();
  app->add_option("--mrp-burn", o->mrp_burn, "MRP Gibbs burn-in")->capture_default_str();
  app->add_option("--mrp-keep", o->mrp_keep, "MRP Gibbs draws kept")->capture_default_str();
  app->add_option("--practice-bound", o->practice_bound, "Upper bound b of Tri(0, b, b) for mb-sp-pe")->capture_default_str();
  app->add_flag("--write-data", o->write_data, "Also write each replicate's population and cohort CSVs");
  return {app, [app, o] { run_simulate(*app, *o); }};
}

Command add_ppcm(CLI::App& root) {
  auto o = std::make_shared<PpcmCommandOptions>();
  CLI::App* app = root.add_subcommand("ppcm", "Estimate the PPCM by wave and, with --age-grid, by age");
  add_common(*app, o->common);
  add_data(*app, o->data);
  app->add_option("--mode", o->mode, "mortal or immortal")->capture_default_str();
  return {app, [app, o] { run_ppcm(*app, *o); }};
}

Command add_sensitivity(CLI::App& root) {
  auto o = std::make_shared<SensitivityCommandOptions>();
  CLI::App* app = root.add_subcommand("sensitivity", "Age curves under settings i-iv plus the immortal cohort");
  add_common(*app, o->common);
  add_data(*app, o->data);
  return {app, [app, o] { run_sensitivity(*app, *o); }};
}

Command add_compare(CLI::App& root) {
  auto o = std::make_shared<CompareOptions>();
  CLI::App* app = root.add_subcommand("compare", "Run mb-sp and the comparison estimators on the same data");
  add_common(*app, o->common);
  add_data(*app, o->data);
  app->add_option("--estimators", o->estimators, "Subset of mb-sp,mb-lm,ht,greg,mrp")->capture_default_str();
  app->add_option("--cell-vars", o->cell_vars, "Baseline covariates defining weighting cells (default: all)");
  app->add_option("--mrp-fixed", o->mrp_fixed, "MRP fixed-effect covariates");
  app->add_option("--mrp-random", o->mrp_random, "MRP random-effect covariates");
  app->add_option("--mrp-burn", o->mrp_burn, "MRP Gibbs burn-in")->capture_default_str();
  app->add_option("--mrp-keep", o->mrp_keep, "MRP Gibbs draws kept")->capture_default_str();
  return {app, [app, o] { run_compare(*app, *o); }};
}

}  // namespace ppcm::cli

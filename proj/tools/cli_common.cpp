#include "cli_common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ppcm/csv_io.hpp"
#include "ppcm/error.hpp"
#include "ppcm/parallel.hpp"

namespace ppcm::cli {

ConfigFile ConfigFile::load(const std::string& path) {
  ConfigFile c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  try {
    c.doc_ = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config file '" + path + "': " + e.what());
  }
  if (!c.doc_.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
  return c;
}

bool ConfigFile::given(const CLI::App& app, const std::string& key) const { return app.count("--" + key) > 0; }

void ConfigFile::check_all_used() const {
  std::string unknown;
  for (const auto& [key, value] : doc_.items()) {
    (void)value;
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PPCM_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError(std::string("PPCM_SEED is not an unsigned integer: '") + env + "'");
    return v;
  }
  return 0;
}

std::size_t resolve_threads(std::size_t flag) { return flag == 0 ? default_thread_count() : flag; }

std::vector<double> parse_age_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw ConfigError("age grid '" + text + "' must be lo:hi:step");
    }
    parts.push_back(v);
  }
  if (parts.size() != 3) throw ConfigError("age grid '" + text + "' must be lo:hi:step");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || hi < lo) throw ConfigError("age grid '" + text + "' needs step > 0 and hi >= lo");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double a = lo + static_cast<double>(k) * step;
    if (a > hi + 1e-9 * step) break;
    grid.push_back(a);
  }
  return grid;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

std::string num(double v) { return std::isnan(v) ? std::string() : data::format_number(v); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Inputs load_inputs(const std::string& schema, const std::string& population, const std::string& cohort) {
  if (schema.empty()) throw ConfigError("--schema is required");
  if (population.empty()) throw ConfigError("--population is required");
  if (cohort.empty()) throw ConfigError("--cohort is required");
  data::WaveSchema s = data::WaveSchema::load(schema);
  data::PopulationFrame pop = data::load_population(population, s);
  data::CohortFrame coh = data::load_cohort(cohort, s);
  return {std::move(s), std::move(pop), std::move(coh)};
}

std::string wave_target(std::size_t t) { return "wave_" + std::to_string(t); }
std::string age_target(double a) { return "age_" + data::format_number(a); }

std::string posterior_csv(const PpcmPosterior& post) {
  std::string csv = "draw,wave_or_age,value\n";
  for (std::size_t d = 0; d < post.draws; ++d) {
    for (std::size_t t = 0; t < post.waves; ++t) {
      csv += std::to_string(d) + "," + wave_target(t) + "," + num(post.wave_draw(d, t)) + "\n";
    }
    for (std::size_t g = 0; g < post.age_grid.size(); ++g) {
      csv += std::to_string(d) + "," + age_target(post.age_grid[g]) + "," + num(post.age_draw(d, g)) + "\n";
    }
  }
  return csv;
}

namespace {

void summary_row(std::string& csv, const std::string& target, const std::optional<PosteriorSummary>& s) {
  csv += target + ",";
  if (s) {
    csv += num(s->point) + "," + num(s->lo95) + "," + num(s->hi95);
  } else {
    csv += ",,";
  }
  csv += "\n";
}

}  // namespace

std::string summary_csv(const PpcmPosterior& post) {
  std::string csv = "target,point,lo95,hi95\n";
  for (std::size_t t = 0; t < post.waves; ++t) summary_row(csv, wave_target(t), post.wave_summary[t]);
  for (std::size_t g = 0; g < post.age_grid.size(); ++g) summary_row(csv, age_target(post.age_grid[g]), post.age_summary[g]);
  return csv;
}

void append_curve_rows(std::string& csv, const PpcmPosterior& post, const std::string& method) {
  for (std::size_t g = 0; g < post.age_grid.size(); ++g) {
    const auto& s = post.age_summary[g];
    if (!s) continue;
    const std::string age = data::format_number(post.age_grid[g]);
    csv += age + "," + method + ",point," + num(s->point) + "\n";
    csv += age + "," + method + ",lo95," + num(s->lo95) + "\n";
    csv += age + "," + method + ",hi95," + num(s->hi95) + "\n";
  }
}

json manifest(const std::string& command, std::uint64_t seed, std::size_t threads, const json& config,
              const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["version"] = PPCM_VERSION;
  m["seed"] = seed;
  m["threads"] = threads;
  m["config"] = config;
  m["outputs"] = outputs;
  return m;
}

}  // namespace ppcm::cli

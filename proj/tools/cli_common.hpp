#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppcm/frames.hpp"
#include "ppcm/ppcm_estimator.hpp"

namespace ppcm::cli {

using nlohmann::json;

// Options shared by every subcommand.
struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  // 0 = available parallelism
  std::string out = "ppcm_out";
  std::string config;
};

// Optional JSON config file whose keys are long flag names without the
// leading dashes. Flags given on the command line win.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile load(const std::string& path);

  // Copies key into var unless the flag was passed explicitly.
  template <class T>
  void apply(const CLI::App& app, const std::string& key, T& var) {
    if (!doc_.contains(key)) return;
    used_.push_back(key);
    if (!given(app, key)) var = doc_.at(key).get<T>();
  }
  template <class T>
  void apply_optional(const CLI::App& app, const std::string& key, std::optional<T>& var) {
    if (!doc_.contains(key)) return;
    used_.push_back(key);
    if (!given(app, key)) var = doc_.at(key).get<T>();
  }
  // Throws ConfigError naming keys no apply() call consumed.
  void check_all_used() const;

 private:
  bool given(const CLI::App& app, const std::string& key) const;
  json doc_ = json::object();
  std::vector<std::string> used_;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag);
std::size_t resolve_threads(std::size_t flag);

// "lo:hi:step" -> lo, lo + step, ... up to hi.
std::vector<double> parse_age_grid(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

std::filesystem::path prepare_out_dir(const std::string& dir);

// Numbers print in shortest round-trip form; NaN prints as an empty cell.
std::string num(double v);

void write_file(const std::filesystem::path& path, const std::string& text);

struct Inputs {
  data::WaveSchema schema;
  data::PopulationFrame population;
  data::CohortFrame cohort;
};
Inputs load_inputs(const std::string& schema, const std::string& population, const std::string& cohort);

std::string wave_target(std::size_t t);
std::string age_target(double a);

// CSV bodies shared by ppcm, sensitivity and compare.
std::string posterior_csv(const PpcmPosterior& post);
std::string summary_csv(const PpcmPosterior& post);
void append_curve_rows(std::string& csv, const PpcmPosterior& post, const std::string& method);
inline const char* curve_header() { return "age,method,statistic,value\n"; }

json manifest(const std::string& command, std::uint64_t seed, std::size_t threads, const json& config,
              const std::vector<std::string>& outputs);

}  // namespace ppcm::cli

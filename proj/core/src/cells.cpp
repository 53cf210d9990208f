#include "ppcm/cells.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ppcm/error.hpp"
#include "ppcm/numeric.hpp"

namespace ppcm::alt {
namespace {

std::size_t hamming(const CellKey& a, const CellKey& b) {
  std::size_t d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d += a[k] != b[k] ? 1 : 0;
  return d;
}

std::size_t column_of(const data::Panel& panel, const std::string& name) {
  const auto& cols = panel.schema().covariates[0];
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw ConfigError("cell variable '" + name + "' is not a baseline covariate");
  return static_cast<std::size_t>(it - cols.begin());
}

}  // namespace

std::size_t CellTable::population_total() const {
  std::size_t s = 0;
  for (const auto& c : cells) s += c.population_count;
  return s;
}

std::size_t CellTable::sample_total() const {
  std::size_t s = 0;
  for (const auto& c : cells) s += c.sample_count;
  return s;
}

CellTable build_cells_from_keys(const std::vector<CellKey>& population_keys, const std::vector<CellKey>& sample_keys,
                                std::size_t n_min, double weight_cap) {
  if (!(weight_cap > 0.0)) throw ConfigError("weight cap must be positive");
  std::map<CellKey, std::pair<std::size_t, std::size_t>> raw;  // key -> (N, n)
  for (const auto& k : population_keys) ++raw[k].first;
  for (const auto& k : sample_keys) ++raw[k].second;
  for (const auto& [k, counts] : raw) {
    if (k.size() != raw.begin()->first.size()) throw ConfigError("cell keys differ in length");
    (void)counts;
  }

  std::vector<CellKey> dense;
  for (const auto& [k, counts] : raw) {
    if (counts.second >= n_min) dense.push_back(k);
  }
  if (dense.empty()) throw EstimationError("cell structure degenerate: no cell has at least " + std::to_string(n_min) + " sample units");

  CellTable table;
  std::map<CellKey, std::size_t> index;
  for (const auto& k : dense) {
    index[k] = table.cells.size();
    table.cells.push_back(Cell{k, raw[k].first, raw[k].second, 0.0, 0.0});
  }
  std::map<CellKey, std::size_t> target;  // every raw key -> final cell index
  for (const auto& [k, counts] : raw) {
    if (counts.second >= n_min) {
      target[k] = index[k];
      continue;
    }
    // dense is in ascending key order, so the first best candidate wins ties
    std::size_t best = 0;
    for (std::size_t c = 1; c < dense.size(); ++c) {
      const std::size_t d = hamming(k, dense[c]), db = hamming(k, dense[best]);
      const std::size_t n = raw[dense[c]].second, nb = raw[dense[best]].second;
      if (d < db || (d == db && n > nb)) best = c;
    }
    Cell& into = table.cells[best];
    into.population_count += counts.first;
    into.sample_count += counts.second;
    table.merges.push_back(MergeRecord{k, dense[best], counts.first, counts.second});
    target[k] = best;
  }
  for (auto& c : table.cells) {
    c.raw_weight = static_cast<double>(c.population_count) / static_cast<double>(c.sample_count);
    c.weight = std::min(c.raw_weight, weight_cap);
    if (c.weight < c.raw_weight) table.trims.push_back(TrimRecord{c.key, c.raw_weight, c.weight});
  }
  table.population_cell.reserve(population_keys.size());
  for (const auto& k : population_keys) table.population_cell.push_back(target[k]);
  table.sample_cell.reserve(sample_keys.size());
  for (const auto& k : sample_keys) table.sample_cell.push_back(target[k]);
  return table;
}

CellTable build_cells(const data::Panel& population, const data::Panel& cohort, const std::vector<CellVariable>& vars,
                      std::size_t n_min, double weight_cap) {
  if (vars.empty()) throw ConfigError("cell construction needs at least one variable");
  std::vector<CellKey> pop_keys(population.units(), CellKey(vars.size()));
  std::vector<CellKey> smp_keys(cohort.units(), CellKey(vars.size()));
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const std::size_t jp = column_of(population, vars[v].name);
    const std::size_t js = column_of(cohort, vars[v].name);
    if (vars[v].continuous) {
      std::vector<double> values;
      for (std::size_t i = 0; i < cohort.units(); ++i) values.push_back(cohort.covariate(i, 0, js));
      std::sort(values.begin(), values.end());
      const double c1 = quantile_sorted(values, 1.0 / 3.0), c2 = quantile_sorted(values, 2.0 / 3.0);
      auto tertile = [&](double x) { return x <= c1 ? 0 : (x <= c2 ? 1 : 2); };
      for (std::size_t i = 0; i < population.units(); ++i) pop_keys[i][v] = tertile(population.covariate(i, 0, jp));
      for (std::size_t i = 0; i < cohort.units(); ++i) smp_keys[i][v] = tertile(cohort.covariate(i, 0, js));
    } else {
      for (std::size_t i = 0; i < population.units(); ++i) {
        pop_keys[i][v] = static_cast<int>(std::lround(population.covariate(i, 0, jp)));
      }
      for (std::size_t i = 0; i < cohort.units(); ++i) {
        smp_keys[i][v] = static_cast<int>(std::lround(cohort.covariate(i, 0, js)));
      }
    }
  }
  return build_cells_from_keys(pop_keys, smp_keys, n_min, weight_cap);
}

}  // namespace ppcm::alt

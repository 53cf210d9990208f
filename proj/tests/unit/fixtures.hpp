#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppcm/frames.hpp"

namespace fixtures {

// Panel with one baseline covariate "x" and optional ages. alive/ages are
// per unit, per wave.
inline ppcm::data::PanelData panel(const std::vector<std::vector<int>>& alive, const std::vector<double>& x,
                                   const std::vector<std::vector<double>>& ages = {}) {
  using namespace ppcm::data;
  PanelData d;
  const std::size_t waves = alive.front().size();
  d.schema.covariates.assign(waves, {});
  d.schema.covariates[0] = {"x"};
  if (!ages.empty()) d.schema.age_column = "age";
  d.covariates.resize(waves);
  for (std::size_t i = 0; i < alive.size(); ++i) {
    d.unit_ids.push_back("u" + std::to_string(i));
    for (std::size_t t = 0; t < waves; ++t) {
      d.alive.push_back(static_cast<std::uint8_t>(alive[i][t]));
      if (!ages.empty()) d.age.push_back(alive[i][t] ? ages[i][t] : kMissing);
    }
    d.covariates[0].push_back(x[i]);
  }
  return d;
}

inline ppcm::data::PopulationFrame population(const std::vector<std::vector<int>>& alive, const std::vector<double>& x,
                                              const std::vector<std::vector<double>>& ages = {}) {
  return ppcm::data::PopulationFrame(panel(alive, x, ages));
}

inline ppcm::data::CohortFrame cohort(const std::vector<std::vector<int>>& alive,
                                      const std::vector<std::vector<int>>& responded,
                                      const std::vector<std::vector<double>>& outcome, const std::vector<double>& x,
                                      const std::vector<std::vector<double>>& ages = {}) {
  using namespace ppcm::data;
  CohortData cd;
  cd.panel = panel(alive, x, ages);
  for (std::size_t i = 0; i < alive.size(); ++i) {
    for (std::size_t t = 0; t < alive[i].size(); ++t) {
      const bool obs = responded[i][t] && alive[i][t];
      cd.responded.push_back(static_cast<std::uint8_t>(responded[i][t]));
      cd.outcome.push_back(obs ? outcome[i][t] : kMissing);
    }
  }
  return CohortFrame(std::move(cd));
}

inline std::vector<std::vector<int>> all_alive(std::size_t n, std::size_t waves) {
  return std::vector<std::vector<int>>(n, std::vector<int>(waves, 1));
}

}  // namespace fixtures

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ppcm/frames.hpp"

namespace ppcm::alt {

using CellKey = std::vector<int>;

struct Cell {
  CellKey key;
  std::size_t population_count = 0;  // N_j
  std::size_t sample_count = 0;      // n_j
  double raw_weight = 0.0;           // N_j / n_j
  double weight = 0.0;               // after trimming
};

struct MergeRecord {
  CellKey from;
  CellKey into;
  std::size_t population_count = 0;
  std::size_t sample_count = 0;
};

struct TrimRecord {
  CellKey key;
  double raw_weight = 0.0;
  double weight = 0.0;
};

struct CellTable {
  std::vector<Cell> cells;
  std::vector<MergeRecord> merges;
  std::vector<TrimRecord> trims;
  std::vector<std::size_t> population_cell;  // population unit -> cell index
  std::vector<std::size_t> sample_cell;      // cohort unit -> cell index

  std::size_t population_total() const;
  std::size_t sample_total() const;
  double sample_weight(std::size_t i) const { return cells[sample_cell[i]].weight; }
};

struct CellVariable {
  std::string name;  // baseline covariate
  bool continuous = false;
};

// Cells from precomputed keys. Cells with n_j < n_min merge into the
// Hamming-nearest cell with n_j >= n_min (ties: larger n_j, then smaller
// key); weights N_j / n_j are then capped at weight_cap.
CellTable build_cells_from_keys(const std::vector<CellKey>& population_keys, const std::vector<CellKey>& sample_keys,
                                std::size_t n_min = 20, double weight_cap = 30.0);

// Continuous variables are cut at the sample tertiles; other variables use
// their values rounded to integers as categories.
CellTable build_cells(const data::Panel& population, const data::Panel& cohort, const std::vector<CellVariable>& vars,
                      std::size_t n_min = 20, double weight_cap = 30.0);

}  // namespace ppcm::alt

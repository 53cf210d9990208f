#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ppcm/frames.hpp"

namespace ppcm::data {

// Long-format CSV (UTF-8, header row, one row per unit and wave):
//   unit_id, wave, alive[, responded, outcome][, <age>], <covariates...>
// An empty cell is a null. Every unit must have a row for each wave
// 0..T; rows may appear in any order and units keep first-seen order.
PopulationFrame load_population(const std::string& path, const WaveSchema& schema);
CohortFrame load_cohort(const std::string& path, const WaveSchema& schema);

PopulationFrame read_population(std::istream& in, const WaveSchema& schema,
                                const std::string& source = "<stream>");
CohortFrame read_cohort(std::istream& in, const WaveSchema& schema,
                        const std::string& source = "<stream>");

void write_population(std::ostream& out, const PopulationFrame& frame);
void write_cohort(std::ostream& out, const CohortFrame& frame);
void save_population(const std::string& path, const PopulationFrame& frame);
void save_cohort(const std::string& path, const CohortFrame& frame);

// Shortest representation that parses back to the same double.
std::string format_number(double value);
// Splits one CSV record; honours double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ppcm::data

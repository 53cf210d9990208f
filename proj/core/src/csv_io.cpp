#include "ppcm/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "ppcm/error.hpp"

namespace ppcm::data {
namespace {

struct Columns {
  std::size_t unit_id = 0;
  std::size_t wave = 0;
  std::size_t alive = 0;
  std::size_t responded = 0;
  std::size_t outcome = 0;
  std::size_t age = 0;
  std::map<std::string, std::size_t> covariate;
};

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::size_t require(const std::unordered_map<std::string, std::size_t>& header,
                    const std::string& name, const std::string& source) {
  const auto it = header.find(name);
  if (it == header.end()) throw SchemaError(source + ": missing column '" + name + "'");
  return it->second;
}

double parse_real(const std::string& cell, const std::string& ctx) {
  if (cell.empty()) return kMissing;
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(ctx + ": not a number: '" + cell + "'");
  return v;
}

std::uint8_t parse_flag(const std::string& cell, const std::string& ctx) {
  if (cell == "1") return 1;
  if (cell == "0") return 0;
  throw ParseError(ctx + ": expected 0 or 1, got '" + cell + "'");
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct RawUnit {
  std::vector<bool> seen;
  std::vector<std::uint8_t> alive, responded;
  std::vector<double> outcome, age;
  std::vector<std::vector<double>> covariates;
};

CohortData read_frame(std::istream& in, const WaveSchema& schema, const std::string& source,
                      bool cohort) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty file");
  const auto header_cells = split_csv_line(strip_cr(line));
  std::unordered_map<std::string, std::size_t> header;
  for (std::size_t c = 0; c < header_cells.size(); ++c) {
    if (!header.emplace(header_cells[c], c).second) {
      throw SchemaError(source + ": duplicate column '" + header_cells[c] + "'");
    }
  }
  Columns cols;
  cols.unit_id = require(header, "unit_id", source);
  cols.wave = require(header, "wave", source);
  cols.alive = require(header, "alive", source);
  if (cohort) {
    cols.responded = require(header, "responded", source);
    cols.outcome = require(header, "outcome", source);
  }
  if (schema.age_column) cols.age = require(header, *schema.age_column, source);
  for (const auto& name : schema.all_covariates()) cols.covariate[name] = require(header, name, source);

  const std::size_t waves = schema.wave_count();
  std::vector<std::string> order;
  std::unordered_map<std::string, RawUnit> units;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::string ctx = source + ":" + std::to_string(line_no);
    const auto cells = split_csv_line(line);
    if (cells.size() != header_cells.size()) {
      throw ParseError(ctx + ": expected " + std::to_string(header_cells.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }
    const std::string& id = cells[cols.unit_id];
    if (id.empty()) throw ParseError(ctx + ": empty unit_id");
    std::size_t t = 0;
    {
      const auto& w = cells[cols.wave];
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), t);
      if (ec != std::errc() || ptr != w.data() + w.size()) {
        throw ParseError(ctx + ": invalid wave '" + w + "'");
      }
    }
    if (t >= waves) throw SchemaError(ctx + ": wave " + std::to_string(t) + " beyond schema");
    auto [it, inserted] = units.try_emplace(id);
    RawUnit& u = it->second;
    if (inserted) {
      order.push_back(id);
      u.seen.assign(waves, false);
      u.alive.assign(waves, 0);
      u.responded.assign(waves, 0);
      u.outcome.assign(waves, kMissing);
      u.age.assign(waves, kMissing);
      u.covariates.resize(waves);
      for (std::size_t k = 0; k < waves; ++k) u.covariates[k].assign(schema.covariates[k].size(), kMissing);
    }
    if (u.seen[t]) throw ParseError(ctx + ": duplicate row for unit '" + id + "' wave " + std::to_string(t));
    u.seen[t] = true;
    u.alive[t] = parse_flag(cells[cols.alive], ctx);
    if (cohort) {
      u.responded[t] = parse_flag(cells[cols.responded], ctx);
      u.outcome[t] = parse_real(cells[cols.outcome], ctx);
    }
    if (schema.age_column) u.age[t] = parse_real(cells[cols.age], ctx);
    for (std::size_t j = 0; j < schema.covariates[t].size(); ++j) {
      u.covariates[t][j] = parse_real(cells[cols.covariate.at(schema.covariates[t][j])], ctx);
    }
  }

  CohortData data;
  data.panel.schema = schema;
  data.panel.covariates.resize(waves);
  for (const auto& id : order) {
    const RawUnit& u = units.at(id);
    for (std::size_t t = 0; t < waves; ++t) {
      if (!u.seen[t]) {
        throw SchemaError(source + ": unit '" + id + "' has no row for wave " + std::to_string(t));
      }
    }
    data.panel.unit_ids.push_back(id);
    data.panel.alive.insert(data.panel.alive.end(), u.alive.begin(), u.alive.end());
    if (schema.age_column) data.panel.age.insert(data.panel.age.end(), u.age.begin(), u.age.end());
    for (std::size_t t = 0; t < waves; ++t) {
      auto& block = data.panel.covariates[t];
      block.insert(block.end(), u.covariates[t].begin(), u.covariates[t].end());
    }
    data.responded.insert(data.responded.end(), u.responded.begin(), u.responded.end());
    data.outcome.insert(data.outcome.end(), u.outcome.begin(), u.outcome.end());
  }
  return data;
}

template <class Frame>
Frame with_context(const std::string& source, auto&& make) {
  try {
    return make();
  } catch (const InvariantError& e) {
    throw InvariantError(source + ": " + e.what());
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    if (msg.rfind(source, 0) == 0) throw;
    throw SchemaError(source + ": " + msg);
  }
}

void write_frame(std::ostream& out, const Panel& frame, const CohortFrame* cohort) {
  const WaveSchema& schema = frame.schema();
  const auto names = schema.all_covariates();
  out << "unit_id,wave,alive";
  if (cohort) out << ",responded,outcome";
  if (schema.age_column) out << ',' << *schema.age_column;
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < frame.units(); ++i) {
    for (std::size_t t = 0; t < frame.waves(); ++t) {
      out << quote_if_needed(frame.unit_id(i)) << ',' << t << ',' << (frame.alive(i, t) ? 1 : 0);
      if (cohort) {
        out << ',' << (cohort->responded(i, t) ? 1 : 0) << ',';
        if (!is_missing(cohort->outcome(i, t))) out << format_number(cohort->outcome(i, t));
      }
      if (schema.age_column) {
        out << ',';
        if (!is_missing(frame.age(i, t))) out << format_number(frame.age(i, t));
      }
      for (const auto& name : names) {
        out << ',';
        const auto& wave_names = schema.covariates[t];
        for (std::size_t j = 0; j < wave_names.size(); ++j) {
          if (wave_names[j] == name) {
            const double v = frame.covariate(i, t, j);
            if (!is_missing(v)) out << format_number(v);
            break;
          }
        }
      }
      out << '\n';
    }
  }
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  cells.push_back(std::move(cell));
  return cells;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

PopulationFrame read_population(std::istream& in, const WaveSchema& schema, const std::string& source) {
  return with_context<PopulationFrame>(source, [&] {
    return PopulationFrame(read_frame(in, schema, source, false).panel);
  });
}

CohortFrame read_cohort(std::istream& in, const WaveSchema& schema, const std::string& source) {
  return with_context<CohortFrame>(source, [&] { return CohortFrame(read_frame(in, schema, source, true)); });
}

PopulationFrame load_population(const std::string& path, const WaveSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open population file '" + path + "'");
  return read_population(in, schema, path);
}

CohortFrame load_cohort(const std::string& path, const WaveSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open cohort file '" + path + "'");
  return read_cohort(in, schema, path);
}

void write_population(std::ostream& out, const PopulationFrame& frame) { write_frame(out, frame, nullptr); }
void write_cohort(std::ostream& out, const CohortFrame& frame) { write_frame(out, frame, &frame); }

void save_population(const std::string& path, const PopulationFrame& frame) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_population(out, frame);
}

void save_cohort(const std::string& path, const CohortFrame& frame) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_cohort(out, frame);
}

}  // namespace ppcm::data

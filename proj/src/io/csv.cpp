#include "resq/io/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/io/keyval.hpp"
#include "resq/units.hpp"

namespace resq::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double cell_double(const Table& table, std::size_t row, std::size_t col,
                   const std::filesystem::path& path) {
  try {
    return units::parse_double(table.rows[row][col]);
  } catch (const ParseError&) {
    throw ParseError(path.string() + ": row " + std::to_string(row + 1) + ", column '" +
                     table.header[col] + "': not a number: " + table.rows[row][col]);
  }
}

void require_header(const Table& table, const std::vector<std::string>& expected,
                    std::size_t optional_from, const std::filesystem::path& path) {
  const bool size_ok =
      table.header.size() >= optional_from && table.header.size() <= expected.size();
  bool names_ok = size_ok;
  for (std::size_t i = 0; names_ok && i < table.header.size(); ++i)
    names_ok = lower(table.header[i]) == expected[i];
  if (!names_ok) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ",";
      want += expected[i];
      if (i + 1 == optional_from) want += "[";
    }
    if (optional_from < expected.size()) want += "]";
    throw ParseError(path.string() + ": expected header '" + want + "'");
  }
}

std::map<std::string, std::string> sweep_meta(const LossSweep& sweep,
                                              const std::map<std::string, std::string>& extra) {
  std::map<std::string, std::string> meta = extra;
  meta["axis"] = to_string(sweep.axis);
  if (sweep.frequency > 0.0) meta["frequency_hz"] = format_double(sweep.frequency);
  if (sweep.n_bridges > 0) meta["n_bridges"] = std::to_string(sweep.n_bridges);
  if (!sweep.label.empty()) meta["label"] = sweep.label;
  return meta;
}

}  // namespace

std::string format_double(double value) {
  // Report tables carry nan for out-of-domain cells (e.g. lambda above tc);
  // the round-trip probe below would choke on it.
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (units::parse_double(buf) == value) break;
  }
  return buf;
}

Table read_table(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  Table table;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        const std::string key = trim(t.substr(1, eq - 1));
        const std::string value = trim(t.substr(eq + 1));
        if (!key.empty()) table.meta[key] = value;
      }
      continue;
    }
    auto cells = split_cells(t);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw ParseError(path.string() + ": no header row");
  return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::string out;
  for (const auto& [key, value] : table.meta) out += "# " + key + " = " + value + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ",";
    out += table.header[i];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  write_text_file(path, out);
}

std::map<std::string, std::string> merged_meta(const std::filesystem::path& path,
                                               const std::map<std::string, std::string>& embedded) {
  std::map<std::string, std::string> meta = embedded;
  const std::filesystem::path sidecar = path.string() + ".meta";
  if (std::filesystem::exists(sidecar)) {
    const KeyValDocument doc = load_keyval(sidecar);
    for (const auto& [section, entries] : doc.sections)
      for (const auto& [key, value] : entries) meta[key] = value;
  }
  return meta;
}

TraceFile read_trace(const std::filesystem::path& path) {
  const Table table = read_table(path);
  if (table.header.size() != 3)
    throw ParseError(path.string() +
                     ": expected header 'freq_hz,re,im' or 'freq_hz,mag_db,phase_rad'");
  const std::string c0 = lower(table.header[0]);
  const std::string c1 = lower(table.header[1]);
  const std::string c2 = lower(table.header[2]);
  bool cartesian;
  if (c0 == "freq_hz" && c1 == "re" && c2 == "im") {
    cartesian = true;
  } else if (c0 == "freq_hz" && c1 == "mag_db" && c2 == "phase_rad") {
    cartesian = false;
  } else {
    throw ParseError(path.string() +
                     ": expected header 'freq_hz,re,im' or 'freq_hz,mag_db,phase_rad'");
  }

  TraceFile file;
  file.meta = merged_meta(path, table.meta);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    file.trace.frequency.push_back(cell_double(table, r, 0, path));
    const double a = cell_double(table, r, 1, path);
    const double b = cell_double(table, r, 2, path);
    if (cartesian) {
      file.trace.s21.emplace_back(a, b);
    } else {
      file.trace.s21.push_back(std::polar(std::pow(10.0, a / 20.0), b));
    }
  }
  if (const auto it = file.meta.find("power_dbm"); it != file.meta.end())
    file.trace.applied_power_dbm = units::parse_double(it->second);
  if (const auto it = file.meta.find("attenuation_db"); it != file.meta.end())
    file.trace.line_attenuation_db = units::parse_double(it->second);
  if (const auto it = file.meta.find("temperature_k"); it != file.meta.end())
    file.trace.temperature = units::parse_temperature(it->second);
  if (const auto it = file.meta.find("label"); it != file.meta.end())
    file.trace.label = it->second;
  file.trace.validate();
  return file;
}

void write_trace(const std::filesystem::path& path, const S21Trace& trace,
                 const std::map<std::string, std::string>& extra_meta) {
  trace.validate();
  Table table;
  table.meta = extra_meta;
  if (std::isfinite(trace.applied_power_dbm))
    table.meta["power_dbm"] = format_double(trace.applied_power_dbm);
  if (std::isfinite(trace.line_attenuation_db))
    table.meta["attenuation_db"] = format_double(trace.line_attenuation_db);
  if (std::isfinite(trace.temperature))
    table.meta["temperature_k"] = format_double(trace.temperature);
  if (!trace.label.empty()) table.meta["label"] = trace.label;
  table.header = {"freq_hz", "re", "im"};
  table.rows.reserve(trace.frequency.size());
  for (std::size_t i = 0; i < trace.frequency.size(); ++i)
    table.rows.push_back({format_double(trace.frequency[i]), format_double(trace.s21[i].real()),
                          format_double(trace.s21[i].imag())});
  write_table(path, table);
}

LossSweep read_sweep(const std::filesystem::path& path) {
  const Table table = read_table(path);
  require_header(table, {"x", "qi_inv", "sigma"}, 2, path);
  const auto meta = merged_meta(path, table.meta);
  LossSweep sweep;
  if (const auto it = meta.find("axis"); it != meta.end())
    sweep.axis = parse_sweep_axis(it->second);
  if (const auto it = meta.find("frequency_hz"); it != meta.end())
    sweep.frequency = units::parse_frequency(it->second);
  if (const auto it = meta.find("n_bridges"); it != meta.end())
    sweep.n_bridges = static_cast<int>(units::parse_double(it->second));
  if (const auto it = meta.find("label"); it != meta.end()) sweep.label = it->second;
  const bool has_sigma = table.header.size() == 3;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    sweep.x.push_back(cell_double(table, r, 0, path));
    sweep.qi_inv.push_back(cell_double(table, r, 1, path));
    if (has_sigma) sweep.sigma.push_back(cell_double(table, r, 2, path));
  }
  sweep.validate();
  return sweep;
}

void write_sweep(const std::filesystem::path& path, const LossSweep& sweep,
                 const std::map<std::string, std::string>& extra_meta) {
  sweep.validate();
  Table table;
  table.meta = sweep_meta(sweep, extra_meta);
  const bool has_sigma = !sweep.sigma.empty();
  table.header = {"x", "qi_inv"};
  if (has_sigma) table.header.push_back("sigma");
  for (std::size_t i = 0; i < sweep.x.size(); ++i) {
    std::vector<std::string> row = {format_double(sweep.x[i]), format_double(sweep.qi_inv[i])};
    if (has_sigma) row.push_back(format_double(sweep.sigma[i]));
    table.rows.push_back(std::move(row));
  }
  write_table(path, table);
}

FieldSampleSet read_field_samples(const std::filesystem::path& path) {
  const Table table = read_table(path);
  const auto meta = merged_meta(path, table.meta);

  // Column-mapping adapter: exporters name columns differently; metadata may
  // point each logical column at the exporter's header name.
  const auto column = [&](const char* logical, const char* fallback) {
    std::string name = fallback;
    if (const auto it = meta.find(std::string(logical) + "_column"); it != meta.end())
      name = it->second;
    for (std::size_t i = 0; i < table.header.size(); ++i)
      if (lower(table.header[i]) == lower(name)) return i;
    throw ParseError(path.string() + ": missing column '" + name + "'");
  };
  const std::size_t c_region = column("region", "region");
  const std::size_t c_h = column("h_mag_sq", "h_mag_sq");
  const std::size_t c_w = column("weight", "weight");

  FieldSampleSet set;
  if (const auto it = meta.find("frequency_hz"); it != meta.end())
    set.f_r = units::parse_frequency(it->second);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string region = lower(table.rows[r][c_region]);
    const double h_mag_sq = cell_double(table, r, c_h, path);
    const double weight = cell_double(table, r, c_w, path);
    if (region == "volume") {
      set.volume_samples.push_back({h_mag_sq, weight});
    } else {
      set.surface_samples.push_back({parse_field_region(region), h_mag_sq, weight});
    }
  }
  set.validate();
  return set;
}

void write_field_samples(const std::filesystem::path& path, const FieldSampleSet& set) {
  set.validate();
  Table table;
  if (std::isfinite(set.f_r) && set.f_r > 0.0)
    table.meta["frequency_hz"] = format_double(set.f_r);
  table.header = {"region", "h_mag_sq", "weight"};
  for (const auto& s : set.surface_samples)
    table.rows.push_back(
        {to_string(s.region), format_double(s.h_mag_sq), format_double(s.area_weight)});
  for (const auto& s : set.volume_samples)
    table.rows.push_back({"volume", format_double(s.h_mag_sq), format_double(s.volume_weight)});
  write_table(path, table);
}

}  // namespace resq::io

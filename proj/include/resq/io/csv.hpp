#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "resq/field_participation.hpp"
#include "resq/resonance_fit.hpp"
#include "resq/sweep_analysis.hpp"

namespace resq::io {

// CSV with an optional preamble of "# key = value" metadata lines, then a
// header row, then data rows. Cells are raw strings here; the typed readers
// below do the conversions.
struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double value);  // shortest round-trip-safe decimal

Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

// Metadata for `<path>` may live in the '#' preamble or in a sidecar keyval
// file `<path>.meta`; sidecar entries win on conflict.
std::map<std::string, std::string> merged_meta(const std::filesystem::path& path,
                                               const std::map<std::string, std::string>& embedded);

// Complex traces: columns either (freq_hz, re, im) or (freq_hz, mag_db,
// phase_rad). Recognized metadata keys power_dbm, attenuation_db,
// temperature_k and label populate the trace; everything else rides along.
struct TraceFile {
  S21Trace trace;
  std::map<std::string, std::string> meta;
};
TraceFile read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const S21Trace& trace,
                 const std::map<std::string, std::string>& extra_meta = {});

// Loss sweeps: columns (x, qi_inv[, sigma]); axis, frequency_hz, n_bridges
// and label come from the metadata record.
LossSweep read_sweep(const std::filesystem::path& path);
void write_sweep(const std::filesystem::path& path, const LossSweep& sweep,
                 const std::map<std::string, std::string>& extra_meta = {});

// Field samples: columns (region, h_mag_sq, weight) with region one of chip,
// bridge or volume; frequency_hz metadata fills f_r. Alternative exporter
// layouts are adapted through metadata keys region_column, h_mag_sq_column
// and weight_column naming the columns to use.
FieldSampleSet read_field_samples(const std::filesystem::path& path);
void write_field_samples(const std::filesystem::path& path, const FieldSampleSet& set);

}  // namespace resq::io

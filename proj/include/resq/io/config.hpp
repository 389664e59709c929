#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "resq/material.hpp"

namespace resq::io {

struct FitConfig {
  int max_iterations = 200;
  double tolerance = 1e-12;
  bool use_sigma_weights = true;
  bool bootstrap = false;
  int n_bootstrap = 100;
};

// Run-wide settings. Parsed from a "[section] key = value" file; unknown
// sections or keys are rejected so typos fail loudly.
struct AnalysisConfig {
  std::map<std::string, SuperconductorParams> materials;  // starts with the presets
  double attenuation_db = 70.0;
  GapModel gap_model = GapModel::interpolation;
  double sweep_t_min = 0.4;  // K
  bool shared_q_other = false;
  std::string out_dir = ".";
  std::string format = "json";  // json | csv
  bool cache = true;
  std::uint64_t seed = 1;
  FitConfig fit;

  const SuperconductorParams& material(const std::string& name) const;  // throws ConfigError

  static AnalysisConfig defaults();
  static AnalysisConfig from_text(const std::string& text,
                                  const std::string& origin = "<string>");
  static AnalysisConfig from_file(const std::filesystem::path& path);
};

}  // namespace resq::io

#include "resq/io/config.hpp"

#include <algorithm>

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/io/keyval.hpp"
#include "resq/units.hpp"

namespace resq::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_bool(const std::string& value, const std::string& key) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

int parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  }
}

void apply_general(AnalysisConfig& config, const std::string& key, const std::string& value) {
  if (key == "attenuation_db") {
    config.attenuation_db = units::parse_double(value);
  } else if (key == "gap_model") {
    config.gap_model = parse_gap_model(value);
  } else if (key == "sweep_t_min") {
    config.sweep_t_min = units::parse_temperature(value);
  } else if (key == "shared_q_other") {
    config.shared_q_other = parse_bool(value, key);
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else if (key == "format") {
    if (value != "json" && value != "csv")
      throw ConfigError("key 'format': expected json or csv, got '" + value + "'");
    config.format = value;
  } else if (key == "cache") {
    config.cache = parse_bool(value, key);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(std::stoull(value));
  } else {
    throw ConfigError("unknown key '" + key + "' in section [general]");
  }
}

void apply_fit(FitConfig& fit, const std::string& key, const std::string& value) {
  if (key == "max_iterations") {
    fit.max_iterations = parse_int(value, key);
  } else if (key == "tolerance") {
    fit.tolerance = units::parse_double(value);
  } else if (key == "use_sigma_weights") {
    fit.use_sigma_weights = parse_bool(value, key);
  } else if (key == "bootstrap") {
    fit.bootstrap = parse_bool(value, key);
  } else if (key == "n_bootstrap") {
    fit.n_bootstrap = parse_int(value, key);
  } else {
    throw ConfigError("unknown key '" + key + "' in section [fit]");
  }
}

void apply_material(SuperconductorParams& mat, const std::string& key, const std::string& value,
                    bool& tc_given) {
  if (key == "gap0") {
    mat.gap0 = units::parse_energy(value);
  } else if (key == "tc") {
    mat.tc = units::parse_temperature(value);
    tc_given = true;
  } else if (key == "sigma_n") {
    mat.sigma_n = units::parse_double(value);
  } else if (key == "thickness") {
    mat.thickness = units::parse_length(value);
  } else if (key == "alpha") {
    mat.alpha = units::parse_double(value);
  } else if (key == "notes") {
    mat.notes = value;
  } else {
    throw ConfigError("unknown key '" + key + "' in material section");
  }
}

}  // namespace

const SuperconductorParams& AnalysisConfig::material(const std::string& name) const {
  const auto it = materials.find(lower(name));
  if (it == materials.end()) throw ConfigError("unknown material '" + name + "'");
  return it->second;
}

AnalysisConfig AnalysisConfig::defaults() {
  AnalysisConfig config;
  config.materials["al"] = preset_al();
  config.materials["ta"] = preset_ta();
  return config;
}

AnalysisConfig AnalysisConfig::from_text(const std::string& text, const std::string& origin) {
  AnalysisConfig config = defaults();
  KeyValDocument doc;
  try {
    doc = parse_keyval(text, origin);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }

  for (const auto& [section, entries] : doc.sections) {
    if (section.empty() || section == "general") {
      for (const auto& [key, value] : entries) apply_general(config, key, value);
    } else if (section == "fit") {
      for (const auto& [key, value] : entries) apply_fit(config.fit, key, value);
    } else if (section.rfind("material.", 0) == 0) {
      const std::string name = lower(section.substr(9));
      if (name.empty()) throw ConfigError("material section without a name");
      auto it = config.materials.find(name);
      if (it == config.materials.end()) {
        SuperconductorParams blank;
        blank.name = name;
        it = config.materials.emplace(name, blank).first;
      }
      bool tc_given = false;
      for (const auto& [key, value] : entries) apply_material(it->second, key, value, tc_given);
      if (!tc_given && !(it->second.tc > 0.0)) {
        if (!(it->second.gap0 > 0.0))
          throw ConfigError("material '" + name + "': gap0 is required when tc is not given");
        it->second.tc =
            it->second.gap0 / (constants::bcs_gap_ratio * constants::boltzmann);
      }
      try {
        it->second.validate();
      } catch (const Error& e) {
        throw ConfigError("material '" + name + "': " + e.what());
      }
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }
  }

  if (!(config.attenuation_db >= 0.0)) throw ConfigError("attenuation_db must be non-negative");
  if (!(config.sweep_t_min >= 0.0)) throw ConfigError("sweep_t_min must be non-negative");
  if (config.fit.max_iterations < 1) throw ConfigError("fit.max_iterations must be positive");
  if (!(config.fit.tolerance > 0.0)) throw ConfigError("fit.tolerance must be positive");
  if (config.fit.n_bootstrap < 8) throw ConfigError("fit.n_bootstrap must be at least 8");
  return config;
}

AnalysisConfig AnalysisConfig::from_file(const std::filesystem::path& path) {
  return from_text(read_text_file(path), path.string());
}

}  // namespace resq::io

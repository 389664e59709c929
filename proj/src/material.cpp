#include "resq/material.hpp"

#include <algorithm>
#include <cmath>

#include "resq/constants.hpp"
#include "resq/errors.hpp"

namespace resq {

GapModel parse_gap_model(std::string_view name) {
  if (name == "interpolation") return GapModel::interpolation;
  if (name == "self_consistent") return GapModel::self_consistent;
  if (name == "constant") return GapModel::constant_gap;
  throw ConfigError("unknown gap model '" + std::string(name) +
                    "' (expected interpolation, self_consistent or constant)");
}

std::string to_string(GapModel model) {
  switch (model) {
    case GapModel::interpolation: return "interpolation";
    case GapModel::self_consistent: return "self_consistent";
    case GapModel::constant_gap: return "constant";
  }
  return "?";
}

SuperconductorParams SuperconductorParams::with_derived_tc(std::string name, double gap0,
                                                           double sigma_n, double thickness,
                                                           double alpha) {
  SuperconductorParams p;
  p.name = std::move(name);
  p.gap0 = gap0;
  p.tc = gap0 / (constants::bcs_gap_ratio * constants::boltzmann);
  p.sigma_n = sigma_n;
  p.thickness = thickness;
  p.alpha = alpha;
  p.validate();
  return p;
}

void SuperconductorParams::validate() const {
  auto bad = [&](const std::string& what) {
    throw InvalidArgumentError("material '" + name + "': " + what);
  };
  if (!(std::isfinite(gap0) && gap0 > 0)) bad("gap0 must be positive");
  if (!(std::isfinite(tc) && tc > 0)) bad("tc must be positive");
  if (!(std::isfinite(sigma_n) && sigma_n > 0)) bad("sigma_n must be positive");
  if (!(std::isfinite(thickness) && thickness > 0)) bad("thickness must be positive");
  if (!(std::isfinite(alpha) && alpha >= 0 && alpha <= 1)) bad("alpha must lie in [0, 1]");
}

const SuperconductorParams& preset_al() {
  static const SuperconductorParams p = [] {
    auto m = SuperconductorParams::with_derived_tc(
        "al", 182e-6 * constants::joule_per_ev, 3.8e7, 475e-9, 0.022);
    m.notes =
        "evaporated Al bridge film; four-probe transport on the same film gave "
        "Tc = 1.08 K, rho = 4.4 uOhm cm, RRR = 3.85 (documentation only; the "
        "gap law uses the tc derived from gap0)";
    return m;
  }();
  return p;
}

const SuperconductorParams& preset_ta() {
  static const SuperconductorParams p = [] {
    auto m = SuperconductorParams::with_derived_tc(
        "ta", 607e-6 * constants::joule_per_ev, 7.7e6, 200e-9, 0.018);
    m.notes = "MBE-grown Ta resonator film on sapphire";
    return m;
  }();
  return p;
}

const SuperconductorParams* find_preset(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "al" || lower == "aluminum" || lower == "aluminium") return &preset_al();
  if (lower == "ta" || lower == "tantalum") return &preset_ta();
  return nullptr;
}

std::vector<std::string> preset_names() { return {"al", "ta"}; }

}  // namespace resq

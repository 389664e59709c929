#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace resq {

// Temperature dependence used for the superconducting gap.
//   interpolation   - gap0 * tanh(1.74 * sqrt(tc/T - 1)); analytic, within ~2%
//                     of the full weak-coupling solution.
//   self_consistent - universal weak-coupling gap equation solved numerically
//                     and scaled to (gap0, tc).
//   constant_gap    - gap0 below tc, zero above; for comparing against models
//                     that ignore gap suppression.
enum class GapModel { interpolation, self_consistent, constant_gap };

GapModel parse_gap_model(std::string_view name);
std::string to_string(GapModel model);

// One superconducting film: everything the conductivity and loss models need.
struct SuperconductorParams {
  std::string name;
  double gap0 = 0.0;       // J, zero-temperature gap
  double tc = 0.0;         // K, transition temperature
  double sigma_n = 0.0;    // S/m, normal-state conductivity
  double thickness = 0.0;  // m, film thickness
  double alpha = 0.0;      // kinetic-inductance fraction Lk / (Lk + Lg)
  std::string notes;       // documentation only, never used in computation

  // Derives tc from gap0 via the weak-coupling ratio gap0 = 1.764 * kB * tc.
  static SuperconductorParams with_derived_tc(std::string name, double gap0, double sigma_n,
                                              double thickness, double alpha);

  void validate() const;  // throws InvalidArgumentError on contract violation
};

// Built-in film presets. Values are defaults, overridable through the config
// file; see README for provenance notes on each number.
const SuperconductorParams& preset_al();
const SuperconductorParams& preset_ta();

// nullptr when the name is unknown. Lookup is case-insensitive.
const SuperconductorParams* find_preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace resq

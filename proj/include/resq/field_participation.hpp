#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resq/material.hpp"

namespace resq {

// Surface mesh regions a field exporter can tag. "chip" is every metallized
// surface on the substrate; "bridge" is the free-standing crossover metal.
enum class FieldRegion { chip, bridge };

std::string to_string(FieldRegion region);
FieldRegion parse_field_region(const std::string& text);

struct SurfaceSample {
  FieldRegion region = FieldRegion::chip;
  double h_mag_sq = 0.0;    // |H|^2 on the conductor surface, A^2/m^2
  double area_weight = 0.0; // quadrature weight, m^2
};

struct VolumeSample {
  double h_mag_sq = 0.0;      // |H|^2 in the simulation volume, A^2/m^2
  double volume_weight = 0.0; // quadrature weight, m^3
};

struct FieldSampleSet {
  std::vector<SurfaceSample> surface_samples;
  std::vector<VolumeSample> volume_samples;
  double f_r = std::numeric_limits<double>::quiet_NaN();  // Hz, for stored energy
  void validate() const;
};

struct ParticipationReport {
  double p = 0.0;
  double surface_integral_chip = 0.0;    // sum of w |H|^2 over chip, A^2
  double surface_integral_bridge = 0.0;  // same over bridge
  double volume_integral = 0.0;          // sum of w |H|^2 over the volume, A^2 m
  std::optional<double> q_s_inv;         // filled when a surface resistance is supplied
};

// Fixed-tree pairwise summation: deterministic for a given ordering and much
// tighter error growth than running accumulation on badly scaled terms.
double pairwise_sum(std::span<const double> values);

// Bridge share of the surface loss integral:
//   p = sum_bridge(w |H|^2) / (sum_chip(w |H|^2) + sum_bridge(w |H|^2)).
// Throws IncompleteDataError unless both regions have samples.
ParticipationReport participation_from_fields(const FieldSampleSet& set);

// Power dissipated in the bridge metal, P = (R_s / 2) * sum_bridge(w |H|^2).
double dissipated_power(double surface_resistance, const FieldSampleSet& set);

// Loss limit imposed by the resistive bridge surface:
//   1/Q_s = R_s * sum_bridge(w |H|^2) / (2 pi f_r mu0 * sum_volume(w |H|^2)).
// The material form derives R_s from the material at (T, set.f_r).
double limiting_q_inv(double surface_resistance, const FieldSampleSet& set);
double limiting_q_inv(const SuperconductorParams& bridge_material, double temperature,
                      const FieldSampleSet& set,
                      GapModel model = GapModel::interpolation);

}  // namespace resq

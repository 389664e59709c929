#include "resq/field_participation.hpp"

#include <cmath>

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/mattis_bardeen.hpp"

namespace resq {

namespace {

// w |H|^2 products for one surface region, in input order, so the fixed
// summation tree is reproducible.
std::vector<double> surface_terms(const FieldSampleSet& set, FieldRegion region) {
  std::vector<double> terms;
  for (const auto& s : set.surface_samples)
    if (s.region == region) terms.push_back(s.area_weight * s.h_mag_sq);
  return terms;
}

double region_integral(const FieldSampleSet& set, FieldRegion region) {
  const auto terms = surface_terms(set, region);
  if (terms.empty())
    throw IncompleteDataError("field set: no samples in region '" + to_string(region) + "'");
  return pairwise_sum(terms);
}

double volume_integral(const FieldSampleSet& set) {
  if (set.volume_samples.empty())
    throw IncompleteDataError("field set: stored energy requires volume samples");
  std::vector<double> terms;
  terms.reserve(set.volume_samples.size());
  for (const auto& s : set.volume_samples) terms.push_back(s.volume_weight * s.h_mag_sq);
  return pairwise_sum(terms);
}

}  // namespace

std::string to_string(FieldRegion region) {
  return region == FieldRegion::chip ? "chip" : "bridge";
}

FieldRegion parse_field_region(const std::string& text) {
  if (text == "chip") return FieldRegion::chip;
  if (text == "bridge") return FieldRegion::bridge;
  throw ParseError("unknown field region '" + text + "' (expected chip or bridge)");
}

void FieldSampleSet::validate() const {
  if (surface_samples.empty()) throw InsufficientDataError("field set: no surface samples");
  for (const auto& s : surface_samples) {
    if (!(std::isfinite(s.h_mag_sq) && s.h_mag_sq >= 0.0))
      throw InvalidArgumentError("field set: |H|^2 must be finite and non-negative");
    if (!(std::isfinite(s.area_weight) && s.area_weight > 0.0))
      throw InvalidArgumentError("field set: area weights must be finite and positive");
  }
  for (const auto& s : volume_samples) {
    if (!(std::isfinite(s.h_mag_sq) && s.h_mag_sq >= 0.0))
      throw InvalidArgumentError("field set: |H|^2 must be finite and non-negative");
    if (!(std::isfinite(s.volume_weight) && s.volume_weight > 0.0))
      throw InvalidArgumentError("field set: volume weights must be finite and positive");
  }
  if (!volume_samples.empty() && !(std::isfinite(f_r) && f_r > 0.0))
    throw InvalidArgumentError("field set: volume samples need a positive f_r");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ParticipationReport participation_from_fields(const FieldSampleSet& set) {
  set.validate();
  ParticipationReport report;
  report.surface_integral_chip = region_integral(set, FieldRegion::chip);
  report.surface_integral_bridge = region_integral(set, FieldRegion::bridge);
  const double total = report.surface_integral_chip + report.surface_integral_bridge;
  if (!(total > 0.0)) throw DomainError("participation: surface integral vanishes");
  report.p = report.surface_integral_bridge / total;
  if (!set.volume_samples.empty()) report.volume_integral = volume_integral(set);
  return report;
}

double dissipated_power(double surface_resistance, const FieldSampleSet& set) {
  set.validate();
  if (!(surface_resistance >= 0.0))
    throw InvalidArgumentError("dissipated power: surface resistance must be non-negative");
  return 0.5 * surface_resistance * region_integral(set, FieldRegion::bridge);
}

double limiting_q_inv(double surface_resistance, const FieldSampleSet& set) {
  set.validate();
  if (!(surface_resistance >= 0.0))
    throw InvalidArgumentError("limiting q: surface resistance must be non-negative");
  const double volume = volume_integral(set);
  if (!(volume > 0.0)) throw DomainError("limiting q: stored energy vanishes");
  return surface_resistance * region_integral(set, FieldRegion::bridge) /
         (2.0 * constants::pi * set.f_r * constants::mu0 * volume);
}

double limiting_q_inv(const SuperconductorParams& bridge_material, double temperature,
                      const FieldSampleSet& set, GapModel model) {
  set.validate();
  const double r_s = mb::surface_resistance(bridge_material, temperature, set.f_r, model);
  return limiting_q_inv(r_s, set);
}

}  // namespace resq

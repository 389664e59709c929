#pragma once

#include <optional>

#include "resq/material.hpp"

namespace resq {

// Quarter-wave CPW resonator description. Only products of (length_l,
// capacitance_c) enter the frequency model, so both are calibrated from the
// base-temperature resonance rather than measured independently.
struct ResonatorGeometry {
  double f_r0 = 0.0;           // Hz, resonance at the reference temperature
  double length_l = 0.0;       // m
  double l_g = 0.0;            // H, geometric inductance
  double capacitance_c = 0.0;  // F
  SuperconductorParams film;   // trace material
  std::optional<SuperconductorParams> bridge;

  void validate() const;

  // Calibrates (length_l, capacitance_c) so that the f_r formula reproduces
  // f_r0 with the film's kinetic inductance at t_ref. length_l is a free
  // overall scale; pass the physical length if known.
  static ResonatorGeometry from_reference(double f_r0, double l_g, SuperconductorParams film,
                                          std::optional<SuperconductorParams> bridge,
                                          double t_ref = 0.010,
                                          GapModel model = GapModel::interpolation,
                                          double length_l = 5e-3);
};

// Two-component loss mixture: a fraction p of the inductive energy lives in
// the bridge material, the rest in the trace, plus a temperature-independent
// offset.
struct CompositeLossModel {
  double p = 0.0;            // inductive participation of the bridge material
  double q_other_inv = 0.0;  // temperature-independent loss
  void validate() const;
};

// Saturable two-level-system loss plus a power-independent floor.
struct PowerLossModel {
  double q_tls0_inv = 0.0;  // low-power saturable loss
  double n_c = 1.0;         // critical photon number
  double beta = 1.0;        // saturation exponent, in (0, 2]
  double q_const_inv = 0.0; // power-independent loss
  void validate() const;
};

// Quasiparticle loss of a film of thickness d:
//   Q^-1 = (alpha/2) (sigma1/sigma2) (1 + (2d/lambda) / sinh(2d/lambda)).
double quasiparticle_loss(const SuperconductorParams& params, double temperature, double frequency,
                          GapModel model = GapModel::interpolation);

// Mixture loss:
//   Q_i^-1 = p * Q_bridge^-1 + (1-p) * Q_trace^-1 + Q_other^-1.
double composite_loss(const CompositeLossModel& model, double temperature, double frequency,
                      const SuperconductorParams& trace, const SuperconductorParams& bridge,
                      GapModel gap_model = GapModel::interpolation);

// Consistency check for attributing a shared loss channel across two
// resonators with participations p_a and p_b:
//   Q = ( (p_a/p_b) * q_const_inv + residual_inv )^-1.
double expected_qi_scaling(double p_a, double p_b, double q_const_inv, double residual_inv);

// f_r = 1 / (4 l sqrt((L_g + L_k) C)).
double resonance_frequency(const ResonatorGeometry& geom, double l_k);

// Fractional shift of the resonance against the t_ref reference as kinetic
// inductance grows with temperature:
//   sqrt(L_g + L_k_trace(t_ref) + p L_k_bridge(t_ref))
//   / sqrt(L_g + L_k_trace(T) + p L_k_bridge(T)) - 1.
// Zero at T = t_ref by construction, and always <= 0 for T >= t_ref.
double fractional_frequency_shift(const ResonatorGeometry& geom, double p, double temperature,
                                  GapModel model = GapModel::interpolation, double t_ref = 0.010);

// Q_i^-1(n) = q_tls0_inv / (1 + n/n_c)^(beta/2) + q_const_inv.
double power_dependent_loss(const PowerLossModel& model, double photon_number);

}  // namespace resq

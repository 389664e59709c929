#pragma once

#include "resq/material.hpp"

namespace resq::mb {

// sigma1/sigma_n and sigma2/sigma_n at one (T, f) point.
struct ComplexConductivityRatio {
  double s1 = 0.0;
  double s2 = 0.0;
  double temperature = 0.0;  // K
  double frequency = 0.0;    // Hz
};

// Fermi-Dirac occupation 1 / (1 + exp(eps / kB T)). Stable for
// |eps| / (kB T) up to ~700; clamps to 0/1 beyond.
double fermi(double eps, double temperature);

// Universal weak-coupling reduced gap delta(t) = gap(T)/gap(0) with t = T/Tc,
// from the self-consistent gap equation. delta(0) = 1, delta(1) = 0.
double reduced_gap_bcs(double t);

// gap(T) under the selected model. Zero for T >= tc, gap0 at T = 0,
// non-increasing in T.
double gap_at_temperature(const SuperconductorParams& params, double temperature,
                          GapModel model = GapModel::interpolation);

// Real part of the complex conductivity over the normal-state value:
// thermal quasiparticle absorption at sub-gap photon energies. Requires
// h f < 2 gap(T); returns 1 (normal state) for T >= tc.
double sigma1_ratio(const SuperconductorParams& params, double temperature, double frequency,
                    GapModel model = GapModel::interpolation);

// Imaginary part over the normal-state value (the superfluid screening
// response). Same domain as sigma1_ratio; returns 0 for T >= tc.
double sigma2_ratio(const SuperconductorParams& params, double temperature, double frequency,
                    GapModel model = GapModel::interpolation);

// Both parts in one call (they share the gap evaluation and the cache slot).
ComplexConductivityRatio conductivity_ratio(const SuperconductorParams& params,
                                            double temperature, double frequency,
                                            GapModel model = GapModel::interpolation);

// Effective penetration depth 1 / sqrt(2 pi mu0 f sigma2(T)) in meters.
// Throws DomainError for T >= tc (no superfluid response).
double penetration_depth(const SuperconductorParams& params, double temperature, double frequency,
                         GapModel model = GapModel::interpolation);

// Bulk-limit surface resistance 2 pi f mu0 lambda sigma1 / (2 sigma2), Ohm.
double surface_resistance(const SuperconductorParams& params, double temperature, double frequency,
                          GapModel model = GapModel::interpolation);

// Sheet kinetic inductance mu0 * lambda(T), henry (per square).
double kinetic_inductance(const SuperconductorParams& params, double temperature, double frequency,
                          GapModel model = GapModel::interpolation);

// Conductivity results are memoized keyed on (gap0, tc, T, f, model)
// quantized to 1e-6 relative; sweep fits hammer the same grid points.
// The cache is guarded by a mutex and safe to share across threads.
void set_cache_enabled(bool enabled);
void clear_cache();

}  // namespace resq::mb

#include "resq/loss_models.hpp"

#include <cmath>

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/mattis_bardeen.hpp"

namespace resq {

namespace {

// (1 + t/sinh(t)) with t = 2d/lambda. Series for small t keeps the thin-film
// doubling exact; large t would overflow sinh, where the correction is gone
// anyway.
double thickness_factor(double d, double lambda) {
  const double t = 2.0 * d / lambda;
  if (t < 1e-8) return 2.0 - t * t / 6.0;
  if (t > 700.0) return 1.0;
  return 1.0 + t / std::sinh(t);
}

}  // namespace

void ResonatorGeometry::validate() const {
  if (!(f_r0 > 0.0)) throw InvalidArgumentError("resonator: f_r0 must be positive");
  if (!(length_l > 0.0)) throw InvalidArgumentError("resonator: length must be positive");
  if (!(l_g > 0.0)) throw InvalidArgumentError("resonator: geometric inductance must be positive");
  if (!(capacitance_c > 0.0)) throw InvalidArgumentError("resonator: capacitance must be positive");
  film.validate();
  if (bridge) bridge->validate();
}

ResonatorGeometry ResonatorGeometry::from_reference(double f_r0, double l_g,
                                                    SuperconductorParams film,
                                                    std::optional<SuperconductorParams> bridge,
                                                    double t_ref, GapModel model, double length_l) {
  if (!(f_r0 > 0.0)) throw InvalidArgumentError("resonator: f_r0 must be positive");
  if (!(l_g > 0.0)) throw InvalidArgumentError("resonator: geometric inductance must be positive");
  if (!(length_l > 0.0)) throw InvalidArgumentError("resonator: length must be positive");
  film.validate();
  if (bridge) bridge->validate();

  ResonatorGeometry geom;
  geom.f_r0 = f_r0;
  geom.length_l = length_l;
  geom.l_g = l_g;
  geom.film = std::move(film);
  geom.bridge = std::move(bridge);

  const double l_k_ref = mb::kinetic_inductance(geom.film, t_ref, f_r0, model);
  const double denom = 4.0 * length_l * f_r0;
  geom.capacitance_c = 1.0 / (denom * denom * (l_g + l_k_ref));
  geom.validate();
  return geom;
}

void CompositeLossModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("composite loss: p must be in [0, 1]");
  if (!(q_other_inv >= 0.0))
    throw InvalidArgumentError("composite loss: q_other_inv must be non-negative");
}

void PowerLossModel::validate() const {
  if (!(q_tls0_inv >= 0.0))
    throw InvalidArgumentError("power loss: q_tls0_inv must be non-negative");
  if (!(n_c > 0.0)) throw InvalidArgumentError("power loss: n_c must be positive");
  if (!(beta > 0.0 && beta <= 2.0)) throw InvalidArgumentError("power loss: beta must be in (0, 2]");
  if (!(q_const_inv >= 0.0))
    throw InvalidArgumentError("power loss: q_const_inv must be non-negative");
}

double quasiparticle_loss(const SuperconductorParams& params, double temperature, double frequency,
                          GapModel model) {
  if (!(temperature < params.tc))
    throw DomainError("quasiparticle loss undefined at or above the critical temperature");
  const auto ratio = mb::conductivity_ratio(params, temperature, frequency, model);
  const double lambda = 1.0 / std::sqrt(2.0 * constants::pi * constants::mu0 * frequency *
                                        ratio.s2 * params.sigma_n);
  return 0.5 * params.alpha * (ratio.s1 / ratio.s2) *
         thickness_factor(params.thickness, lambda);
}

double composite_loss(const CompositeLossModel& model, double temperature, double frequency,
                      const SuperconductorParams& trace, const SuperconductorParams& bridge,
                      GapModel gap_model) {
  model.validate();
  double loss = model.q_other_inv;
  if (model.p > 0.0) loss += model.p * quasiparticle_loss(bridge, temperature, frequency, gap_model);
  if (model.p < 1.0)
    loss += (1.0 - model.p) * quasiparticle_loss(trace, temperature, frequency, gap_model);
  return loss;
}

double expected_qi_scaling(double p_a, double p_b, double q_const_inv, double residual_inv) {
  if (!(p_a > 0.0) || !(p_b > 0.0))
    throw InvalidArgumentError("qi scaling: participations must be positive");
  if (!(q_const_inv >= 0.0) || !(residual_inv >= 0.0))
    throw InvalidArgumentError("qi scaling: losses must be non-negative");
  const double total_inv = (p_a / p_b) * q_const_inv + residual_inv;
  if (!(total_inv > 0.0)) throw DomainError("qi scaling: total loss vanishes");
  return 1.0 / total_inv;
}

double resonance_frequency(const ResonatorGeometry& geom, double l_k) {
  geom.validate();
  if (!(l_k >= 0.0)) throw InvalidArgumentError("resonance frequency: l_k must be non-negative");
  return 1.0 /
         (4.0 * geom.length_l * std::sqrt((geom.l_g + l_k) * geom.capacitance_c));
}

double fractional_frequency_shift(const ResonatorGeometry& geom, double p, double temperature,
                                  GapModel model, double t_ref) {
  geom.validate();
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidArgumentError("frequency shift: p must be in [0, 1]");
  if (p > 0.0 && !geom.bridge)
    throw InvalidArgumentError("frequency shift: p > 0 requires a bridge material");

  const auto composite_inductance = [&](double t) {
    double l = geom.l_g + mb::kinetic_inductance(geom.film, t, geom.f_r0, model);
    if (p > 0.0) l += p * mb::kinetic_inductance(*geom.bridge, t, geom.f_r0, model);
    return l;
  };
  return std::sqrt(composite_inductance(t_ref) / composite_inductance(temperature)) - 1.0;
}

double power_dependent_loss(const PowerLossModel& model, double photon_number) {
  model.validate();
  if (!(photon_number >= 0.0))
    throw InvalidArgumentError("power loss: photon number must be non-negative");
  return model.q_tls0_inv / std::pow(1.0 + photon_number / model.n_c, 0.5 * model.beta) +
         model.q_const_inv;
}

}  // namespace resq

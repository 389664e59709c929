#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "resq/loss_models.hpp"
#include "resq/material.hpp"

namespace resq {

enum class SweepAxis { temperature, photon_number };

SweepAxis parse_sweep_axis(const std::string& text);
std::string to_string(SweepAxis axis);

// A measured loss curve: 1/Q_i sampled against temperature or photon number.
struct LossSweep {
  SweepAxis axis = SweepAxis::temperature;
  std::vector<double> x;
  std::vector<double> qi_inv;
  std::vector<double> sigma;  // empty, or per-point std of qi_inv
  double frequency = 0.0;     // Hz, resonance the sweep was taken at
  int n_bridges = 0;          // device metadata, carried through reports
  std::string label;
  void validate() const;
};

struct ParticipationFit {
  double p = 0.0;
  double q_other_inv = 0.0;
  double p_std = 0.0;
  double q_other_std = 0.0;
  std::array<double, 4> covariance{};  // row-major over (p, q_other_inv)
  double rms_residual = 0.0;
  std::size_t n_points_used = 0;
};

struct SharedParticipationFit {
  std::vector<ParticipationFit> fits;  // one per sweep, all sharing q_other_inv
  double q_other_inv = 0.0;
  double q_other_std = 0.0;
  double rms_residual = 0.0;
};

struct ParticipationFitOptions {
  GapModel gap_model = GapModel::interpolation;
  double t_min = 0.4;           // K, below this quasiparticle loss is buried
  bool use_sigma_weights = true;
};

struct PowerSweepFit {
  PowerLossModel model;
  PowerLossModel model_std;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct PowerFitOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
  bool use_sigma_weights = true;
};

// Subtracts a baseline sweep from another, interpolating the baseline onto
// the other grid (linear in x against log10 of the loss). Points outside the
// baseline coverage are dropped; an empty intersection raises AlignmentError.
LossSweep delta_qi(const LossSweep& sweep, const LossSweep& baseline);

// Weighted least squares of
//   1/Q_i(T) = p L_bridge(T) + (1 - p) L_trace(T) + q_other_inv
// over points with T >= t_min, with 0 <= p <= 1 and q_other_inv >= 0 enforced
// exactly (interior and edge candidates of the box are enumerated).
ParticipationFit fit_participation(const LossSweep& sweep, const SuperconductorParams& trace,
                                   const SuperconductorParams& bridge,
                                   const ParticipationFitOptions& options = {});

// Same model across several sweeps of one chip with a common q_other_inv;
// solved by coordinate descent on the box-constrained quadratic.
SharedParticipationFit fit_participation_shared(const std::vector<LossSweep>& sweeps,
                                                const SuperconductorParams& trace,
                                                const SuperconductorParams& bridge,
                                                const ParticipationFitOptions& options = {});

// Fits q_tls0_inv / (1 + n/n_c)^(beta/2) + q_const_inv against photon number.
// Requires the sweep to span at least four decades in n.
PowerSweepFit fit_power_sweep(const LossSweep& sweep, const PowerFitOptions& options = {});

// Forward models plus multiplicative Gaussian noise, for exercising the fits;
// sigma is filled with the true per-point std.
LossSweep synthesize_temperature_sweep(const CompositeLossModel& model,
                                       const SuperconductorParams& trace,
                                       const SuperconductorParams& bridge,
                                       const std::vector<double>& temperatures, double frequency,
                                       double noise_rel, std::uint64_t seed,
                                       GapModel gap_model = GapModel::interpolation);
LossSweep synthesize_power_sweep(const PowerLossModel& model,
                                 const std::vector<double>& photon_numbers, double noise_rel,
                                 std::uint64_t seed);

}  // namespace resq

#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace resq {

struct S21Trace {
  std::vector<double> frequency;               // Hz, strictly increasing
  std::vector<std::complex<double>> s21;
  // Acquisition metadata; NaN / empty when unknown.
  double applied_power_dbm = std::numeric_limits<double>::quiet_NaN();
  double line_attenuation_db = std::numeric_limits<double>::quiet_NaN();
  double temperature = std::numeric_limits<double>::quiet_NaN();  // K
  std::string label;
  void validate() const;
};

// Diameter-correction parameterization of a notch resonance:
//   S21(f) = (s_x + i s_y) * (1 - a e^{i phi} / (1 + i q_l xi)),
//   a = (q_l / q_c_mag) cos(phi),  xi = f/f_r - f_r/f.
// q_l <= q_c_mag / cos(phi) is not assumed; the fit may explore beyond it.
struct DcmParams {
  double s_x = 1.0;     // baseline, real part
  double s_y = 0.0;     // baseline, imaginary part
  double f_r = 0.0;     // Hz
  double q_l = 0.0;     // loaded quality factor
  double q_c_mag = 0.0; // coupling quality factor magnitude
  double phi = 0.0;     // impedance-mismatch rotation, radians
  void validate() const;
};

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
  std::optional<DcmParams> initial;  // skip the automatic initializer
  bool bootstrap = false;
  int n_bootstrap = 100;
  std::uint64_t seed = 1;
};

struct ResonanceFit {
  DcmParams params;
  DcmParams param_std;         // standard errors from the fit covariance
  std::vector<double> covariance;  // row-major 6x6 over (s_x, s_y, f_r, q_l, q_c_mag, phi)
  double q_i = 0.0;            // NaN when 1/q_l - 1/q_c_mag <= 0 (unphysical fit)
  double q_i_std = 0.0;        // propagated from (q_l, q_c) covariance
  std::optional<double> q_i_std_bootstrap;
  double photon_number = std::numeric_limits<double>::quiet_NaN();  // needs power metadata
  double rms_residual = 0.0;   // per complex point, absolute
  int iterations = 0;
  bool converged = false;
};

std::complex<double> evaluate_s21(const DcmParams& params, double frequency);

// 1/q_i = 1/q_l - 1/q_c_mag; throws DomainError unless q_l < q_c_mag.
double qi_from_fit(double q_l, double q_c_mag);
double qi_from_fit(const DcmParams& params);

// Mean intra-resonator photon number at drive power `power_dbm` applied
// through `attenuation_db` of line attenuation:
//   n = 2 q_l^2 P_device / (hbar (2 pi f_r)^2 q_c_mag).
double photon_number(const DcmParams& params, double power_dbm, double attenuation_db);

// Model trace plus complex Gaussian noise with per-point RMS amplitude
// noise_sigma * |baseline|. Deterministic for a given seed. The span form
// samples a uniform grid centred on f_r.
S21Trace synthesize_trace(const DcmParams& params, const std::vector<double>& frequency,
                          double noise_sigma, std::uint64_t seed);
S21Trace synthesize_trace(const DcmParams& params, int n_points, double span,
                          double noise_sigma, std::uint64_t seed);

// Baseline from the trace edges, dip position and width, rotation and
// coupling from a least-squares circle. Throws FitInitError when the trace
// has no resolvable dip.
DcmParams initial_guess(const S21Trace& trace);

ResonanceFit fit_s21(const S21Trace& trace, const FitOptions& options = {});

// Re-fits traces rebuilt from the model plus resampled residuals; returns the
// standard deviation of q_i across replicas.
double bootstrap_qi_std(const S21Trace& trace, const ResonanceFit& fit, int n_replicas,
                        std::uint64_t seed);

}  // namespace resq

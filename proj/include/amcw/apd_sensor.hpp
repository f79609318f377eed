#pragma once

// Avalanche-photodiode measurement chain: optical power to photons, shot
// noise, photoelectron conversion, avalanche gain, transimpedance readout,
// and the additive detector noise sources. Produces per-frequency depth and
// amplitude measurements either from a full sampled trace or from an
// analytic tap-noise shortcut calibrated to match it.

#include <array>
#include <cstdint>
#include <random>

#include "amcw/light_transport.hpp"
#include "amcw/signal_core.hpp"

namespace amcw {

/// Detector and readout constants. Counts are carried as doubles; integer
/// stages round and clamp at zero.
struct SensorParams {
  double eta = 0.67;                  ///< quantum efficiency
  double m_gain = 50.0;               ///< avalanche gain
  double f_excess = 4.862;            ///< avalanche excess noise factor
  double q_coulomb = 1.60217663e-19;  ///< elementary charge
  double t_transit_s = 6e-9;          ///< transit window per sample
  double p_a_cm2 = 0.007854;          ///< active area
  double i_fm_a_cm2 = 1e-9;           ///< dark figure of merit current density
  double temp_k = 297.0;
  double e_g_j = 1.1116 * 1.60217663e-19;  ///< bandgap energy
  double k_b = 1.380649e-23;
  double bw_hz = 50e6;                ///< readout bandwidth
  double s_tia_a2hz = 4.314e-24;      ///< TIA input-referred noise density
  double r_load_ohm = 50.0;
  double g_tia_v_per_a = 5e4;         ///< transimpedance gain
  double lambda_nm = 852.0;           ///< laser wavelength
  double h_planck = 6.62606896e-34;
  double c_mps = 3.0e8;
  double eps_back_sigma = 0.0;        ///< background electrons sigma (off by default)
  double eps_rand_sigma = 0.0;        ///< residual voltage sigma (off by default)
  double trace_dt_s = 6e-9;           ///< trace sample interval (= transit window)
  double trace_t_int_s = 16e-6;       ///< target integration time per measurement
};

void validate(const SensorParams& p);

/// Independent switches for each stochastic stage. Defaults: everything on.
struct NoiseToggles {
  bool shot = true;
  bool avalanche = true;
  bool dark = true;
  bool tia = true;
  bool thermal = true;
  bool background = true;
  bool residual = true;

  static NoiseToggles all_off() { return {false, false, false, false, false, false, false}; }
  bool any() const { return shot || avalanche || dark || tia || thermal || background || residual; }
};

/// One per-frequency measurement.
struct MeasurementRecord {
  double freq_hz = 0.0;
  double depth_m = 0.0;       ///< in [0, c/(2f))
  double amplitude_v2 = 0.0;  ///< recovered correlation amplitude
  TapSet taps;
};

enum class SimMode { trace, analytic };

/// Photon energy h*c/lambda.
double photon_energy_j(const SensorParams& p);

/// Expected photon count in one transit window, rounded to an integer.
/// Throws std::domain_error on negative power.
double photon_count(double p_opt_w, const SensorParams& p);

/// Poisson draw around the expected count (mean >= 0).
double apply_shot_noise(double n_photons, std::mt19937_64& eng);

/// Quantum efficiency plus optional background fluctuation, rounded and
/// clamped at zero.
double photoelectron_count(double n_shot, const SensorParams& p, std::mt19937_64& eng);

/// Avalanche gain: Gaussian with mean M*n_e and variance M^2*F*n_e when
/// `stochastic`, rounded and clamped; exactly M*n_e otherwise.
double avalanche_multiply(double n_e, const SensorParams& p, std::mt19937_64& eng,
                          bool stochastic = true);

/// Electrons collected in one transit window to output voltage: n*q/t * G.
double electrons_to_voltage(double n_electrons, const SensorParams& p);

/// Thermally generated dark electrons per window (continuous expectation).
double dark_electron_mean(const SensorParams& p);

/// One Poisson draw around the rounded dark expectation.
double dark_electron_count(const SensorParams& p, std::mt19937_64& eng);

/// TIA noise expressed in electron counts: Gaussian, sigma t*sqrt(S*BW)/q,
/// rounded.
double tia_noise_electrons(const SensorParams& p, std::mt19937_64& eng);

/// Thermal (Johnson) noise mapped through the TIA: Gaussian voltage with
/// sigma G*sqrt(4*k_B*T*BW/R).
double thermal_noise_voltage(const SensorParams& p, std::mt19937_64& eng);

/// Full per-sample chain. Disabled stages take the continuous expected-value
/// path (no rounding) so the all-off limit is exactly linear in power.
double apd_voltage_sample(double p_opt_w, const SensorParams& p, const NoiseToggles& t,
                          std::mt19937_64& eng);

/// Sample grid covering an integer period count nearest the target
/// integration time.
struct TraceTiming {
  std::size_t n_samples = 0;
  std::int64_t periods = 0;
};
TraceTiming trace_timing(const SensorParams& p, double freq_hz);

/// Emitted-power scale p0 such that the noise-free chain measured on the
/// reference scene (unit reflectivity at 1 m, no detour) recovers an
/// amplitude of exactly `gamma_r`. Independent of the modulation frequency.
double calibrate(const ModulationConfig& cfg, const SensorParams& p, double gamma_r);

/// Per-tap noise standard deviation predicted for analytic mode.
double analytic_tap_noise_std(const TwoPathScene& scene, const ModulationConfig& cfg,
                              const SensorParams& p, const NoiseToggles& t, double p0_w);

/// One complete measurement at cfg.freq_hz. `p0_w` <= 0 means "derive via
/// calibrate(cfg, params, scene.gamma_r)"; hot loops should pass a cached
/// value. In trace mode the chain runs per sample; in analytic mode tap
/// noise is injected directly with the matched variance.
MeasurementRecord simulate_measurement(const TwoPathScene& scene, const ModulationConfig& cfg,
                                       const SensorParams& params, const NoiseToggles& toggles,
                                       std::mt19937_64& eng, SimMode mode,
                                       double p0_w = 0.0);

}  // namespace amcw

#include "amcw/apd_sensor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amcw {

namespace {

void require_pos(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("sensor: ") + name + " must be > 0");
}

double gaussian(std::mt19937_64& eng, double mean, double sigma) {
  return std::normal_distribution<double>(mean, sigma)(eng);
}

double poisson(std::mt19937_64& eng, double mean) {
  if (mean <= 0.0) return 0.0;
  return static_cast<double>(std::poisson_distribution<long long>(mean)(eng));
}

}  // namespace

void validate(const SensorParams& p) {
  if (!(p.eta > 0.0 && p.eta <= 1.0))
    throw std::invalid_argument("sensor: eta must lie in (0, 1]");
  require_pos(p.m_gain, "m_gain");
  if (!(p.f_excess >= 1.0)) throw std::invalid_argument("sensor: f_excess must be >= 1");
  require_pos(p.q_coulomb, "q_coulomb");
  require_pos(p.t_transit_s, "t_transit_s");
  require_pos(p.p_a_cm2, "p_a_cm2");
  if (!(p.i_fm_a_cm2 >= 0.0)) throw std::invalid_argument("sensor: i_fm_a_cm2 must be >= 0");
  require_pos(p.temp_k, "temp_k");
  require_pos(p.e_g_j, "e_g_j");
  require_pos(p.k_b, "k_b");
  require_pos(p.bw_hz, "bw_hz");
  if (!(p.s_tia_a2hz >= 0.0)) throw std::invalid_argument("sensor: s_tia_a2hz must be >= 0");
  require_pos(p.r_load_ohm, "r_load_ohm");
  require_pos(p.g_tia_v_per_a, "g_tia_v_per_a");
  require_pos(p.lambda_nm, "lambda_nm");
  require_pos(p.h_planck, "h_planck");
  require_pos(p.c_mps, "c_mps");
  if (!(p.eps_back_sigma >= 0.0 && p.eps_rand_sigma >= 0.0))
    throw std::invalid_argument("sensor: noise sigmas must be >= 0");
  require_pos(p.trace_dt_s, "trace_dt_s");
  require_pos(p.trace_t_int_s, "trace_t_int_s");
}

double photon_energy_j(const SensorParams& p) {
  return p.h_planck * p.c_mps / (p.lambda_nm * 1e-9);
}

double photon_count(double p_opt_w, const SensorParams& p) {
  if (!(p_opt_w >= 0.0)) throw std::domain_error("photon_count: optical power must be >= 0");
  return std::round(p_opt_w * p.t_transit_s / photon_energy_j(p));
}

double apply_shot_noise(double n_photons, std::mt19937_64& eng) {
  if (!(n_photons >= 0.0)) throw std::domain_error("apply_shot_noise: mean must be >= 0");
  return poisson(eng, n_photons);
}

double photoelectron_count(double n_shot, const SensorParams& p, std::mt19937_64& eng) {
  if (!(n_shot >= 0.0)) throw std::domain_error("photoelectron_count: count must be >= 0");
  double e = n_shot * p.eta;
  if (p.eps_back_sigma > 0.0) e += gaussian(eng, 0.0, p.eps_back_sigma);
  return std::max(0.0, std::round(e));
}

double avalanche_multiply(double n_e, const SensorParams& p, std::mt19937_64& eng,
                          bool stochastic) {
  if (!(n_e >= 0.0)) throw std::domain_error("avalanche_multiply: count must be >= 0");
  if (!stochastic) return p.m_gain * n_e;
  const double var = p.m_gain * p.m_gain * p.f_excess * n_e;
  return std::max(0.0, std::round(gaussian(eng, p.m_gain * n_e, std::sqrt(var))));
}

double electrons_to_voltage(double n_electrons, const SensorParams& p) {
  return n_electrons * p.q_coulomb / p.t_transit_s * p.g_tia_v_per_a;
}

double dark_electron_mean(const SensorParams& p) {
  const double t32 = std::pow(p.temp_k, 1.5);
  const double arg = p.e_g_j / (2.0 * p.k_b * p.temp_k);
  return p.p_a_cm2 * p.i_fm_a_cm2 * t32 * p.t_transit_s * std::exp(-arg) / p.q_coulomb;
}

double dark_electron_count(const SensorParams& p, std::mt19937_64& eng) {
  return poisson(eng, std::round(dark_electron_mean(p)));
}

double tia_noise_electrons(const SensorParams& p, std::mt19937_64& eng) {
  const double sigma = p.t_transit_s * std::sqrt(p.s_tia_a2hz * p.bw_hz) / p.q_coulomb;
  return std::round(gaussian(eng, 0.0, sigma));
}

double thermal_noise_voltage(const SensorParams& p, std::mt19937_64& eng) {
  const double sigma_i = std::sqrt(4.0 * p.k_b * p.temp_k * p.bw_hz / p.r_load_ohm);
  return gaussian(eng, 0.0, p.g_tia_v_per_a * sigma_i);
}

double apd_voltage_sample(double p_opt_w, const SensorParams& p, const NoiseToggles& t,
                          std::mt19937_64& eng) {
  if (!(p_opt_w >= 0.0)) throw std::domain_error("apd_voltage_sample: power must be >= 0");

  // Photons in this transit window. Counting stages round only on their
  // stochastic paths so the all-off chain stays exactly linear in power.
  double n = p_opt_w * p.t_transit_s / photon_energy_j(p);
  if (t.shot) n = poisson(eng, std::round(n));

  double e = n * p.eta;
  const bool back_on = t.background && p.eps_back_sigma > 0.0;
  if (back_on) e += gaussian(eng, 0.0, p.eps_back_sigma);
  if (t.shot || back_on) e = std::max(0.0, std::round(e));

  double n_apd;
  if (t.avalanche) {
    const double var = p.m_gain * p.m_gain * p.f_excess * e;
    n_apd = std::max(0.0, std::round(gaussian(eng, p.m_gain * e, std::sqrt(var))));
  } else {
    n_apd = p.m_gain * e;
  }

  double v = electrons_to_voltage(n_apd, p);
  if (t.dark) {
    const double mean = std::round(dark_electron_mean(p));
    if (mean > 0.0) v += electrons_to_voltage(poisson(eng, mean), p);
  }
  if (t.tia) v += electrons_to_voltage(tia_noise_electrons(p, eng), p);
  if (t.thermal) v += thermal_noise_voltage(p, eng);
  if (t.residual && p.eps_rand_sigma > 0.0) v += gaussian(eng, 0.0, p.eps_rand_sigma);
  return v;
}

TraceTiming trace_timing(const SensorParams& p, double freq_hz) {
  if (!(freq_hz > 0.0)) throw std::invalid_argument("trace_timing: freq must be > 0");
  const double spp = 1.0 / (freq_hz * p.trace_dt_s);  // samples per period
  if (spp < 2.0) throw std::invalid_argument("trace_timing: fewer than 2 samples per period");

  // Smallest period count k whose span is an integer number of samples.
  std::int64_t k = 0;
  double block_samples = 0.0;
  for (std::int64_t cand = 1; cand <= 8192; ++cand) {
    const double s = spp * static_cast<double>(cand);
    if (std::abs(s - std::round(s)) < 1e-9 * s) {
      k = cand;
      block_samples = std::round(s);
      break;
    }
  }
  if (k == 0)
    throw std::invalid_argument("trace_timing: sample interval incommensurate with period");

  const double target_periods = p.trace_t_int_s * freq_hz;
  std::int64_t blocks = static_cast<std::int64_t>(std::llround(target_periods / static_cast<double>(k)));
  if (blocks < 1) blocks = 1;

  TraceTiming out;
  out.periods = blocks * k;
  out.n_samples = static_cast<std::size_t>(blocks) * static_cast<std::size_t>(block_samples);
  return out;
}

double calibrate(const ModulationConfig& cfg, const SensorParams& p, double gamma_r) {
  validate(cfg);
  validate(p);
  if (!(gamma_r > 0.0)) throw std::invalid_argument("calibrate: gamma_r must be > 0");

  TwoPathScene ref;
  ref.gamma_r = gamma_r;
  ref.d_as = 1.0;
  ref.rho_sas = 1.0;
  ref.d_ab = 0.0;
  ref.rho_sab = ref.rho_aba = ref.rho_bas = 0.0;

  const TraceTiming tm = trace_timing(p, cfg.freq_hz);
  SampledTrace power = optical_power_trace(ref, cfg, 1.0, p.trace_dt_s, tm.n_samples);
  SampledTrace volts;
  volts.dt_s = power.dt_s;
  volts.values.resize(power.values.size());
  const NoiseToggles off = NoiseToggles::all_off();
  std::mt19937_64 dummy(0);  // never drawn from on the all-off path
  for (std::size_t i = 0; i < power.values.size(); ++i)
    volts.values[i] = apd_voltage_sample(power.values[i], p, off, dummy);
  const double amp_at_unit_power = four_tap_amplitude(demodulate_taps(volts, cfg));
  if (!(amp_at_unit_power > 0.0))
    throw std::runtime_error("calibrate: degenerate chain response");
  return gamma_r / amp_at_unit_power;
}

namespace {

// Mean per-sample output voltage variance contributed by the enabled noise
// sources, evaluated at the scene's DC optical power.
double per_sample_voltage_variance(const TwoPathScene& scene, const SensorParams& p,
                                   const NoiseToggles& t, double p0_w) {
  const double inv_d2 = 1.0 / (scene.d_as * scene.d_as);
  const double p_dc =
      p0_w * (scene.rho_sas + scene.rho_sab * scene.rho_aba * scene.rho_bas) * inv_d2;
  const double n_mean = p_dc * p.t_transit_s / photon_energy_j(p);
  const double m2 = p.m_gain * p.m_gain;

  double var_electrons = 0.0;
  if (t.shot) var_electrons += m2 * p.eta * p.eta * n_mean;
  if (t.avalanche) var_electrons += m2 * p.f_excess * p.eta * n_mean;
  if (t.background && p.eps_back_sigma > 0.0)
    var_electrons += m2 * p.eps_back_sigma * p.eps_back_sigma;
  if (t.dark) var_electrons += std::round(dark_electron_mean(p));
  if (t.tia) {
    const double s = p.t_transit_s * std::sqrt(p.s_tia_a2hz * p.bw_hz) / p.q_coulomb;
    var_electrons += s * s;
  }

  const double v_per_e = p.q_coulomb / p.t_transit_s * p.g_tia_v_per_a;
  double var_v = v_per_e * v_per_e * var_electrons;
  if (t.thermal) {
    const double s = p.g_tia_v_per_a * std::sqrt(4.0 * p.k_b * p.temp_k * p.bw_hz / p.r_load_ohm);
    var_v += s * s;
  }
  if (t.residual && p.eps_rand_sigma > 0.0) var_v += p.eps_rand_sigma * p.eps_rand_sigma;
  return var_v;
}

MeasurementRecord record_from_taps(const TapSet& taps, const ModulationConfig& cfg) {
  MeasurementRecord rec;
  rec.freq_hz = cfg.freq_hz;
  rec.taps = taps;
  const double dy = taps.c[3] - taps.c[1];
  const double dx = taps.c[0] - taps.c[2];
  if (dy == 0.0 && dx == 0.0) {
    rec.depth_m = 0.0;  // zero-signal convention, matches the zero phasor
    rec.amplitude_v2 = 0.0;
  } else {
    rec.depth_m = phase_to_depth(four_tap_phase(taps), cfg);
    rec.amplitude_v2 = four_tap_amplitude(taps);
  }
  return rec;
}

}  // namespace

double analytic_tap_noise_std(const TwoPathScene& scene, const ModulationConfig& cfg,
                              const SensorParams& p, const NoiseToggles& t, double p0_w) {
  const TraceTiming tm = trace_timing(p, cfg.freq_hz);
  const double var_v = per_sample_voltage_variance(scene, p, t, p0_w);
  return cfg.m_volts * std::sqrt(var_v / (2.0 * static_cast<double>(tm.n_samples)));
}

MeasurementRecord simulate_measurement(const TwoPathScene& scene, const ModulationConfig& cfg,
                                       const SensorParams& params, const NoiseToggles& toggles,
                                       std::mt19937_64& eng, SimMode mode, double p0_w) {
  validate(scene);
  validate(cfg);
  validate(params);
  const double p0 = p0_w > 0.0 ? p0_w : calibrate(cfg, params, scene.gamma_r);

  if (mode == SimMode::trace) {
    const TraceTiming tm = trace_timing(params, cfg.freq_hz);
    SampledTrace power = optical_power_trace(scene, cfg, p0, params.trace_dt_s, tm.n_samples);
    SampledTrace volts;
    volts.dt_s = power.dt_s;
    volts.values.resize(power.values.size());
    for (std::size_t i = 0; i < power.values.size(); ++i)
      volts.values[i] = apd_voltage_sample(power.values[i], params, toggles, eng);
    return record_from_taps(demodulate_taps(volts, cfg), cfg);
  }

  // Analytic mode: exact taps from the net phasor plus tap noise with the
  // variance the trace pipeline would induce. Taps a half period apart share
  // the same samples, so their noise is exactly anticorrelated.
  TapSet taps = phasor_to_taps(net_phasor(scene, cfg));
  if (toggles.any()) {
    const double sigma = analytic_tap_noise_std(scene, cfg, params, toggles, p0);
    if (sigma > 0.0) {
      const double e_i = gaussian(eng, 0.0, sigma);
      const double e_q = gaussian(eng, 0.0, sigma);
      taps.c[0] += e_i;
      taps.c[2] -= e_i;
      taps.c[1] += e_q;
      taps.c[3] -= e_q;
    }
  }
  return record_from_taps(taps, cfg);
}

}  // namespace amcw

#pragma once

// Two-path propagation model: a direct return from the target surface plus a
// single detour bounce, each mapped to a correlation-domain phasor.

#include <random>

#include "amcw/signal_core.hpp"

namespace amcw {

/// One measurement scene: sensor, target surface A, secondary reflector B.
struct TwoPathScene {
  double gamma_r = 0.1794;  ///< reference correlation amplitude at 1 m, unit reflectivity (V^2)
  double d_as = 1.9;        ///< sensor-to-target distance (m)
  double d_ab = 0.0;        ///< one-way target-to-reflector detour (m)
  double rho_sas = 1.0;     ///< direct-path reflectivity, in [0, 1]
  double rho_sab = 0.0;     ///< detour leg reflectivities, in [0, 1]
  double rho_aba = 0.0;
  double rho_bas = 0.0;
};

/// Throws std::invalid_argument unless distances and reflectivities are valid
/// (d_as > 0, d_ab >= 0, every rho in [0, 1], gamma_r > 0).
void validate(const TwoPathScene& scene);

/// Uniform sampling bounds for random scenes.
struct SceneRanges {
  double gamma_r = 0.1794;
  double d_as_lo = 1.4, d_as_hi = 2.4;
  double d_ab_lo = 0.0, d_ab_hi = 0.15;
  double rho_sas_lo = 0.0, rho_sas_hi = 1.0;
  double rho_sab_lo = 0.0, rho_sab_hi = 1.0;
  double rho_aba_lo = 0.0, rho_aba_hi = 1.0;
  double rho_bas_lo = 0.0, rho_bas_hi = 1.0;
};

void validate(const SceneRanges& r);

/// Direct-return phasor: amplitude gamma_r * rho_sas / d_as^2, phase from d_as.
Phasor direct_phasor(const TwoPathScene& scene, const ModulationConfig& cfg);

/// Detour phasor: amplitude gamma_r * (rho_sab * rho_aba * rho_bas) / d_as^2,
/// phase from the lengthened path d_as + d_ab. The detour leg adds phase but
/// no extra inverse-square attenuation.
Phasor multipath_phasor(const TwoPathScene& scene, const ModulationConfig& cfg);

/// Superposition of direct and detour components.
Phasor net_phasor(const TwoPathScene& scene, const ModulationConfig& cfg);

/// Draws one scene uniformly within `ranges`. Field draw order is fixed
/// (d_as, d_ab, rho_sas, rho_sab, rho_aba, rho_bas) so streams are stable.
TwoPathScene sample_scene(const SceneRanges& ranges, std::mt19937_64& eng);

/// Optical power arriving at the detector, sampled at dt_s over n samples:
/// p0 scaled by each path's reflectivity and 1/d_as^2, with the modulation
/// delayed by the round-trip time of that path. Power is nonnegative for
/// alpha <= 1.
SampledTrace optical_power_trace(const TwoPathScene& scene, const ModulationConfig& cfg,
                                 double p0_w, double dt_s, std::size_t n_samples);

}  // namespace amcw

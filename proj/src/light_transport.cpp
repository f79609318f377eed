#include "amcw/light_transport.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amcw {

namespace {

void check_rho(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string("scene: ") + name + " must lie in [0, 1]");
}

}  // namespace

void validate(const TwoPathScene& scene) {
  if (!(scene.gamma_r > 0.0)) throw std::invalid_argument("scene: gamma_r must be > 0");
  if (!(scene.d_as > 0.0)) throw std::invalid_argument("scene: d_as must be > 0");
  if (!(scene.d_ab >= 0.0)) throw std::invalid_argument("scene: d_ab must be >= 0");
  check_rho(scene.rho_sas, "rho_sas");
  check_rho(scene.rho_sab, "rho_sab");
  check_rho(scene.rho_aba, "rho_aba");
  check_rho(scene.rho_bas, "rho_bas");
}

void validate(const SceneRanges& r) {
  if (!(r.gamma_r > 0.0)) throw std::invalid_argument("ranges: gamma_r must be > 0");
  const std::array<std::pair<double, double>, 6> spans = {{{r.d_as_lo, r.d_as_hi},
                                                           {r.d_ab_lo, r.d_ab_hi},
                                                           {r.rho_sas_lo, r.rho_sas_hi},
                                                           {r.rho_sab_lo, r.rho_sab_hi},
                                                           {r.rho_aba_lo, r.rho_aba_hi},
                                                           {r.rho_bas_lo, r.rho_bas_hi}}};
  for (const auto& [lo, hi] : spans)
    if (!(lo <= hi)) throw std::invalid_argument("ranges: lo must be <= hi");
  if (!(r.d_as_lo > 0.0)) throw std::invalid_argument("ranges: d_as must be > 0");
  if (!(r.d_ab_lo >= 0.0)) throw std::invalid_argument("ranges: d_ab must be >= 0");
  for (const auto& [lo, hi] : {std::pair{r.rho_sas_lo, r.rho_sas_hi},
                               std::pair{r.rho_sab_lo, r.rho_sab_hi},
                               std::pair{r.rho_aba_lo, r.rho_aba_hi},
                               std::pair{r.rho_bas_lo, r.rho_bas_hi}}) {
    check_rho(lo, "rho lo");
    check_rho(hi, "rho hi");
  }
}

Phasor direct_phasor(const TwoPathScene& scene, const ModulationConfig& cfg) {
  validate(scene);
  validate(cfg);
  const double amp = scene.gamma_r * scene.rho_sas / (scene.d_as * scene.d_as);
  return Phasor{amp, depth_to_phase(scene.d_as, cfg)};
}

Phasor multipath_phasor(const TwoPathScene& scene, const ModulationConfig& cfg) {
  validate(scene);
  validate(cfg);
  const double rho = scene.rho_sab * scene.rho_aba * scene.rho_bas;
  const double amp = scene.gamma_r * rho / (scene.d_as * scene.d_as);
  return Phasor{amp, depth_to_phase(scene.d_as + scene.d_ab, cfg)};
}

Phasor net_phasor(const TwoPathScene& scene, const ModulationConfig& cfg) {
  const Phasor parts[2] = {direct_phasor(scene, cfg), multipath_phasor(scene, cfg)};
  return superpose(parts);
}

TwoPathScene sample_scene(const SceneRanges& ranges, std::mt19937_64& eng) {
  validate(ranges);
  auto draw = [&eng](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(eng);
  };
  TwoPathScene s;
  s.gamma_r = ranges.gamma_r;
  s.d_as = draw(ranges.d_as_lo, ranges.d_as_hi);
  s.d_ab = draw(ranges.d_ab_lo, ranges.d_ab_hi);
  s.rho_sas = draw(ranges.rho_sas_lo, ranges.rho_sas_hi);
  s.rho_sab = draw(ranges.rho_sab_lo, ranges.rho_sab_hi);
  s.rho_aba = draw(ranges.rho_aba_lo, ranges.rho_aba_hi);
  s.rho_bas = draw(ranges.rho_bas_lo, ranges.rho_bas_hi);
  return s;
}

SampledTrace optical_power_trace(const TwoPathScene& scene, const ModulationConfig& cfg,
                                 double p0_w, double dt_s, std::size_t n_samples) {
  validate(scene);
  validate(cfg);
  if (!(p0_w >= 0.0)) throw std::invalid_argument("optical_power_trace: p0 must be >= 0");
  if (!(dt_s > 0.0) || n_samples == 0)
    throw std::invalid_argument("optical_power_trace: empty sampling grid");

  const double w = 2.0 * std::numbers::pi * cfg.freq_hz;
  const double inv_d2 = 1.0 / (scene.d_as * scene.d_as);
  const double a_dir = p0_w * scene.rho_sas * inv_d2;
  const double a_mpi = p0_w * scene.rho_sab * scene.rho_aba * scene.rho_bas * inv_d2;
  const double phi_dir = w * (2.0 * scene.d_as / cfg.c_mps);
  const double phi_mpi = w * (2.0 * (scene.d_as + scene.d_ab) / cfg.c_mps);

  SampledTrace tr;
  tr.dt_s = dt_s;
  tr.values.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double wt = w * dt_s * static_cast<double>(i);
    tr.values[i] = a_dir * (1.0 + cfg.alpha * std::cos(wt - phi_dir)) +
                   a_mpi * (1.0 + cfg.alpha * std::cos(wt - phi_mpi));
  }
  return tr;
}

}  // namespace amcw

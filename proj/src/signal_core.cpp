#include "amcw/signal_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amcw {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void validate(const ModulationConfig& cfg) {
  if (!(cfg.freq_hz > 0.0)) throw std::invalid_argument("modulation: freq_hz must be > 0");
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("modulation: alpha must lie in [0, 1]");
  if (!(cfg.m_volts > 0.0)) throw std::invalid_argument("modulation: m_volts must be > 0");
  if (!(cfg.c_mps > 0.0)) throw std::invalid_argument("modulation: c_mps must be > 0");
}

double normalize_phase(double rad) {
  double r = std::fmod(rad, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod/addition rounding can land exactly on 2*pi
  return r;
}

double depth_to_phase(double depth_m, const ModulationConfig& cfg) {
  if (!(depth_m >= 0.0)) throw std::domain_error("depth_to_phase: depth must be >= 0");
  return normalize_phase(4.0 * std::numbers::pi * cfg.freq_hz * depth_m / cfg.c_mps);
}

double phase_to_depth(double phase_rad, const ModulationConfig& cfg) {
  if (!(phase_rad >= 0.0 && phase_rad < kTwoPi))
    throw std::domain_error("phase_to_depth: phase must lie in [0, 2*pi)");
  return cfg.c_mps * phase_rad / (4.0 * std::numbers::pi * cfg.freq_hz);
}

double unambiguous_range(const ModulationConfig& cfg) {
  return cfg.c_mps / (2.0 * cfg.freq_hz);
}

TapSet phasor_to_taps(const Phasor& p) {
  // cos(n*pi/2 + phase) expanded; keeps the exact c2 = -c0, c3 = -c1 symmetry.
  const double ci = p.amplitude * std::cos(p.phase);
  const double cq = p.amplitude * std::sin(p.phase);
  return TapSet{{ci, -cq, -ci, cq}};
}

double four_tap_phase(const TapSet& t) {
  const double dy = t.c[3] - t.c[1];
  const double dx = t.c[0] - t.c[2];
  if (dy == 0.0 && dx == 0.0) throw std::domain_error("four_tap_phase: zero signal");
  return normalize_phase(std::atan2(dy, dx));
}

double four_tap_amplitude(const TapSet& t) {
  const double dy = t.c[3] - t.c[1];
  const double dx = t.c[2] - t.c[0];
  return 0.5 * std::hypot(dy, dx);
}

Phasor superpose(std::span<const Phasor> parts) {
  double re = 0.0, im = 0.0;
  for (const Phasor& p : parts) {
    re += p.amplitude * std::cos(p.phase);
    im += p.amplitude * std::sin(p.phase);
  }
  if (re == 0.0 && im == 0.0) return Phasor{0.0, 0.0};
  return Phasor{std::hypot(re, im), normalize_phase(std::atan2(im, re))};
}

namespace {

// Samples per period and total periods; throws unless the trace covers an
// integer period count with at least two samples per period.
void check_trace(const SampledTrace& tr, const ModulationConfig& cfg) {
  if (!(tr.dt_s > 0.0)) throw std::invalid_argument("trace: dt_s must be > 0");
  if (tr.values.size() < 2) throw std::invalid_argument("trace: needs at least 2 samples");
  const double spp = 1.0 / (cfg.freq_hz * tr.dt_s);
  if (spp < 2.0) throw std::invalid_argument("trace: fewer than 2 samples per period");
  const double periods = tr.t_int() * cfg.freq_hz;
  if (std::abs(periods - std::round(periods)) > 1e-6 * periods + 1e-9)
    throw std::invalid_argument("trace: span is not an integer number of periods");
}

}  // namespace

double demodulate_trace(const SampledTrace& received, const ModulationConfig& cfg,
                        double tau_s) {
  validate(cfg);
  check_trace(received, cfg);
  const double w = kTwoPi * cfg.freq_hz;
  const double step = w * received.dt_s;
  const double phase0 = w * tau_s;
  // (1/T) * sum r_i * m * cos(w*(t_i + tau)) * dt, with t_i = i*dt.
  double acc = 0.0, comp = 0.0;  // Neumaier-compensated sum
  const size_t n = received.values.size();
  for (size_t i = 0; i < n; ++i) {
    const double term = received.values[i] * std::cos(phase0 + step * static_cast<double>(i));
    const double t = acc + term;
    if (std::abs(acc) >= std::abs(term))
      comp += (acc - t) + term;
    else
      comp += (term - t) + acc;
    acc = t;
  }
  return (acc + comp) * cfg.m_volts / static_cast<double>(n);
}

TapSet demodulate_taps(const SampledTrace& received, const ModulationConfig& cfg) {
  TapSet out;
  const double quarter = 1.0 / (4.0 * cfg.freq_hz);
  for (int nTap = 0; nTap < 4; ++nTap)
    out.c[static_cast<size_t>(nTap)] = demodulate_trace(received, cfg, quarter * nTap);
  return out;
}

}  // namespace amcw

#pragma once

// Four-tap demodulation math for amplitude-modulated continuous-wave ranging:
// phase/depth conversion, tap synthesis from a phasor, phasor superposition,
// and cross-correlation of sampled traces against the demodulation signal.

#include <array>
#include <span>
#include <vector>

namespace amcw {

/// Modulation settings shared by every stage of the pipeline.
struct ModulationConfig {
  double freq_hz = 31.25e6;  ///< modulation frequency
  double alpha = 1.0;        ///< modulation depth of the received signal, in [0, 1]
  double m_volts = 0.4785;   ///< demodulation signal amplitude
  double c_mps = 3.0e8;      ///< propagation speed
};

/// Throws std::invalid_argument unless freq > 0, alpha in [0,1], m > 0, c > 0.
void validate(const ModulationConfig& cfg);

/// One frequency component of a correlation measurement.
/// Invariant: amplitude >= 0, phase in [0, 2*pi).
struct Phasor {
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Correlation samples at the four demodulation offsets 0, T/4, T/2, 3T/4.
struct TapSet {
  std::array<double, 4> c{};
};

/// A uniformly sampled real-valued trace. t_int() == dt_s * values.size().
struct SampledTrace {
  double dt_s = 0.0;
  std::vector<double> values;

  double t_int() const { return dt_s * static_cast<double>(values.size()); }
};

/// Folds an angle into [0, 2*pi).
double normalize_phase(double rad);

/// Round-trip phase for a target at `depth_m`, reduced mod 2*pi.
/// Throws std::domain_error on negative depth.
double depth_to_phase(double depth_m, const ModulationConfig& cfg);

/// Inverse of depth_to_phase within one unambiguous interval.
/// Requires phase in [0, 2*pi); result lies in [0, c/(2f)).
double phase_to_depth(double phase_rad, const ModulationConfig& cfg);

/// Half the round-trip wrap distance, c/(2f).
double unambiguous_range(const ModulationConfig& cfg);

/// Ideal taps c_n = amplitude * cos(n*pi/2 + phase).
TapSet phasor_to_taps(const Phasor& p);

/// Phase recovered from taps, atan2(c3 - c1, c0 - c2) folded into [0, 2*pi).
/// Throws std::domain_error when both differences vanish (no signal).
double four_tap_phase(const TapSet& t);

/// Amplitude recovered from taps, sqrt((c3-c1)^2 + (c2-c0)^2) / 2.
double four_tap_amplitude(const TapSet& t);

/// Complex sum of components. An all-zero sum yields {0, 0} by convention.
Phasor superpose(std::span<const Phasor> parts);

/// Cross-correlation of `received` against m*cos(w*(t + tau_s)), averaged over
/// the trace. The trace must span an integer number of modulation periods and
/// carry at least two samples per period; otherwise std::invalid_argument.
double demodulate_trace(const SampledTrace& received, const ModulationConfig& cfg,
                        double tau_s);

/// The four taps of `received`, demodulated at offsets n/(4f).
TapSet demodulate_taps(const SampledTrace& received, const ModulationConfig& cfg);

}  // namespace amcw

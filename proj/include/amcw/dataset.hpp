#pragma once

// Labeled dataset production: random scenes measured at the four modulation
// frequencies, deterministic train/test splitting, and strict CSV round-trip
// with a JSON metadata sidecar.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amcw/apd_sensor.hpp"
#include "amcw/sample.hpp"

namespace amcw {

/// Everything generate() needs. modulation.freq_hz is ignored; the entries of
/// freqs_hz are used instead, in ascending order.
struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t n = 100000;
  SimMode mode = SimMode::analytic;
  std::array<double, 4> freqs_hz = {12.5e6, 18.75e6, 25e6, 31.25e6};
  ModulationConfig modulation;
  SceneRanges ranges;
  SensorParams sensor;
  NoiseToggles toggles;
  int threads = 0;  ///< 0 = hardware concurrency
};

void validate(const GenConfig& cfg);

/// Draws cfg.n scenes and measures each at the four frequencies. Sample i
/// uses substreams keyed on (seed, i), so the output is reproducible and
/// independent of the thread count.
std::vector<LabeledSample> generate(const GenConfig& cfg);

/// Seeded uniform shuffle followed by a prefix split; the train side gets
/// ceil(n * fraction) rows, the test side the remainder. fraction in (0, 1).
std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split_train_test(
    const std::vector<LabeledSample>& rows, double fraction, std::uint64_t seed);

/// Writes rows with the fixed header; numbers round-trip exactly.
void write_csv(const std::string& path, const std::vector<LabeledSample>& rows);

/// Strict parse of the write_csv format. Malformed headers, wrong arity and
/// non-finite numbers raise std::runtime_error naming the offending line.
std::vector<LabeledSample> read_csv(const std::string& path);

/// Sidecar path for a dataset: "<stem>.meta.json" next to the CSV.
std::string meta_path_for(const std::string& csv_path);

/// Generation metadata sidecar (JSON).
void write_meta(const std::string& csv_path, const GenConfig& cfg);

}  // namespace amcw

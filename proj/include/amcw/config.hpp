#pragma once

// Run configuration shared by every CLI subcommand: one JSON document holding
// the physics, dataset, training, tuning, and scene settings.

#include <cstdint>
#include <string>
#include <vector>

#include "amcw/apd_sensor.hpp"
#include "amcw/dataset.hpp"
#include "amcw/gbtree.hpp"
#include "amcw/light_transport.hpp"
#include "amcw/scene_studio.hpp"
#include "amcw/signal_core.hpp"
#include "amcw/tpe.hpp"

namespace amcw {

struct DatasetConfig {
    std::size_t n = 100000;
    SimMode mode = SimMode::analytic;
    double split_fraction = 0.8;
};

struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = all hardware threads
    std::vector<double> freqs_hz = {12.5e6, 18.75e6, 25.0e6, 31.25e6};
    ModulationConfig modulation;  // freq_hz field ignored; freqs_hz governs
    SceneRanges ranges;
    SensorParams sensor;
    NoiseToggles noise;
    DatasetConfig dataset;
    TrainConfig train;
    TpeConfig tpe;
    CornerSceneConfig corner;
};

RunConfig default_config();

/// Throws std::invalid_argument naming the offending field.
void validate(const RunConfig& cfg);

/// Strict parse: unknown keys anywhere are rejected, missing keys default.
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a config file; io failures throw std::runtime_error.
RunConfig load_config(const std::string& path);

/// Canonical serialization (sorted keys, stable float formatting); equal
/// configs produce equal strings.
std::string config_to_json(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace amcw

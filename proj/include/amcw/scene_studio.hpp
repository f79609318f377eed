#pragma once

// Synthetic 90-degree corner renderer: per-pixel two-path scenes from ray
// casts against the two wall planes, plus raw/corrected/error map tooling.

#include <cstdint>
#include <vector>

#include "amcw/apd_sensor.hpp"
#include "amcw/gbtree.hpp"
#include "amcw/light_transport.hpp"
#include "amcw/signal_core.hpp"

namespace amcw {

struct CornerSceneConfig {
    double distance_m = 2.1;      // sensor to corner seam along the optical axis
    double opening_rad = 1.5707963267948966;  // angle between the two walls
    double reflect_left = 0.9;
    double reflect_right = 0.9;
    int width = 128;
    int height = 128;
    double fov_h_rad = 0.6981317007977318;  // 40 degrees
    double fov_v_rad = 0.6981317007977318;
    bool falloff_enabled = true;
    double falloff_scale_m = 0.1;  // detour falloff length; see trace_corner
    double gamma_r_v2 = 0.1794;
};

/// Throws std::invalid_argument when geometry or grid bounds are violated.
void validate(const CornerSceneConfig& cfg);

struct SceneGrid {
    int width = 0;
    int height = 0;
    std::vector<TwoPathScene> scenes;   // row-major, y*width + x
    std::vector<std::uint8_t> mask;     // 1 = valid pixel
};

struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;      // row-major; metres or millimetres
    std::vector<std::uint8_t> mask;  // 1 = valid pixel

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool valid(int x, int y) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
};

/// Casts one scan ray per pixel against both walls. The nearer hit is the
/// direct point A; the mirror point B is the nearest point on the opposite
/// wall, giving the one-way detour d_ab = |AB|. The direct reflectance is the
/// hit wall's value times cos(incidence); the detour reflectances come from
/// the two walls, with an optional 1/(1 + |AB|/scale)^2 falloff folded into
/// the A->B->A leg. Rays that miss both walls are masked.
SceneGrid trace_corner(const CornerSceneConfig& cfg);

/// Zeroes the detour reflectances of every pixel, leaving only direct returns.
void zero_mpi(SceneGrid& grid);

struct RenderedMaps {
    std::vector<double> freqs_hz;
    std::vector<DepthMap> depth;      // one per frequency, metres
    std::vector<DepthMap> amplitude;  // one per frequency, V^2
    DepthMap truth;                   // d_as field, metres
};

/// Simulates every pixel at every frequency. Pixel (x, y) at frequency j uses
/// the substream derived from (seed, pixel index, j), so maps are identical
/// for any thread count.
RenderedMaps render_maps(const SceneGrid& grid, const ModulationConfig& base_cfg,
                         const std::vector<double>& freqs_hz, const SensorParams& params,
                         const NoiseToggles& toggles, SimMode mode, std::uint64_t seed,
                         int threads);

/// Applies the booster per pixel to the canonical 8-feature vector
/// [d1..d4, a1..a4]. Requires exactly four rendered frequencies.
DepthMap correct_map(const BoosterModel& model, const RenderedMaps& maps);

/// Signed per-pixel error in millimetres; masks intersect. Throws on
/// dimension mismatch.
DepthMap error_map(const DepthMap& map, const DepthMap& truth);

/// Mean |value| over unmasked pixels; throws when none are valid.
double masked_mean_abs(const DepthMap& map);

/// Mean |value| over the columns whose centres lie within band_px pixels of
/// the corner seam (the horizontal centre of the grid).
double seam_band_mean_abs(const DepthMap& map, int band_px);

/// Mean |value| over the outer `fraction` of columns, split evenly between
/// the left and right edges.
double outer_columns_mean_abs(const DepthMap& map, double fraction);

}  // namespace amcw

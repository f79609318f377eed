#pragma once

#include <array>

namespace amcw {

/// Model inputs: four per-frequency depths (m) then four amplitudes (V^2),
/// frequencies in ascending order.
using FeatureVector = std::array<double, 8>;

struct LabeledSample {
  FeatureVector x{};
  double target_m = 0.0;  ///< true direct-path distance
};

/// Column headers for the flattened feature order plus the target.
inline constexpr const char* kCsvHeader =
    "d1_m,d2_m,d3_m,d4_m,a1_v2,a2_v2,a3_v2,a4_v2,target_m";

}  // namespace amcw

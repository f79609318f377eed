#pragma once

// Strict JSON packing/unpacking for the config and metadata structures.
// Unknown keys are rejected; missing keys fall back to the field defaults.

#include <json.hpp>

#include "amcw/apd_sensor.hpp"
#include "amcw/dataset.hpp"
#include "amcw/gbtree.hpp"
#include "amcw/light_transport.hpp"
#include "amcw/scene_studio.hpp"
#include "amcw/signal_core.hpp"
#include "amcw/tpe.hpp"

namespace amcw::codec {

using nlohmann::json;

/// Throws std::invalid_argument when `j` is not an object or has a key
/// outside `allowed`; `ctx` names the object in the message.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx);

double jnum(const json& j, const char* key, double def, const char* ctx);
bool jbool(const json& j, const char* key, bool def, const char* ctx);
std::int64_t jint(const json& j, const char* key, std::int64_t def, const char* ctx);
std::string jstr(const json& j, const char* key, const std::string& def, const char* ctx);

json pack(const ModulationConfig& m);
ModulationConfig unpack_modulation(const json& j);

json pack(const SceneRanges& r);
SceneRanges unpack_ranges(const json& j);

json pack(const SensorParams& p);
SensorParams unpack_sensor(const json& j);

json pack(const NoiseToggles& t);
NoiseToggles unpack_toggles(const json& j);

json pack(const TrainConfig& c);
TrainConfig unpack_train(const json& j);

json pack(const TpeConfig& c);
TpeConfig unpack_tpe(const json& j);

json pack(const CornerSceneConfig& c);
CornerSceneConfig unpack_corner(const json& j);

const char* mode_name(SimMode m);
SimMode mode_from_name(const std::string& s);

}  // namespace amcw::codec

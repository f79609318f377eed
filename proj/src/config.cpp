#include "amcw/config.hpp"

#include <stdexcept>

#include "amcw/io_util.hpp"
#include "amcw/json_codec.hpp"

namespace amcw {

RunConfig default_config() { return RunConfig{}; }

void validate(const RunConfig& cfg) {
    if (cfg.threads < 0) throw std::invalid_argument("config: threads must be >= 0");
    if (cfg.freqs_hz.size() != 4)
        throw std::invalid_argument("config: exactly four frequencies are required");
    double prev = 0.0;
    for (double f : cfg.freqs_hz) {
        if (!(f > prev))
            throw std::invalid_argument("config: frequencies must be positive and ascending");
        prev = f;
    }
    ModulationConfig mod = cfg.modulation;
    mod.freq_hz = cfg.freqs_hz[0];
    validate(mod);
    validate(cfg.ranges);
    validate(cfg.sensor);
    if (cfg.dataset.n < 1) throw std::invalid_argument("config: dataset.n must be >= 1");
    if (!(cfg.dataset.split_fraction > 0.0 && cfg.dataset.split_fraction < 1.0))
        throw std::invalid_argument("config: dataset.split_fraction must be in (0, 1)");
    validate(cfg.train);
    validate(cfg.tpe);
    validate(cfg.corner);
}

namespace {

using nlohmann::json;

DatasetConfig unpack_dataset(const json& j) {
    const char* ctx = "dataset";
    codec::check_keys(j, {"n", "mode", "split_fraction"}, ctx);
    DatasetConfig d;
    d.n = static_cast<std::size_t>(codec::jint(j, "n", static_cast<std::int64_t>(d.n), ctx));
    d.mode = codec::mode_from_name(codec::jstr(j, "mode", codec::mode_name(d.mode), ctx));
    d.split_fraction = codec::jnum(j, "split_fraction", d.split_fraction, ctx);
    return d;
}

json pack_dataset(const DatasetConfig& d) {
    return json{{"n", d.n}, {"mode", codec::mode_name(d.mode)}, {"split_fraction", d.split_fraction}};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + err.what());
    }
    codec::check_keys(j,
                      {"schema_version", "seed", "threads", "frequencies_hz", "modulation",
                       "ranges", "sensor", "noise", "dataset", "train", "tpe", "corner_scene"},
                      "config");
    if (codec::jint(j, "schema_version", 1, "config") != 1)
        throw std::invalid_argument("config: unsupported schema_version");

    RunConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(
        codec::jint(j, "seed", static_cast<std::int64_t>(cfg.seed), "config"));
    cfg.threads = static_cast<int>(codec::jint(j, "threads", cfg.threads, "config"));
    if (auto it = j.find("frequencies_hz"); it != j.end()) {
        if (!it->is_array() || it->empty())
            throw std::invalid_argument("config: 'frequencies_hz' must be a non-empty array");
        cfg.freqs_hz.clear();
        for (const auto& v : *it) {
            if (!v.is_number())
                throw std::invalid_argument("config: 'frequencies_hz' entries must be numbers");
            cfg.freqs_hz.push_back(v.get<double>());
        }
    }
    if (auto it = j.find("modulation"); it != j.end()) cfg.modulation = codec::unpack_modulation(*it);
    if (auto it = j.find("ranges"); it != j.end()) cfg.ranges = codec::unpack_ranges(*it);
    if (auto it = j.find("sensor"); it != j.end()) cfg.sensor = codec::unpack_sensor(*it);
    if (auto it = j.find("noise"); it != j.end()) cfg.noise = codec::unpack_toggles(*it);
    if (auto it = j.find("dataset"); it != j.end()) cfg.dataset = unpack_dataset(*it);
    if (auto it = j.find("train"); it != j.end()) cfg.train = codec::unpack_train(*it);
    if (auto it = j.find("tpe"); it != j.end()) cfg.tpe = codec::unpack_tpe(*it);
    if (auto it = j.find("corner_scene"); it != j.end()) cfg.corner = codec::unpack_corner(*it);

    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(io::read_file(path)); }

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["frequencies_hz"] = cfg.freqs_hz;
    j["modulation"] = codec::pack(cfg.modulation);
    j["ranges"] = codec::pack(cfg.ranges);
    j["sensor"] = codec::pack(cfg.sensor);
    j["noise"] = codec::pack(cfg.noise);
    j["dataset"] = pack_dataset(cfg.dataset);
    j["train"] = codec::pack(cfg.train);
    j["tpe"] = codec::pack(cfg.tpe);
    j["corner_scene"] = codec::pack(cfg.corner);
    return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) { return io::fnv1a_hex(config_to_json(cfg)); }

}  // namespace amcw

#include "amcw/dataset.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "amcw/io_util.hpp"
#include "amcw/json_codec.hpp"
#include "amcw/light_transport.hpp"
#include "amcw/parallel.hpp"
#include "amcw/rng.hpp"
#include "amcw/signal_core.hpp"

namespace amcw {

namespace {

ModulationConfig at_freq(const ModulationConfig& base, double freq_hz) {
    ModulationConfig cfg = base;
    cfg.freq_hz = freq_hz;
    return cfg;
}

}  // namespace

void validate(const GenConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("dataset: n must be >= 1");
    double prev = 0.0;
    for (double f : cfg.freqs_hz) {
        if (!(f > prev)) throw std::invalid_argument("dataset: frequencies must be positive and ascending");
        prev = f;
    }
    if (cfg.threads < 0) throw std::invalid_argument("dataset: threads must be >= 0");
    validate(at_freq(cfg.modulation, cfg.freqs_hz[0]));
    validate(cfg.ranges);
    validate(cfg.sensor);
}

std::vector<LabeledSample> generate(const GenConfig& cfg) {
    validate(cfg);

    // The calibrated baseline power does not depend on frequency; derive it
    // once instead of per measurement.
    const double p0 = calibrate(at_freq(cfg.modulation, cfg.freqs_hz[0]), cfg.sensor,
                                cfg.ranges.gamma_r);

    std::vector<LabeledSample> rows(cfg.n);
    parallel_for_blocks(cfg.n, resolve_threads(cfg.threads), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto scene_eng = rng::make_engine(cfg.seed, i, 0);
            const TwoPathScene scene = sample_scene(cfg.ranges, scene_eng);
            LabeledSample& row = rows[i];
            for (std::size_t j = 0; j < cfg.freqs_hz.size(); ++j) {
                auto eng = rng::make_engine(cfg.seed, i, j + 1);
                const MeasurementRecord rec =
                    simulate_measurement(scene, at_freq(cfg.modulation, cfg.freqs_hz[j]),
                                         cfg.sensor, cfg.toggles, eng, cfg.mode, p0);
                row.x[j] = rec.depth_m;
                row.x[4 + j] = rec.amplitude_v2;
            }
            row.target_m = scene.d_as;
        }
    });
    return rows;
}

std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split_train_test(
    const std::vector<LabeledSample>& rows, double fraction, std::uint64_t seed) {
    if (rows.empty()) throw std::invalid_argument("split: empty input");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split: fraction must be in (0, 1)");

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto eng = rng::make_engine(seed, 0x5b117u);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng::bounded(eng, i + 1)]);
    }

    const auto train_n = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(rows.size())));
    std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> out;
    out.first.reserve(train_n);
    out.second.reserve(rows.size() - train_n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < train_n ? out.first : out.second).push_back(rows[order[i]]);
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<LabeledSample>& rows) {
    std::string text;
    text.reserve(64 + rows.size() * 180);
    text += kCsvHeader;
    text += '\n';
    for (const LabeledSample& row : rows) {
        for (double v : row.x) {
            text += io::fmt_double(v);
            text += ',';
        }
        text += io::fmt_double(row.target_m);
        text += '\n';
    }
    io::write_file(path, text);
}

namespace {

double parse_field(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw std::runtime_error("csv: bad number on line " + std::to_string(line_no));
    }
    return value;
}

}  // namespace

std::vector<LabeledSample> read_csv(const std::string& path) {
    const std::string text = io::read_file(path);
    std::vector<LabeledSample> rows;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kCsvHeader) throw std::runtime_error("csv: bad header on line 1");
            continue;
        }
        if (line.empty()) continue;

        LabeledSample row;
        std::size_t field_idx = 0;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view field = line.substr(
                start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            if (field_idx < row.x.size()) {
                row.x[field_idx] = parse_field(field, line_no);
            } else if (field_idx == row.x.size()) {
                row.target_m = parse_field(field, line_no);
            } else {
                throw std::runtime_error("csv: too many fields on line " + std::to_string(line_no));
            }
            ++field_idx;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (field_idx != row.x.size() + 1) {
            throw std::runtime_error("csv: too few fields on line " + std::to_string(line_no));
        }
        rows.push_back(row);
    }
    if (line_no == 0) throw std::runtime_error("csv: empty file");
    return rows;
}

std::string meta_path_for(const std::string& csv_path) {
    const std::string suffix = ".csv";
    if (csv_path.size() > suffix.size() &&
        csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return csv_path.substr(0, csv_path.size() - suffix.size()) + ".meta.json";
    }
    return csv_path + ".meta.json";
}

void write_meta(const std::string& csv_path, const GenConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seed"] = cfg.seed;
    j["n"] = cfg.n;
    j["mode"] = codec::mode_name(cfg.mode);
    j["frequencies_hz"] = cfg.freqs_hz;
    j["modulation"] = codec::pack(cfg.modulation);
    j["ranges"] = codec::pack(cfg.ranges);
    j["sensor"] = codec::pack(cfg.sensor);
    j["noise"] = codec::pack(cfg.toggles);
    io::write_file(meta_path_for(csv_path), j.dump(2) + "\n");
}

}  // namespace amcw

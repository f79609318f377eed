// Command-line pipeline: generate -> tune -> train -> eval -> scene -> report.
// One --seed drives every derived random stream; each output directory gets a
// manifest with the config hash so runs can be traced and reproduced.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amcw/config.hpp"
#include "amcw/dataset.hpp"
#include "amcw/evalkit.hpp"
#include "amcw/gbtree.hpp"
#include "amcw/io_util.hpp"
#include "amcw/json_codec.hpp"
#include "amcw/scene_studio.hpp"
#include "amcw/tpe.hpp"
#include "amcw/tuning.hpp"

namespace {

using namespace amcw;

constexpr std::size_t kTuneCapRows = 30000;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t n = 0;
    bool n_set = false;
    std::string mode;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_n_mode) {
    cmd->add_option("--config", opts.config_path, "JSON config file; defaults used when omitted");
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "master seed override")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--threads", opts.threads, "worker thread cap (0 = all cores)");
    if (with_n_mode) {
        cmd->add_option("--n", opts.n, "sample count override")
            ->check(CLI::PositiveNumber)
            ->each([&opts](const std::string&) { opts.n_set = true; });
        cmd->add_option("--mode", opts.mode, "simulation mode override")
            ->check(CLI::IsMember({"trace", "analytic"}));
    }
}

RunConfig load_with_overrides(const CommonOpts& opts) {
    RunConfig cfg = opts.config_path.empty() ? default_config() : load_config(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.threads >= 0) cfg.threads = opts.threads;
    if (opts.n_set) cfg.dataset.n = static_cast<std::size_t>(opts.n);
    if (!opts.mode.empty()) cfg.dataset.mode = codec::mode_from_name(opts.mode);
    validate(cfg);
    return cfg;
}

GenConfig to_gen_config(const RunConfig& cfg) {
    GenConfig g;
    g.seed = cfg.seed;
    g.n = cfg.dataset.n;
    g.mode = cfg.dataset.mode;
    for (std::size_t j = 0; j < g.freqs_hz.size(); ++j) g.freqs_hz[j] = cfg.freqs_hz[j];
    g.modulation = cfg.modulation;
    g.ranges = cfg.ranges;
    g.sensor = cfg.sensor;
    g.toggles = cfg.noise;
    g.threads = cfg.threads;
    return g;
}

void write_manifest(const std::string& out_dir, const std::string& command, const RunConfig& cfg,
                    std::vector<std::string> inputs, std::vector<std::string> outputs) {
    std::erase(inputs, std::string());
    nlohmann::json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    j["inputs"] = std::move(inputs);
    j["outputs"] = std::move(outputs);
    io::write_file(out_dir + "/manifest.json", j.dump(2) + "\n");
}

void to_xy(const std::vector<LabeledSample>& rows, std::vector<FeatureVector>& x,
           std::vector<double>& y) {
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (const LabeledSample& row : rows) {
        x.push_back(row.x);
        y.push_back(row.target_m);
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string metrics_row(const std::string& model, const std::string& split, const ErrorStats& s) {
    std::string row = model + ',' + split + ',' + std::to_string(s.n);
    for (double v : {s.mae_mm, s.rmse_mm, s.bias_mm, s.max_abs_mm}) {
        row += ',';
        row += io::fmt_double(v);
    }
    row += '\n';
    return row;
}

std::string histogram_csv(const Histogram& h) {
    std::string text = "bin_left_mm,bin_right_mm,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        text += io::fmt_double(h.lo + h.bin_width * static_cast<double>(i));
        text += ',';
        text += io::fmt_double(h.lo + h.bin_width * static_cast<double>(i + 1));
        text += ',';
        text += std::to_string(h.counts[i]);
        text += '\n';
    }
    return text;
}

std::vector<double> signed_errors_mm(const std::vector<double>& pred,
                                     const std::vector<double>& truth) {
    std::vector<double> err(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) err[i] = (pred[i] - truth[i]) * 1000.0;
    return err;
}

int cmd_generate(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto start = std::chrono::steady_clock::now();
    io::ensure_dir(opts.out_dir);

    const GenConfig gen_cfg = to_gen_config(cfg);
    const std::vector<LabeledSample> rows = generate(gen_cfg);
    const std::string csv_path = opts.out_dir + "/dataset.csv";
    write_csv(csv_path, rows);
    write_meta(csv_path, gen_cfg);
    write_manifest(opts.out_dir, "generate", cfg, {opts.config_path},
                   {"dataset.csv", "dataset.meta.json"});
    std::cout << "generate: " << rows.size() << " rows -> " << csv_path << " ("
              << seconds_since(start) << " s)\n";
    return 0;
}

int cmd_tune(const CommonOpts& opts, const std::string& dataset_path) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto start = std::chrono::steady_clock::now();
    io::ensure_dir(opts.out_dir);

    const auto rows = read_csv(dataset_path);
    const auto [train_rows, test_rows] =
        split_train_test(rows, cfg.dataset.split_fraction, cfg.seed);
    std::vector<FeatureVector> x;
    std::vector<double> y;
    to_xy(train_rows, x, y);

    TpeConfig tpe_cfg = cfg.tpe;
    tpe_cfg.seed = cfg.seed;
    const TuneData data = make_tune_data(x, y, cfg.seed, kTuneCapRows);
    const SearchSpace space = booster_search_space();
    const TpeResult search = optimize(
        space, [&](const ParamSet& params) { return booster_trial_loss(data, params, cfg.seed); },
        tpe_cfg);

    io::write_file(opts.out_dir + "/trials.csv", trials_to_csv(space, search.trials));
    nlohmann::json best;
    best["schema_version"] = 1;
    best["best_loss"] = search.best_loss;
    best["params"] = search.best_params;
    best["train"] = codec::pack(params_to_train_config(search.best_params, cfg.seed));
    io::write_file(opts.out_dir + "/best_params.json", best.dump(2) + "\n");
    write_manifest(opts.out_dir, "tune", cfg, {opts.config_path, dataset_path},
                   {"trials.csv", "best_params.json"});
    std::cout << "tune: " << search.trials.size() << " trials, best loss " << search.best_loss
              << " (" << seconds_since(start) << " s)\n";
    return 0;
}

TrainConfig load_hyperparams(const std::string& path, std::uint64_t seed) {
    const nlohmann::json j = nlohmann::json::parse(io::read_file(path));
    codec::check_keys(j, {"schema_version", "best_loss", "params", "train"}, "hyperparams");
    TrainConfig tc = codec::unpack_train(j.at("train"));
    tc.seed = seed;
    return tc;
}

int cmd_train(const CommonOpts& opts, const std::string& dataset_path,
              const std::string& hyper_path) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto start = std::chrono::steady_clock::now();
    io::ensure_dir(opts.out_dir);

    const auto rows = read_csv(dataset_path);
    const auto [train_rows, test_rows] =
        split_train_test(rows, cfg.dataset.split_fraction, cfg.seed);
    std::vector<FeatureVector> x;
    std::vector<double> y;
    to_xy(train_rows, x, y);

    TrainConfig tc = cfg.train;
    if (!hyper_path.empty()) tc = load_hyperparams(hyper_path, cfg.seed);
    tc.seed = cfg.seed;
    const BoosterModel model = fit_booster(x, y, tc);
    save_model(model, opts.out_dir + "/model.json");

    int leaves = 0;
    for (const RegressionTree& tree : model.trees) leaves += tree.leaf_count();
    std::string report;
    report += "rows: " + std::to_string(x.size()) + "\n";
    report += "trees: " + std::to_string(model.trees.size()) + "\n";
    report += "leaves: " + std::to_string(leaves) + "\n";
    report += "train_objective: " + io::fmt_double(objective_value(model, x, y)) + "\n";
    io::write_file(opts.out_dir + "/train_report.txt", report);
    write_manifest(opts.out_dir, "train", cfg, {opts.config_path, dataset_path, hyper_path},
                   {"model.json", "train_report.txt"});
    std::cout << "train: " << model.trees.size() << " trees on " << x.size() << " rows ("
              << seconds_since(start) << " s)\n";
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& dataset_path,
             const std::string& model_path) {
    const RunConfig cfg = load_with_overrides(opts);
    io::ensure_dir(opts.out_dir);

    const auto rows = read_csv(dataset_path);
    const auto [train_rows, test_rows] =
        split_train_test(rows, cfg.dataset.split_fraction, cfg.seed);
    const BoosterModel model = load_model(model_path);

    std::string metrics = "model,split,n,mae_mm,rmse_mm,bias_mm,max_abs_mm\n";
    std::vector<double> raw_test_err, model_test_err;
    for (const auto& [split_name, split_rows] :
         {std::pair{"train", &train_rows}, std::pair{"test", &test_rows}}) {
        std::vector<FeatureVector> x;
        std::vector<double> y;
        to_xy(*split_rows, x, y);
        std::vector<double> raw(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) raw[i] = x[i][3];
        const std::vector<double> pred = predict_batch(model, x);
        metrics += metrics_row("raw_31mhz", split_name, error_stats(raw, y));
        metrics += metrics_row("booster", split_name, error_stats(pred, y));
        if (std::string(split_name) == "test") {
            raw_test_err = signed_errors_mm(raw, y);
            model_test_err = signed_errors_mm(pred, y);
        }
    }
    io::write_file(opts.out_dir + "/metrics.csv", metrics);
    io::write_file(opts.out_dir + "/hist_raw_test.csv", histogram_csv(histogram(raw_test_err, 40)));
    io::write_file(opts.out_dir + "/hist_model_test.csv",
                   histogram_csv(histogram(model_test_err, 40)));
    write_manifest(opts.out_dir, "eval", cfg, {opts.config_path, dataset_path, model_path},
                   {"metrics.csv", "hist_raw_test.csv", "hist_model_test.csv"});
    std::cout << "eval: metrics -> " << opts.out_dir << "/metrics.csv\n";
    return 0;
}

std::vector<float> to_pfm_values(const DepthMap& map) {
    std::vector<float> out(map.values.size(), 0.0f);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.mask[i]) out[i] = static_cast<float>(map.values[i]);
    }
    return out;
}

std::vector<double> masked_or_nan(const DepthMap& map) {
    std::vector<double> out(map.values.size(), std::nan(""));
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.mask[i]) out[i] = map.values[i];
    }
    return out;
}

int cmd_scene(const CommonOpts& opts, const std::string& model_path) {
    const RunConfig cfg = load_with_overrides(opts);
    const auto start = std::chrono::steady_clock::now();
    io::ensure_dir(opts.out_dir);

    const SceneGrid grid = trace_corner(cfg.corner);
    const RenderedMaps maps = render_maps(grid, cfg.modulation, cfg.freqs_hz, cfg.sensor,
                                          cfg.noise, cfg.dataset.mode, cfg.seed, cfg.threads);

    std::vector<std::string> outputs = {"truth.pfm", "err_raw_mm.csv", "scene_metrics.csv"};
    io::write_pfm(opts.out_dir + "/truth.pfm", maps.truth.width, maps.truth.height,
                  to_pfm_values(maps.truth));
    for (std::size_t j = 0; j < maps.depth.size(); ++j) {
        const std::string d_name = "depth_f" + std::to_string(j + 1) + ".pfm";
        const std::string a_name = "amp_f" + std::to_string(j + 1) + ".pfm";
        io::write_pfm(opts.out_dir + "/" + d_name, maps.depth[j].width, maps.depth[j].height,
                      to_pfm_values(maps.depth[j]));
        io::write_pfm(opts.out_dir + "/" + a_name, maps.amplitude[j].width,
                      maps.amplitude[j].height, to_pfm_values(maps.amplitude[j]));
        outputs.push_back(d_name);
        outputs.push_back(a_name);
    }

    const DepthMap raw_err = error_map(maps.depth.back(), maps.truth);
    io::write_csv_grid(opts.out_dir + "/err_raw_mm.csv", raw_err.width, raw_err.height,
                       masked_or_nan(raw_err));

    std::string metrics = "metric,value\n";
    metrics += "raw_mae_mm," + io::fmt_double(masked_mean_abs(raw_err)) + "\n";
    metrics += "seam_raw_mae_mm," + io::fmt_double(seam_band_mean_abs(raw_err, 5)) + "\n";
    metrics += "outer_raw_mae_mm," + io::fmt_double(outer_columns_mean_abs(raw_err, 0.25)) + "\n";

    if (!model_path.empty()) {
        const BoosterModel model = load_model(model_path);
        const DepthMap corrected = correct_map(model, maps);
        const DepthMap corr_err = error_map(corrected, maps.truth);
        io::write_pfm(opts.out_dir + "/corrected.pfm", corrected.width, corrected.height,
                      to_pfm_values(corrected));
        io::write_csv_grid(opts.out_dir + "/err_corrected_mm.csv", corr_err.width, corr_err.height,
                           masked_or_nan(corr_err));
        metrics += "corrected_mae_mm," + io::fmt_double(masked_mean_abs(corr_err)) + "\n";
        metrics +=
            "corrected_seam_mae_mm," + io::fmt_double(seam_band_mean_abs(corr_err, 5)) + "\n";
        outputs.push_back("corrected.pfm");
        outputs.push_back("err_corrected_mm.csv");
    }
    io::write_file(opts.out_dir + "/scene_metrics.csv", metrics);
    write_manifest(opts.out_dir, "scene", cfg, {opts.config_path, model_path}, std::move(outputs));
    std::cout << "scene: maps -> " << opts.out_dir << " (" << seconds_since(start) << " s)\n";
    return 0;
}

int cmd_report(const CommonOpts& opts, const std::string& artifacts_dir) {
    const RunConfig cfg = load_with_overrides(opts);
    io::ensure_dir(opts.out_dir);

    std::vector<std::string> metric_files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(artifacts_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "metrics.csv") {
            metric_files.push_back(entry.path().string());
        }
    }
    std::sort(metric_files.begin(), metric_files.end());
    if (metric_files.empty())
        throw std::runtime_error("report: no metrics.csv files under " + artifacts_dir);

    std::map<std::string, ModelReport> by_model;
    for (const std::string& path : metric_files) {
        const std::string text = io::read_file(path);
        std::size_t pos = text.find('\n');
        if (pos == std::string::npos) continue;
        ++pos;
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            const std::string line = text.substr(pos, eol - pos);
            pos = eol + 1;
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                fields.push_back(line.substr(
                    start, comma == std::string::npos ? std::string::npos : comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (fields.size() != 7) throw std::runtime_error("report: malformed row in " + path);
            ModelReport& r = by_model[fields[0]];
            r.name = fields[0];
            ErrorStats& stats = fields[1] == "train" ? r.train : r.test;
            stats.n = std::stoull(fields[2]);
            stats.mae_mm = std::stod(fields[3]);
            stats.rmse_mm = std::stod(fields[4]);
            stats.bias_mm = std::stod(fields[5]);
            stats.max_abs_mm = std::stod(fields[6]);
        }
    }

    std::vector<ModelReport> reports;
    for (auto& [name, report] : by_model) reports.push_back(report);
    io::write_file(opts.out_dir + "/comparison.csv", comparison_csv(reports));
    const std::string table = comparison_text(reports);
    io::write_file(opts.out_dir + "/comparison.txt", table);
    write_manifest(opts.out_dir, "report", cfg, {artifacts_dir},
                   {"comparison.csv", "comparison.txt"});
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMCW LiDAR multipath simulation and correction pipeline"};
    app.require_subcommand(1);

    CommonOpts gen_opts, tune_opts, train_opts, eval_opts, scene_opts, report_opts;
    std::string tune_dataset, train_dataset, train_hyper, eval_dataset, eval_model, scene_model,
        report_dir;

    CLI::App* c_gen = app.add_subcommand("generate", "generate a labeled dataset");
    add_common(c_gen, gen_opts, true);

    CLI::App* c_tune = app.add_subcommand("tune", "search booster hyperparameters");
    add_common(c_tune, tune_opts, false);
    c_tune->add_option("--dataset", tune_dataset, "dataset CSV")->required();

    CLI::App* c_train = app.add_subcommand("train", "fit the booster");
    add_common(c_train, train_opts, false);
    c_train->add_option("--dataset", train_dataset, "dataset CSV")->required();
    c_train->add_option("--hyperparams", train_hyper, "best_params.json from tune");

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate a model against a dataset");
    add_common(c_eval, eval_opts, false);
    c_eval->add_option("--dataset", eval_dataset, "dataset CSV")->required();
    c_eval->add_option("--model", eval_model, "model JSON")->required();

    CLI::App* c_scene = app.add_subcommand("scene", "render the corner scene");
    add_common(c_scene, scene_opts, false);
    c_scene->add_option("--model", scene_model, "model JSON for the corrected map");

    CLI::App* c_report = app.add_subcommand("report", "consolidate eval metrics");
    add_common(c_report, report_opts, false);
    c_report->add_option("--artifacts", report_dir, "directory containing eval outputs")
        ->required();

    try {
        app.parse(argc, argv);
        if (c_gen->parsed()) return cmd_generate(gen_opts);
        if (c_tune->parsed()) return cmd_tune(tune_opts, tune_dataset);
        if (c_train->parsed()) return cmd_train(train_opts, train_dataset, train_hyper);
        if (c_eval->parsed()) return cmd_eval(eval_opts, eval_dataset, eval_model);
        if (c_scene->parsed()) return cmd_scene(scene_opts, scene_model);
        if (c_report->parsed()) return cmd_report(report_opts, report_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

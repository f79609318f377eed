#include "amcw/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "amcw/rng.hpp"

namespace amcw {

SearchSpace booster_search_space() {
    return {
        {"k_trees", ParamKind::int_uniform, 100.0, 1000.0},
        {"max_depth", ParamKind::int_uniform, 3.0, 12.0},
        {"learning_rate", ParamKind::log_uniform, 0.01, 0.3},
        {"lambda_reg", ParamKind::log_uniform, 1e-3, 10.0},
        {"gamma_reg", ParamKind::log_uniform, 1e-8, 1e-1},
        {"min_child_weight", ParamKind::log_uniform, 1.0, 100.0},
        {"subsample", ParamKind::uniform, 0.5, 1.0},
    };
}

TrainConfig params_to_train_config(const ParamSet& params, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.k_trees = static_cast<int>(params.at("k_trees"));
    cfg.max_depth = static_cast<int>(params.at("max_depth"));
    cfg.learning_rate = params.at("learning_rate");
    cfg.lambda_reg = params.at("lambda_reg");
    cfg.gamma_reg = params.at("gamma_reg");
    cfg.min_child_weight = params.at("min_child_weight");
    cfg.subsample = params.at("subsample");
    cfg.seed = seed;
    return cfg;
}

TuneData make_tune_data(const std::vector<FeatureVector>& x_train,
                        const std::vector<double>& y_train, std::uint64_t seed,
                        std::size_t max_rows) {
    if (x_train.size() != y_train.size()) throw std::invalid_argument("tune: size mismatch");
    if (x_train.size() < 2) throw std::invalid_argument("tune: need at least two rows");

    std::vector<std::size_t> order(x_train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto eng = rng::make_engine(seed, 0x707e);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng::bounded(eng, i + 1)]);
    }
    std::size_t m = order.size();
    if (max_rows > 0 && max_rows < m) m = max_rows;
    if (m < 2) m = 2;

    const auto fit_n = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(m)));
    TuneData data;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t row = order[i];
        if (i < fit_n) {
            data.x_fit.push_back(x_train[row]);
            data.y_fit.push_back(y_train[row]);
        } else {
            data.x_val.push_back(x_train[row]);
            data.y_val.push_back(y_train[row]);
        }
    }
    if (data.x_val.empty()) {  // tiny inputs: keep at least one validation row
        data.x_val.push_back(data.x_fit.back());
        data.y_val.push_back(data.y_fit.back());
        data.x_fit.pop_back();
        data.y_fit.pop_back();
    }
    return data;
}

double booster_trial_loss(const TuneData& data, const ParamSet& params, std::uint64_t seed) {
    const TrainConfig cfg = params_to_train_config(params, seed);
    const BoosterModel model = fit_booster(data.x_fit, data.y_fit, cfg);
    return objective_value(model, data.x_val, data.y_val);
}

BoosterTuneResult tune_booster(const std::vector<FeatureVector>& x_train,
                               const std::vector<double>& y_train, const TpeConfig& tpe_cfg,
                               std::uint64_t seed, std::size_t tune_cap_rows) {
    const TuneData data = make_tune_data(x_train, y_train, seed, tune_cap_rows);
    const SearchSpace space = booster_search_space();

    BoosterTuneResult result;
    result.search = optimize(
        space, [&](const ParamSet& params) { return booster_trial_loss(data, params, seed); },
        tpe_cfg);
    result.best_config = params_to_train_config(result.search.best_params, seed);
    result.model = fit_booster(x_train, y_train, result.best_config);
    return result;
}

KnnModel tune_knn(const std::vector<FeatureVector>& x_train, const std::vector<double>& y_train,
                  std::uint64_t seed, int k_max, std::size_t tune_cap_rows) {
    if (k_max < 1) throw std::invalid_argument("tune: k_max must be >= 1");
    const TuneData data = make_tune_data(x_train, y_train, seed, tune_cap_rows);
    k_max = std::min<int>(k_max, static_cast<int>(data.x_fit.size()));
    if (k_max < 2) return knn_fit(x_train, y_train, KnnConfig{1});

    KnnModel probe = knn_fit(data.x_fit, data.y_fit, KnnConfig{1});
    const Objective loss = [&](const ParamSet& params) {
        probe.k = static_cast<int>(params.at("k"));
        double abs_sum = 0.0;
        for (std::size_t i = 0; i < data.x_val.size(); ++i) {
            abs_sum += std::abs(knn_predict(probe, data.x_val[i]) - data.y_val[i]);
        }
        return abs_sum / static_cast<double>(data.x_val.size());
    };

    const SearchSpace space = {{"k", ParamKind::int_uniform, 1.0, static_cast<double>(k_max)}};
    TpeConfig tpe_cfg;
    tpe_cfg.seed = seed;
    const TpeResult result = optimize(space, loss, tpe_cfg);
    const int best_k = static_cast<int>(result.best_params.at("k"));
    return knn_fit(x_train, y_train, KnnConfig{best_k});
}

}  // namespace amcw

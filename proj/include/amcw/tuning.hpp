#pragma once

// Hyperparameter search glue: the booster search space, the validation
// objective handed to the TPE loop, and the KNN baseline tuner.

#include <cstdint>
#include <vector>

#include "amcw/evalkit.hpp"
#include "amcw/gbtree.hpp"
#include "amcw/sample.hpp"
#include "amcw/tpe.hpp"

namespace amcw {

/// Seven-dimensional booster space: tree count, depth, learning rate, both
/// regularizers, min child weight, subsample fraction.
SearchSpace booster_search_space();

/// Maps a sampled point back onto TrainConfig; integer-kind values are
/// rounded by the sampler already.
TrainConfig params_to_train_config(const ParamSet& params, std::uint64_t seed);

struct TuneData {
    std::vector<FeatureVector> x_fit;   // inner training split
    std::vector<double> y_fit;
    std::vector<FeatureVector> x_val;   // inner validation split
    std::vector<double> y_val;
};

/// Carves a fixed inner 80/20 split out of the training rows, optionally
/// capped to at most `max_rows` rows total for tuning speed (0 = no cap).
TuneData make_tune_data(const std::vector<FeatureVector>& x_train,
                        const std::vector<double>& y_train,
                        std::uint64_t seed, std::size_t max_rows);

/// Loss for one trial: fit on the inner split, then validation squared-error
/// sum plus the model's structural penalty.
double booster_trial_loss(const TuneData& data, const ParamSet& params,
                          std::uint64_t seed);

/// Runs the TPE loop over the booster space and refits the best config on the
/// full training rows.
struct BoosterTuneResult {
    TpeResult search;
    TrainConfig best_config;
    BoosterModel model;
};
BoosterTuneResult tune_booster(const std::vector<FeatureVector>& x_train,
                               const std::vector<double>& y_train,
                               const TpeConfig& tpe_cfg, std::uint64_t seed,
                               std::size_t tune_cap_rows);

/// Picks k for the KNN baseline with the TPE loop over the integers
/// [1, k_max], scoring validation MAE on the same kind of inner split, then
/// refits on the full training rows.
KnnModel tune_knn(const std::vector<FeatureVector>& x_train,
                  const std::vector<double>& y_train,
                  std::uint64_t seed, int k_max, std::size_t tune_cap_rows);

}  // namespace amcw

#pragma once

// Error metrics, histograms, and the k-nearest-neighbour baseline used to
// benchmark the boosted-tree corrector.

#include <cstddef>
#include <string>
#include <vector>

#include "amcw/sample.hpp"

namespace amcw {

struct ErrorStats {
    double mae_mm = 0.0;
    double rmse_mm = 0.0;
    double bias_mm = 0.0;     // mean signed error, prediction minus truth
    double max_abs_mm = 0.0;
    std::size_t n = 0;
};

/// Millimetre-scale error statistics over paired predictions and truths
/// given in metres. Throws std::invalid_argument on size mismatch or empty
/// input.
ErrorStats error_stats(const std::vector<double>& pred_m,
                       const std::vector<double>& truth_m);

struct Histogram {
    double lo = 0.0;
    double bin_width = 0.0;
    std::vector<std::size_t> counts;
};

/// Equal-width histogram spanning [min, max] of the values; the max lands in
/// the last bin. Throws on empty input or bins < 1.
Histogram histogram(const std::vector<double>& values, int bins);

struct KnnConfig {
    int k = 5;
};

struct KnnModel {
    int k = 1;
    std::vector<FeatureVector> points;  // z-scored training features
    std::vector<double> targets_m;
    FeatureVector mean{};
    FeatureVector scale{};  // per-feature std, zeros replaced by 1
};

/// Stores the training set with per-feature standardization baked in.
KnnModel knn_fit(const std::vector<FeatureVector>& X,
                 const std::vector<double>& y, const KnnConfig& cfg);

/// Mean target of the k nearest neighbours under Euclidean distance in the
/// standardized space. Distance ties resolve to the lower training index.
double knn_predict(const KnnModel& model, const FeatureVector& x);

std::vector<double> knn_predict_batch(const KnnModel& model,
                                      const std::vector<FeatureVector>& X);

struct ModelReport {
    std::string name;
    ErrorStats train;
    ErrorStats test;
    double train_time_s = 0.0;
};

/// CSV table, one row per model: name, train/test MAE and RMSE in mm, fit
/// time in seconds.
std::string comparison_csv(const std::vector<ModelReport>& reports);

/// Fixed-width text rendering of the same table.
std::string comparison_text(const std::vector<ModelReport>& reports);

}  // namespace amcw

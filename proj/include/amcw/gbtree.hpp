#pragma once

// Gradient-boosted regression trees with second-order (Newton) leaf weights
// and exact greedy splits. Squared-error loss only; the tree count is small
// enough that everything stays in memory.

#include <cstdint>
#include <string>
#include <vector>

#include "amcw/sample.hpp"

namespace amcw {

struct TrainConfig {
    int k_trees = 300;
    int max_depth = 8;
    double learning_rate = 0.1;
    double lambda_reg = 1.0;        // L2 penalty on leaf weights
    double gamma_reg = 0.0;         // per-leaf complexity penalty
    double min_child_weight = 1.0;  // minimum hessian sum per child
    double subsample = 1.0;         // row fraction per boosting round
    std::uint64_t seed = 1;
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const TrainConfig& cfg);

struct TreeNode {
    int feature = -1;        // split feature index, -1 for leaves
    double threshold = 0.0;  // rows with x[feature] < threshold go left
    double value = 0.0;      // leaf weight, meaningful only for leaves
    int left = -1;
    int right = -1;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(const FeatureVector& x) const;
    int leaf_count() const;
    double weight_sq_sum() const;
};

struct BoosterModel {
    double base_score = 0.0;
    TrainConfig config;
    std::vector<RegressionTree> trees;

    double predict(const FeatureVector& x) const;
};

/// Gradient and hessian of the squared-error loss at one sample.
void squared_loss_grad_hess(double pred, double target, double& grad, double& hess);

/// Newton-optimal leaf weight for accumulated gradient/hessian sums.
double leaf_weight(double grad_sum, double hess_sum, double lambda_reg);

/// Gain of splitting one node into the given left/right halves.
double split_gain(double g_left, double h_left, double g_right, double h_right,
                  double lambda_reg, double gamma_reg);

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Exact greedy search over all features and midpoint thresholds for the rows
/// listed in `rows`. Ties resolve to the lowest feature index, then the lowest
/// threshold. Only splits with positive gain and both children satisfying
/// min_child_weight are eligible.
SplitChoice find_best_split(const std::vector<FeatureVector>& X,
                            const std::vector<double>& grad,
                            const std::vector<double>& hess,
                            const std::vector<std::size_t>& rows,
                            const TrainConfig& cfg);

/// Grows one tree on the given rows against fixed gradients/hessians.
RegressionTree grow_tree(const std::vector<FeatureVector>& X,
                         const std::vector<double>& grad,
                         const std::vector<double>& hess,
                         const std::vector<std::size_t>& rows,
                         const TrainConfig& cfg);

/// Full boosting loop; the model records the config it was trained with.
BoosterModel fit_booster(const std::vector<FeatureVector>& X,
                         const std::vector<double>& y,
                         const TrainConfig& cfg);

std::vector<double> predict_batch(const BoosterModel& model,
                                  const std::vector<FeatureVector>& X);

/// Training objective: squared-error sum plus the structural penalty
/// (gamma_reg * leaves + lambda_reg/2 * sum of squared leaf weights) of every
/// tree, using the penalties stored in the model config.
double objective_value(const BoosterModel& model,
                       const std::vector<FeatureVector>& X,
                       const std::vector<double>& y);

/// JSON round trip; load restores bit-identical predictions.
void save_model(const BoosterModel& model, const std::string& path);
BoosterModel load_model(const std::string& path);

}  // namespace amcw

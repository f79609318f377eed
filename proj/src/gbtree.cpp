#include "amcw/gbtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "amcw/io_util.hpp"
#include "amcw/json_codec.hpp"
#include "amcw/rng.hpp"

namespace amcw {

void validate(const TrainConfig& cfg) {
    if (cfg.k_trees < 1) throw std::invalid_argument("train: k_trees must be >= 1");
    if (cfg.max_depth < 1) throw std::invalid_argument("train: max_depth must be >= 1");
    if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0))
        throw std::invalid_argument("train: learning_rate must be in (0, 1]");
    if (!(cfg.lambda_reg >= 0.0)) throw std::invalid_argument("train: lambda_reg must be >= 0");
    if (!(cfg.gamma_reg >= 0.0)) throw std::invalid_argument("train: gamma_reg must be >= 0");
    if (!(cfg.min_child_weight >= 0.0))
        throw std::invalid_argument("train: min_child_weight must be >= 0");
    if (!(cfg.subsample > 0.0 && cfg.subsample <= 1.0))
        throw std::invalid_argument("train: subsample must be in (0, 1]");
}

double RegressionTree::predict(const FeatureVector& x) const {
    std::size_t idx = 0;
    for (std::size_t steps = 0; steps <= nodes.size(); ++steps) {
        const TreeNode& node = nodes[idx];
        if (node.is_leaf()) return node.value;
        idx = static_cast<std::size_t>(x[node.feature] < node.threshold ? node.left : node.right);
    }
    throw std::runtime_error("tree: malformed structure (routing did not terminate)");
}

int RegressionTree::leaf_count() const {
    int count = 0;
    for (const TreeNode& node : nodes) count += node.is_leaf() ? 1 : 0;
    return count;
}

double RegressionTree::weight_sq_sum() const {
    double sum = 0.0;
    for (const TreeNode& node : nodes) {
        if (node.is_leaf()) sum += node.value * node.value;
    }
    return sum;
}

double BoosterModel::predict(const FeatureVector& x) const {
    for (double v : x) {
        if (!std::isfinite(v)) throw std::domain_error("predict: non-finite feature");
    }
    double out = base_score;
    for (const RegressionTree& tree : trees) out += config.learning_rate * tree.predict(x);
    return out;
}

void squared_loss_grad_hess(double pred, double target, double& grad, double& hess) {
    grad = 2.0 * (pred - target);
    hess = 2.0;
}

double leaf_weight(double grad_sum, double hess_sum, double lambda_reg) {
    return -grad_sum / (hess_sum + lambda_reg);
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda_reg,
                  double gamma_reg) {
    const double g_total = g_left + g_right;
    const double h_total = h_left + h_right;
    return 0.5 * (g_left * g_left / (h_left + lambda_reg) +
                  g_right * g_right / (h_right + lambda_reg) -
                  g_total * g_total / (h_total + lambda_reg)) -
           gamma_reg;
}

namespace {

constexpr std::size_t kFeatures = std::tuple_size_v<FeatureVector>;

}  // namespace

SplitChoice find_best_split(const std::vector<FeatureVector>& X, const std::vector<double>& grad,
                            const std::vector<double>& hess, const std::vector<std::size_t>& rows,
                            const TrainConfig& cfg) {
    SplitChoice best;
    if (rows.size() < 2) return best;

    double g_total = 0.0, h_total = 0.0;
    for (std::size_t row : rows) {
        g_total += grad[row];
        h_total += hess[row];
    }

    std::vector<std::pair<double, std::size_t>> column(rows.size());
    for (int f = 0; f < static_cast<int>(X[0].size()); ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            column[i] = {X[rows[i]][f], rows[i]};
        }
        std::sort(column.begin(), column.end());

        double g_left = 0.0, h_left = 0.0;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            g_left += grad[column[i].second];
            h_left += hess[column[i].second];
            if (!(column[i].first < column[i + 1].first)) continue;

            const double h_right = h_total - h_left;
            if (h_left < cfg.min_child_weight || h_right < cfg.min_child_weight) continue;
            const double gain = split_gain(g_left, h_left, g_total - g_left, h_right,
                                           cfg.lambda_reg, cfg.gamma_reg);
            // Strict > under ascending (feature, threshold) order realizes the
            // lowest-feature, lowest-threshold tie rule.
            if (gain > 0.0 && gain > best.gain) {
                best.found = true;
                best.feature = f;
                best.threshold = std::midpoint(column[i].first, column[i + 1].first);
                best.gain = gain;
            }
        }
    }
    return best;
}

namespace {

// Shared level-wise growth engine. `in_tree` marks the rows this tree trains
// on; `columns[f]` lists all candidate rows sorted by (feature value, row).
struct LevelState {
    double g_left = 0.0;
    double h_left = 0.0;
    double prev_value = 0.0;
    std::size_t seen = 0;
    double best_gain = 0.0;
    bool best_found = false;
    int best_feature = -1;
    double best_threshold = 0.0;
};

RegressionTree grow_presorted(const std::vector<FeatureVector>& X, const std::vector<double>& grad,
                              const std::vector<double>& hess,
                              const std::vector<std::vector<std::pair<double, std::size_t>>>& columns,
                              const std::vector<std::uint8_t>& in_tree, std::size_t tree_rows,
                              const TrainConfig& cfg, std::vector<std::int32_t>& position) {
    RegressionTree tree;
    if (tree_rows == 0) {
        tree.nodes.push_back(TreeNode{});
        return tree;
    }

    double g_root = 0.0, h_root = 0.0;
    for (std::size_t row = 0; row < X.size(); ++row) {
        position[row] = in_tree[row] ? 0 : -1;
        if (in_tree[row]) {
            g_root += grad[row];
            h_root += hess[row];
        }
    }

    tree.nodes.push_back(TreeNode{});
    std::vector<std::int32_t> active = {0};         // node ids at the current level
    std::vector<double> node_g = {g_root};          // per-slot totals
    std::vector<double> node_h = {h_root};
    std::vector<std::int32_t> node_slot(1, 0);      // node id -> slot, -1 if inactive

    std::vector<LevelState> state;
    for (int depth = 0; depth < cfg.max_depth && !active.empty(); ++depth) {
        state.assign(active.size(), LevelState{});

        for (std::size_t f = 0; f < kFeatures; ++f) {
            for (auto& s : state) {
                s.g_left = 0.0;
                s.h_left = 0.0;
                s.seen = 0;
            }
            for (const auto& [value, row] : columns[f]) {
                const std::int32_t node = position[row];
                if (node < 0) continue;
                const std::int32_t slot = node_slot[node];
                if (slot < 0) continue;
                LevelState& s = state[slot];
                if (s.seen > 0 && s.prev_value < value) {
                    const double h_right = node_h[slot] - s.h_left;
                    if (s.h_left >= cfg.min_child_weight && h_right >= cfg.min_child_weight) {
                        const double gain =
                            split_gain(s.g_left, s.h_left, node_g[slot] - s.g_left, h_right,
                                       cfg.lambda_reg, cfg.gamma_reg);
                        if (gain > 0.0 && (!s.best_found || gain > s.best_gain)) {
                            s.best_found = true;
                            s.best_gain = gain;
                            s.best_feature = static_cast<int>(f);
                            s.best_threshold = std::midpoint(s.prev_value, value);
                        }
                    }
                }
                s.g_left += grad[row];
                s.h_left += hess[row];
                s.prev_value = value;
                ++s.seen;
            }
        }

        // Materialize the chosen splits; unsplit actives become final leaves.
        std::vector<std::int32_t> next_active;
        std::vector<double> next_g, next_h;
        for (std::size_t slot = 0; slot < active.size(); ++slot) {
            const std::int32_t node_id = active[slot];
            TreeNode& node = tree.nodes[node_id];
            const LevelState& s = state[slot];
            if (!s.best_found) {
                node.feature = -1;
                node.value = leaf_weight(node_g[slot], node_h[slot], cfg.lambda_reg);
                continue;
            }
            node.feature = s.best_feature;
            node.threshold = s.best_threshold;
            node.left = static_cast<int>(tree.nodes.size());
            node.right = node.left + 1;
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});
            next_active.push_back(node.left);
            next_active.push_back(node.right);
            next_g.insert(next_g.end(), {0.0, 0.0});
            next_h.insert(next_h.end(), {0.0, 0.0});
        }

        node_slot.assign(tree.nodes.size(), -1);
        for (std::size_t slot = 0; slot < next_active.size(); ++slot) {
            node_slot[next_active[slot]] = static_cast<std::int32_t>(slot);
        }

        // Route rows to children in ascending row order so child sums are
        // reproducible.
        for (std::size_t row = 0; row < X.size(); ++row) {
            const std::int32_t node_id = position[row];
            if (node_id < 0) continue;
            const TreeNode& node = tree.nodes[node_id];
            if (node.is_leaf()) {
                position[row] = -1;
                continue;
            }
            const std::int32_t child =
                X[row][node.feature] < node.threshold ? node.left : node.right;
            position[row] = child;
            const std::int32_t slot = node_slot[child];
            next_g[static_cast<std::size_t>(slot)] += grad[row];
            next_h[static_cast<std::size_t>(slot)] += hess[row];
        }

        active = std::move(next_active);
        node_g = std::move(next_g);
        node_h = std::move(next_h);
    }

    // Depth cap reached: finalize whatever is still active.
    for (std::size_t slot = 0; slot < active.size(); ++slot) {
        TreeNode& node = tree.nodes[active[slot]];
        node.feature = -1;
        node.value = leaf_weight(node_g[slot], node_h[slot], cfg.lambda_reg);
    }
    return tree;
}

std::vector<std::vector<std::pair<double, std::size_t>>> presort_columns(
    const std::vector<FeatureVector>& X) {
    std::vector<std::vector<std::pair<double, std::size_t>>> columns(kFeatures);
    for (std::size_t f = 0; f < kFeatures; ++f) {
        auto& column = columns[f];
        column.resize(X.size());
        for (std::size_t row = 0; row < X.size(); ++row) column[row] = {X[row][f], row};
        std::sort(column.begin(), column.end());
    }
    return columns;
}

}  // namespace

RegressionTree grow_tree(const std::vector<FeatureVector>& X, const std::vector<double>& grad,
                         const std::vector<double>& hess, const std::vector<std::size_t>& rows,
                         const TrainConfig& cfg) {
    validate(cfg);
    if (X.size() != grad.size() || X.size() != hess.size())
        throw std::invalid_argument("grow_tree: size mismatch");

    std::vector<std::uint8_t> in_tree(X.size(), 0);
    for (std::size_t row : rows) {
        if (row >= X.size()) throw std::invalid_argument("grow_tree: row index out of range");
        in_tree[row] = 1;
    }
    const auto columns = presort_columns(X);
    std::vector<std::int32_t> position(X.size(), -1);
    return grow_presorted(X, grad, hess, columns, in_tree, rows.size(), cfg, position);
}

BoosterModel fit_booster(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                         const TrainConfig& cfg) {
    validate(cfg);
    if (X.empty()) throw std::invalid_argument("fit: empty training set");
    if (X.size() != y.size()) throw std::invalid_argument("fit: feature/target size mismatch");
    for (const FeatureVector& x : X) {
        for (double v : x) {
            if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite feature");
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite target");
    }

    BoosterModel model;
    model.config = cfg;
    double mean = 0.0;
    for (double v : y) mean += v;
    model.base_score = mean / static_cast<double>(y.size());

    const auto columns = presort_columns(X);
    std::vector<double> preds(y.size(), model.base_score);
    std::vector<double> grad(y.size()), hess(y.size());
    std::vector<std::uint8_t> in_tree(y.size(), 1);
    std::vector<std::int32_t> position(y.size(), -1);

    model.trees.reserve(static_cast<std::size_t>(cfg.k_trees));
    for (int round = 0; round < cfg.k_trees; ++round) {
        for (std::size_t row = 0; row < y.size(); ++row) {
            squared_loss_grad_hess(preds[row], y[row], grad[row], hess[row]);
        }

        std::size_t tree_rows = y.size();
        if (cfg.subsample < 1.0) {
            auto eng = rng::make_engine(cfg.seed, static_cast<std::uint64_t>(round), 0xb00);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            tree_rows = 0;
            for (std::size_t row = 0; row < y.size(); ++row) {
                in_tree[row] = unit(eng) < cfg.subsample ? 1 : 0;
                tree_rows += in_tree[row];
            }
            if (tree_rows == 0) {  // degenerate draw: fall back to the full set
                std::fill(in_tree.begin(), in_tree.end(), std::uint8_t{1});
                tree_rows = y.size();
            }
        }

        model.trees.push_back(
            grow_presorted(X, grad, hess, columns, in_tree, tree_rows, cfg, position));
        const RegressionTree& tree = model.trees.back();
        for (std::size_t row = 0; row < y.size(); ++row) {
            preds[row] += cfg.learning_rate * tree.predict(X[row]);
        }
    }
    return model;
}

std::vector<double> predict_batch(const BoosterModel& model, const std::vector<FeatureVector>& X) {
    std::vector<double> out(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = model.predict(X[i]);
    return out;
}

double objective_value(const BoosterModel& model, const std::vector<FeatureVector>& X,
                       const std::vector<double>& y) {
    if (X.size() != y.size()) throw std::invalid_argument("objective: size mismatch");
    double sse = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double err = model.predict(X[i]) - y[i];
        sse += err * err;
    }
    double penalty = 0.0;
    for (const RegressionTree& tree : model.trees) {
        penalty += model.config.gamma_reg * tree.leaf_count() +
                   0.5 * model.config.lambda_reg * tree.weight_sq_sum();
    }
    return sse + penalty;
}

void save_model(const BoosterModel& model, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["base_score"] = model.base_score;
    j["learning_rate"] = model.config.learning_rate;
    nlohmann::json trees = nlohmann::json::array();
    for (const RegressionTree& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) {
                nodes.push_back({{"leaf_weight", node.value}});
            } else {
                nodes.push_back({{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"left", node.left},
                                 {"right", node.right}});
            }
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    io::write_file(path, j.dump() + "\n");
}

BoosterModel load_model(const std::string& path) {
    const nlohmann::json j = nlohmann::json::parse(io::read_file(path));
    codec::check_keys(j, {"schema_version", "base_score", "learning_rate", "trees"}, "model");
    if (codec::jint(j, "schema_version", 0, "model") != 1)
        throw std::runtime_error("model: unsupported schema version");

    BoosterModel model;
    model.base_score = codec::jnum(j, "base_score", 0.0, "model");
    model.config.learning_rate =
        codec::jnum(j, "learning_rate", model.config.learning_rate, "model");
    if (!(model.config.learning_rate > 0.0) || model.config.learning_rate > 1.0)
        throw std::runtime_error("model: learning_rate out of range");
    for (const auto& jt : j.at("trees")) {
        codec::check_keys(jt, {"nodes"}, "model tree");
        RegressionTree tree;
        const auto& jn = jt.at("nodes");
        for (const auto& entry : jn) {
            if (!entry.is_object()) throw std::runtime_error("model: malformed node record");
            TreeNode node;
            if (entry.contains("leaf_weight")) {
                if (entry.size() != 1)
                    throw std::runtime_error("model: malformed node record");
                node.value = codec::jnum(entry, "leaf_weight", 0.0, "model node");
            } else {
                if (entry.size() != 4)
                    throw std::runtime_error("model: malformed node record");
                codec::check_keys(entry, {"feature", "threshold", "left", "right"}, "model node");
                node.feature = static_cast<int>(codec::jint(entry, "feature", -1, "model node"));
                node.threshold = codec::jnum(entry, "threshold", 0.0, "model node");
                node.left = static_cast<int>(codec::jint(entry, "left", -1, "model node"));
                node.right = static_cast<int>(codec::jint(entry, "right", -1, "model node"));
                const int size = static_cast<int>(jn.size());
                const int self = static_cast<int>(tree.nodes.size());
                if (node.feature < 0 || node.feature >= static_cast<int>(kFeatures))
                    throw std::runtime_error("model: feature index out of range");
                if (node.left <= self || node.right <= self || node.left >= size ||
                    node.right >= size)
                    throw std::runtime_error("model: child index out of range");
            }
            tree.nodes.push_back(node);
        }
        if (tree.nodes.empty()) throw std::runtime_error("model: empty tree");
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace amcw

#include "amcw/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "amcw/io_util.hpp"

namespace amcw {

ErrorStats error_stats(const std::vector<double>& pred_m, const std::vector<double>& truth_m) {
    if (pred_m.size() != truth_m.size()) throw std::invalid_argument("stats: size mismatch");
    if (pred_m.empty()) throw std::invalid_argument("stats: empty input");

    ErrorStats stats;
    stats.n = pred_m.size();
    double abs_sum = 0.0, sq_sum = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < pred_m.size(); ++i) {
        const double err_mm = (pred_m[i] - truth_m[i]) * 1000.0;
        abs_sum += std::abs(err_mm);
        sq_sum += err_mm * err_mm;
        sum += err_mm;
        stats.max_abs_mm = std::max(stats.max_abs_mm, std::abs(err_mm));
    }
    const double n = static_cast<double>(stats.n);
    stats.mae_mm = abs_sum / n;
    stats.rmse_mm = std::sqrt(sq_sum / n);
    stats.bias_mm = sum / n;
    return stats;
}

Histogram histogram(const std::vector<double>& values, int bins) {
    if (values.empty()) throw std::invalid_argument("histogram: empty input");
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    Histogram h;
    h.lo = *lo_it;
    h.bin_width = (*hi_it - *lo_it) / bins;
    if (h.bin_width == 0.0) h.bin_width = 1.0;  // all values equal: single occupied bin
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - h.lo) / h.bin_width);
        if (idx >= h.counts.size()) idx = h.counts.size() - 1;
        ++h.counts[idx];
    }
    return h;
}

KnnModel knn_fit(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                 const KnnConfig& cfg) {
    if (X.empty()) throw std::invalid_argument("knn: empty training set");
    if (X.size() != y.size()) throw std::invalid_argument("knn: feature/target size mismatch");
    if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) > X.size())
        throw std::invalid_argument("knn: k out of range");

    KnnModel model;
    model.k = cfg.k;
    model.targets_m = y;

    const double n = static_cast<double>(X.size());
    for (std::size_t f = 0; f < model.mean.size(); ++f) {
        double mean = 0.0;
        for (const FeatureVector& x : X) mean += x[f];
        mean /= n;
        double var = 0.0;
        for (const FeatureVector& x : X) var += (x[f] - mean) * (x[f] - mean);
        var /= n;
        model.mean[f] = mean;
        model.scale[f] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    model.points.resize(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t f = 0; f < model.mean.size(); ++f) {
            model.points[i][f] = (X[i][f] - model.mean[f]) / model.scale[f];
        }
    }
    return model;
}

double knn_predict(const KnnModel& model, const FeatureVector& x) {
    FeatureVector q;
    for (std::size_t f = 0; f < q.size(); ++f) q[f] = (x[f] - model.mean[f]) / model.scale[f];

    // (distance^2, index) pairs ordered lexicographically; the index component
    // makes the order total, so equal distances resolve to the lower index.
    std::vector<std::pair<double, std::size_t>> dist(model.points.size());
    for (std::size_t i = 0; i < model.points.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t f = 0; f < q.size(); ++f) {
            const double diff = model.points[i][f] - q[f];
            d2 += diff * diff;
        }
        dist[i] = {d2, i};
    }
    const auto k = static_cast<std::size_t>(model.k);
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += model.targets_m[dist[i].second];
    return sum / static_cast<double>(k);
}

std::vector<double> knn_predict_batch(const KnnModel& model,
                                      const std::vector<FeatureVector>& X) {
    std::vector<double> out(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) out[i] = knn_predict(model, X[i]);
    return out;
}

namespace {

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

std::string comparison_csv(const std::vector<ModelReport>& reports) {
    std::string text = "model,rmse_train_mm,rmse_test_mm,mae_train_mm,mae_test_mm,train_time_s\n";
    for (const ModelReport& r : reports) {
        text += r.name;
        text += ',';
        text += io::fmt_double(r.train.rmse_mm);
        text += ',';
        text += io::fmt_double(r.test.rmse_mm);
        text += ',';
        text += io::fmt_double(r.train.mae_mm);
        text += ',';
        text += io::fmt_double(r.test.mae_mm);
        text += ',';
        text += io::fmt_double(r.train_time_s);
        text += '\n';
    }
    return text;
}

std::string comparison_text(const std::vector<ModelReport>& reports) {
    std::string text = "model           train MAE  train RMSE   test MAE  test RMSE   fit time\n";
    for (const ModelReport& r : reports) {
        char line[160];
        std::snprintf(line, sizeof line, "%-14s %8s mm %8s mm %8s mm %8s mm %8s s\n",
                      r.name.c_str(), fmt_fixed(r.train.mae_mm, 3).c_str(),
                      fmt_fixed(r.train.rmse_mm, 3).c_str(), fmt_fixed(r.test.mae_mm, 3).c_str(),
                      fmt_fixed(r.test.rmse_mm, 3).c_str(), fmt_fixed(r.train_time_s, 2).c_str());
        text += line;
    }
    return text;
}

}  // namespace amcw

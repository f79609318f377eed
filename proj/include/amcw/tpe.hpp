#pragma once

// Sequential model-based hyperparameter search using a tree-structured
// Parzen estimator: completed trials are split into a good and a bad set by
// loss quantile, both sets are modelled with truncated Gaussian mixtures, and
// candidates drawn from the good mixture are ranked by density ratio.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace amcw {

enum class ParamKind { uniform, log_uniform, int_uniform };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::uniform;
    double lo = 0.0;
    double hi = 1.0;
};

using ParamSet = std::map<std::string, double>;
using SearchSpace = std::vector<ParamSpec>;

/// Throws std::invalid_argument on empty names, duplicate names, inverted or
/// degenerate bounds, or non-positive log-uniform bounds.
void validate(const SearchSpace& space);

struct Trial {
    int iteration = 0;
    ParamSet params;
    double loss = 0.0;
    bool ok = false;  // false when the objective threw
};

struct TpeConfig {
    int mu_th = 30;               // trial budget
    int n_startup = 10;           // prior-only draws before the model kicks in
    double gamma_quantile = 0.25; // fraction of finished trials deemed good
    int n_candidates = 24;        // candidates scored per suggestion
    std::uint64_t seed = 1;
};

void validate(const TpeConfig& cfg);

/// One-dimensional Parzen density over `spec` built from the given
/// observations plus a midpoint prior pseudo-point. Each kernel is a Gaussian
/// truncated to the (possibly log-transformed) domain and renormalized; the
/// returned density is with respect to the raw parameter value.
double parzen_pdf(const ParamSpec& spec, const std::vector<double>& obs, double x);

/// Draws one sample from the Parzen mixture over `spec`.
double parzen_sample(const ParamSpec& spec, const std::vector<double>& obs,
                     std::mt19937_64& eng);

/// Proposes the next parameter set given the history. Startup iterations draw
/// from the prior; afterwards candidates sampled from the good-set density are
/// ranked by log-density ratio against the bad set.
ParamSet suggest(const SearchSpace& space, const std::vector<Trial>& history,
                 const TpeConfig& cfg, std::mt19937_64& eng);

using Objective = std::function<double(const ParamSet&)>;

struct TpeResult {
    std::vector<Trial> trials;
    ParamSet best_params;
    double best_loss = 0.0;
};

/// Runs the full sequential loop. Objective exceptions mark the trial as
/// failed and the loop continues; throws std::runtime_error when every trial
/// failed. Ties on the best loss keep the earliest trial.
TpeResult optimize(const SearchSpace& space, const Objective& objective,
                   const TpeConfig& cfg);

/// Per-trial CSV: iteration, loss, then one column per parameter in space
/// order. Failed trials carry a nan loss.
std::string trials_to_csv(const SearchSpace& space, const std::vector<Trial>& trials);

}  // namespace amcw

#include "amcw/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "amcw/io_util.hpp"
#include "amcw/rng.hpp"

namespace amcw {

void validate(const SearchSpace& space) {
    if (space.empty()) throw std::invalid_argument("tpe: empty search space");
    std::set<std::string> names;
    for (const ParamSpec& spec : space) {
        if (spec.name.empty()) throw std::invalid_argument("tpe: unnamed parameter");
        if (!names.insert(spec.name).second)
            throw std::invalid_argument("tpe: duplicate parameter '" + spec.name + "'");
        if (!(spec.lo < spec.hi))
            throw std::invalid_argument("tpe: bounds must satisfy lo < hi for '" + spec.name + "'");
        if (spec.kind == ParamKind::log_uniform && !(spec.lo > 0.0))
            throw std::invalid_argument("tpe: log_uniform requires lo > 0 for '" + spec.name + "'");
    }
}

void validate(const TpeConfig& cfg) {
    if (cfg.mu_th < 1) throw std::invalid_argument("tpe: mu_th must be >= 1");
    if (cfg.n_startup < 1) throw std::invalid_argument("tpe: n_startup must be >= 1");
    if (cfg.n_startup >= cfg.mu_th)
        throw std::invalid_argument("tpe: n_startup must be < mu_th");
    if (!(cfg.gamma_quantile > 0.0 && cfg.gamma_quantile < 1.0))
        throw std::invalid_argument("tpe: gamma_quantile must be in (0, 1)");
    if (cfg.n_candidates < 1) throw std::invalid_argument("tpe: n_candidates must be >= 1");
}

namespace {

bool is_log(const ParamSpec& spec) { return spec.kind == ParamKind::log_uniform; }

double lo_t(const ParamSpec& spec) { return is_log(spec) ? std::log(spec.lo) : spec.lo; }
double hi_t(const ParamSpec& spec) { return is_log(spec) ? std::log(spec.hi) : spec.hi; }

double emit(const ParamSpec& spec, double u) {
    double x = is_log(spec) ? std::exp(u) : u;
    x = std::clamp(x, spec.lo, spec.hi);
    if (spec.kind == ParamKind::int_uniform) x = std::round(x);
    return x;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Kernel centers and bandwidths in the transformed domain; the last entry is
// the midpoint prior with full-range bandwidth.
struct Mixture {
    double lo = 0.0, hi = 0.0;
    std::vector<double> center;
    std::vector<double> bw;
};

Mixture build_mixture(const ParamSpec& spec, const std::vector<double>& obs) {
    Mixture mix;
    mix.lo = lo_t(spec);
    mix.hi = hi_t(spec);
    const double range = mix.hi - mix.lo;

    mix.center.reserve(obs.size() + 1);
    for (double v : obs) mix.center.push_back(is_log(spec) ? std::log(v) : v);
    mix.center.push_back(std::midpoint(mix.lo, mix.hi));

    const std::size_t n = mix.center.size();
    const double floor_bw = range / std::sqrt(static_cast<double>(n));
    mix.bw.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double nn = range;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) nn = std::min(nn, std::abs(mix.center[i] - mix.center[j]));
        }
        mix.bw[i] = std::min(std::max(nn, floor_bw), range);
    }
    mix.bw[n - 1] = range;
    return mix;
}

double mixture_pdf(const Mixture& mix, double u) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double density = 0.0;
    for (std::size_t i = 0; i < mix.center.size(); ++i) {
        const double b = mix.bw[i];
        const double mass = normal_cdf((mix.hi - mix.center[i]) / b) -
                            normal_cdf((mix.lo - mix.center[i]) / b);
        const double z = (u - mix.center[i]) / b;
        density += std::exp(-0.5 * z * z) * inv_sqrt_2pi / (b * mass);
    }
    return density / static_cast<double>(mix.center.size());
}

}  // namespace

double parzen_pdf(const ParamSpec& spec, const std::vector<double>& obs, double x) {
    if (!(x >= spec.lo && x <= spec.hi)) throw std::domain_error("tpe: pdf query out of bounds");
    const Mixture mix = build_mixture(spec, obs);
    const double u = is_log(spec) ? std::log(x) : x;
    const double jacobian = is_log(spec) ? 1.0 / x : 1.0;
    return mixture_pdf(mix, u) * jacobian;
}

double parzen_sample(const ParamSpec& spec, const std::vector<double>& obs,
                     std::mt19937_64& eng) {
    const Mixture mix = build_mixture(spec, obs);
    const std::size_t k = rng::bounded(eng, mix.center.size());
    std::normal_distribution<double> kernel(mix.center[k], mix.bw[k]);
    for (int attempt = 0; attempt < 200; ++attempt) {
        const double u = kernel(eng);
        if (u >= mix.lo && u <= mix.hi) return emit(spec, u);
    }
    return emit(spec, std::clamp(mix.center[k], mix.lo, mix.hi));
}

namespace {

ParamSet prior_draw(const SearchSpace& space, std::mt19937_64& eng) {
    ParamSet params;
    for (const ParamSpec& spec : space) {
        std::uniform_real_distribution<double> unit(lo_t(spec), hi_t(spec));
        params[spec.name] = emit(spec, unit(eng));
    }
    return params;
}

}  // namespace

ParamSet suggest(const SearchSpace& space, const std::vector<Trial>& history,
                 const TpeConfig& cfg, std::mt19937_64& eng) {
    validate(space);
    validate(cfg);

    if (history.size() < static_cast<std::size_t>(cfg.n_startup)) return prior_draw(space, eng);

    std::vector<const Trial*> finished;
    for (const Trial& t : history) {
        if (t.ok) finished.push_back(&t);
    }
    if (finished.empty()) return prior_draw(space, eng);

    std::sort(finished.begin(), finished.end(), [](const Trial* a, const Trial* b) {
        if (a->loss != b->loss) return a->loss < b->loss;
        return a->iteration < b->iteration;
    });
    const std::size_t n_good = std::max<std::size_t>(
        1, static_cast<std::size_t>(cfg.gamma_quantile * static_cast<double>(finished.size())));

    std::vector<std::vector<double>> good_obs(space.size()), bad_obs(space.size());
    for (std::size_t i = 0; i < finished.size(); ++i) {
        auto& dest = i < n_good ? good_obs : bad_obs;
        for (std::size_t p = 0; p < space.size(); ++p) {
            dest[p].push_back(finished[i]->params.at(space[p].name));
        }
    }

    ParamSet best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cfg.n_candidates; ++c) {
        ParamSet candidate;
        double score = 0.0;
        for (std::size_t p = 0; p < space.size(); ++p) {
            const double value = parzen_sample(space[p], good_obs[p], eng);
            candidate[space[p].name] = value;
            score += std::log(parzen_pdf(space[p], good_obs[p], value)) -
                     std::log(parzen_pdf(space[p], bad_obs[p], value));
        }
        if (score > best_score) {
            best_score = score;
            best = std::move(candidate);
        }
    }
    return best;
}

TpeResult optimize(const SearchSpace& space, const Objective& objective, const TpeConfig& cfg) {
    validate(space);
    validate(cfg);

    TpeResult result;
    auto eng = rng::make_engine(cfg.seed, 0x79e);
    for (int t = 0; t < cfg.mu_th; ++t) {
        Trial trial;
        trial.iteration = t;
        trial.params = suggest(space, result.trials, cfg, eng);
        trial.loss = std::numeric_limits<double>::quiet_NaN();
        try {
            trial.loss = objective(trial.params);
            trial.ok = std::isfinite(trial.loss);
        } catch (const std::exception&) {
            trial.ok = false;
        }
        result.trials.push_back(std::move(trial));
    }

    const Trial* best = nullptr;
    for (const Trial& t : result.trials) {
        if (t.ok && (best == nullptr || t.loss < best->loss)) best = &t;
    }
    if (best == nullptr) throw std::runtime_error("tpe: every trial failed");
    result.best_params = best->params;
    result.best_loss = best->loss;
    return result;
}

std::string trials_to_csv(const SearchSpace& space, const std::vector<Trial>& trials) {
    std::string text = "iteration,loss";
    for (const ParamSpec& spec : space) {
        text += ',';
        text += spec.name;
    }
    text += '\n';
    for (const Trial& t : trials) {
        text += std::to_string(t.iteration);
        text += ',';
        text += io::fmt_double(t.loss);
        for (const ParamSpec& spec : space) {
            text += ',';
            text += io::fmt_double(t.params.at(spec.name));
        }
        text += '\n';
    }
    return text;
}

}  // namespace amcw

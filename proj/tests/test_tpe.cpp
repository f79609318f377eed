#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "amcw/rng.hpp"
#include "amcw/tpe.hpp"
#include "amcw/tuning.hpp"

using namespace amcw;

namespace {

bool near_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Simpson integration of the Parzen density over the raw domain.
double integrate_pdf(const ParamSpec& spec, const std::vector<double>& obs, int panels) {
    const double h = (spec.hi - spec.lo) / static_cast<double>(panels);
    double sum = parzen_pdf(spec, obs, spec.lo) + parzen_pdf(spec, obs, spec.hi);
    for (int i = 1; i < panels; ++i) {
        const double x = spec.lo + h * static_cast<double>(i);
        sum += parzen_pdf(spec, obs, x) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

Trial make_trial(int iteration, const std::string& name, double value, double loss, bool ok) {
    Trial t;
    t.iteration = iteration;
    t.params[name] = value;
    t.loss = loss;
    t.ok = ok;
    return t;
}

}  // namespace

TEST_CASE("search space validation") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0}};
    CHECK_NOTHROW(validate(space));
    CHECK_THROWS_AS(validate(SearchSpace{}), std::invalid_argument);
    space = {{"", ParamKind::uniform, 0.0, 1.0}};
    CHECK_THROWS_AS(validate(space), std::invalid_argument);
    space = {{"x", ParamKind::uniform, 0.0, 1.0}, {"x", ParamKind::uniform, 0.0, 2.0}};
    CHECK_THROWS_AS(validate(space), std::invalid_argument);
    space = {{"x", ParamKind::uniform, 1.0, 1.0}};
    CHECK_THROWS_AS(validate(space), std::invalid_argument);
    space = {{"x", ParamKind::log_uniform, 0.0, 1.0}};
    CHECK_THROWS_AS(validate(space), std::invalid_argument);
    space = {{"x", ParamKind::log_uniform, 1e-8, 1.0}};
    CHECK_NOTHROW(validate(space));
}

TEST_CASE("tpe config validation") {
    TpeConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.mu_th = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = TpeConfig{};
    cfg.n_startup = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = TpeConfig{};
    cfg.n_startup = cfg.mu_th;  // startup must stay below the budget
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = TpeConfig{};
    cfg.gamma_quantile = 1.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = TpeConfig{};
    cfg.n_candidates = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("parzen density integrates to one") {
    ParamSpec uni{"x", ParamKind::uniform, -1.0, 3.0};
    CHECK(near_abs(integrate_pdf(uni, {}, 2000), 1.0, 1e-3));
    CHECK(near_abs(integrate_pdf(uni, {0.2, 0.25, 2.8}, 2000), 1.0, 1e-3));

    ParamSpec logp{"lr", ParamKind::log_uniform, 1e-3, 10.0};
    CHECK(near_abs(integrate_pdf(logp, {}, 20000), 1.0, 1e-3));
    CHECK(near_abs(integrate_pdf(logp, {0.01, 0.02, 5.0}, 20000), 1.0, 1e-3));

    ParamSpec ints{"k", ParamKind::int_uniform, 1.0, 64.0};
    CHECK(near_abs(integrate_pdf(ints, {10.0, 11.0, 60.0}, 2000), 1.0, 1e-3));
}

TEST_CASE("parzen density peaks near the observations") {
    ParamSpec spec{"x", ParamKind::uniform, 0.0, 1.0};
    const std::vector<double> obs = {0.28, 0.3, 0.32};
    CHECK(parzen_pdf(spec, obs, 0.3) > parzen_pdf(spec, obs, 0.9));
    // Out-of-domain queries are refused.
    CHECK_THROWS_AS(parzen_pdf(spec, obs, -0.01), std::domain_error);
    CHECK_THROWS_AS(parzen_pdf(spec, obs, 1.01), std::domain_error);
}

TEST_CASE("parzen samples respect bounds, kinds, and seeding") {
    std::mt19937_64 eng = rng::make_engine(7, 0x5a);
    ParamSpec logp{"lr", ParamKind::log_uniform, 1e-3, 10.0};
    const std::vector<double> obs = {0.05, 0.1};
    for (int i = 0; i < 2000; ++i) {
        const double v = parzen_sample(logp, obs, eng);
        CHECK(v >= 1e-3);
        CHECK(v <= 10.0);
    }
    ParamSpec ints{"k", ParamKind::int_uniform, 3.0, 12.0};
    for (int i = 0; i < 2000; ++i) {
        const double v = parzen_sample(ints, {5.0, 9.0}, eng);
        CHECK(v == std::round(v));
        CHECK(v >= 3.0);
        CHECK(v <= 12.0);
    }

    std::mt19937_64 a = rng::make_engine(9, 1);
    std::mt19937_64 b = rng::make_engine(9, 1);
    for (int i = 0; i < 100; ++i) {
        CHECK(parzen_sample(logp, obs, a) == parzen_sample(logp, obs, b));
    }
}

TEST_CASE("startup suggestions come from the prior and stay in bounds") {
    SearchSpace space = {{"x", ParamKind::uniform, -2.0, -1.0},
                         {"k", ParamKind::int_uniform, 10.0, 20.0},
                         {"lr", ParamKind::log_uniform, 1e-4, 1e-1}};
    TpeConfig cfg;
    cfg.n_startup = 5;
    std::mt19937_64 eng = rng::make_engine(3, 0x700);
    for (int i = 0; i < 200; ++i) {
        const ParamSet p = suggest(space, {}, cfg, eng);
        REQUIRE(p.size() == 3);
        CHECK(p.at("x") >= -2.0);
        CHECK(p.at("x") <= -1.0);
        CHECK(p.at("k") == std::round(p.at("k")));
        CHECK(p.at("k") >= 10.0);
        CHECK(p.at("k") <= 20.0);
        CHECK(p.at("lr") >= 1e-4);
        CHECK(p.at("lr") <= 1e-1);
    }
}

TEST_CASE("model-phase suggestions concentrate near the good region") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0}};
    std::vector<Trial> history;
    for (int i = 0; i < 30; ++i) {
        const double x = static_cast<double>(i) / 29.0;
        history.push_back(make_trial(i, "x", x, (x - 0.3) * (x - 0.3), true));
    }
    TpeConfig cfg;
    cfg.n_startup = 10;
    int inside = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 eng = rng::make_engine(static_cast<std::uint64_t>(seed), 0x5e);
        const double x = suggest(space, history, cfg, eng).at("x");
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        if (x >= 0.1 && x <= 0.5) ++inside;
    }
    CHECK(inside >= 90);
}

TEST_CASE("suggest falls back to the prior when every trial failed") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0}};
    std::vector<Trial> history;
    for (int i = 0; i < 15; ++i) {
        history.push_back(make_trial(i, "x", 0.5, std::nan(""), false));
    }
    TpeConfig cfg;
    cfg.n_startup = 10;
    std::mt19937_64 eng = rng::make_engine(4, 2);
    const ParamSet p = suggest(space, history, cfg, eng);
    CHECK(p.at("x") >= 0.0);
    CHECK(p.at("x") <= 1.0);
}

TEST_CASE("optimize finds the quadratic minimum and beats random search") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0}};
    TpeConfig cfg;
    cfg.mu_th = 30;
    cfg.n_startup = 10;
    int hits = 0;
    std::vector<double> tpe_best, rnd_best;
    for (int seed = 1; seed <= 10; ++seed) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        const TpeResult res = optimize(
            space, [](const ParamSet& p) { return (p.at("x") - 0.3) * (p.at("x") - 0.3); }, cfg);
        REQUIRE(res.trials.size() == 30);
        CHECK(res.best_loss <= res.trials.front().loss);
        if (res.best_loss <= 0.01) ++hits;
        tpe_best.push_back(res.best_loss);

        // Random search with the same budget.
        std::mt19937_64 eng = rng::make_engine(static_cast<std::uint64_t>(seed), 0xbad);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 30; ++i) {
            const double x = unit(eng);
            best = std::min(best, (x - 0.3) * (x - 0.3));
        }
        rnd_best.push_back(best);
    }
    CHECK(hits >= 8);
    std::sort(tpe_best.begin(), tpe_best.end());
    std::sort(rnd_best.begin(), rnd_best.end());
    const double tpe_median = std::midpoint(tpe_best[4], tpe_best[5]);
    const double rnd_median = std::midpoint(rnd_best[4], rnd_best[5]);
    CHECK(tpe_median <= rnd_median);
}

TEST_CASE("optimize is deterministic in the config seed") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0},
                         {"k", ParamKind::int_uniform, 1.0, 8.0}};
    TpeConfig cfg;
    cfg.mu_th = 12;
    cfg.n_startup = 4;
    cfg.seed = 77;
    auto objective = [](const ParamSet& p) {
        return (p.at("x") - 0.4) * (p.at("x") - 0.4) + 0.01 * p.at("k");
    };
    const TpeResult a = optimize(space, objective, cfg);
    const TpeResult b = optimize(space, objective, cfg);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].params == b.trials[i].params);
        CHECK(a.trials[i].loss == b.trials[i].loss);
    }
    cfg.seed = 78;
    const TpeResult c = optimize(space, objective, cfg);
    bool differs = false;
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        if (a.trials[i].params != c.trials[i].params) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("objective failures are recorded and skipped") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0}};
    TpeConfig cfg;
    cfg.mu_th = 20;
    cfg.n_startup = 6;
    cfg.seed = 5;
    int thrown = 0;
    const TpeResult res = optimize(
        space,
        [&](const ParamSet& p) {
            if (p.at("x") > 0.6) {
                ++thrown;
                throw std::runtime_error("bad region");
            }
            return p.at("x");
        },
        cfg);
    REQUIRE(res.trials.size() == 20);
    CHECK(thrown > 0);
    int failed = 0;
    for (const Trial& t : res.trials) {
        if (!t.ok) {
            ++failed;
            CHECK(std::isnan(t.loss));
            CHECK(t.params.at("x") > 0.6);
        }
    }
    CHECK(failed == thrown);
    CHECK(res.best_loss <= 0.6);

    // Non-finite objective values count as failures too.
    const TpeResult inf_res = optimize(
        space,
        [](const ParamSet& p) {
            return p.at("x") > 0.5 ? std::numeric_limits<double>::infinity() : p.at("x");
        },
        cfg);
    for (const Trial& t : inf_res.trials) {
        if (t.ok) CHECK(t.loss <= 0.5);
    }

    CHECK_THROWS_AS(optimize(
                        space, [](const ParamSet&) -> double { throw std::runtime_error("x"); },
                        cfg),
                    std::runtime_error);
}

TEST_CASE("tie on the best loss keeps the earliest trial") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0}};
    TpeConfig cfg;
    cfg.mu_th = 8;
    cfg.n_startup = 4;
    cfg.seed = 3;
    const TpeResult res = optimize(space, [](const ParamSet&) { return 1.0; }, cfg);
    CHECK(res.best_loss == 1.0);
    CHECK(res.best_params == res.trials.front().params);
}

TEST_CASE("trials csv layout") {
    SearchSpace space = {{"x", ParamKind::uniform, 0.0, 1.0},
                         {"k", ParamKind::int_uniform, 1.0, 9.0}};
    std::vector<Trial> trials;
    Trial t0;
    t0.iteration = 0;
    t0.params = {{"x", 0.5}, {"k", 4.0}};
    t0.loss = 0.25;
    t0.ok = true;
    Trial t1;
    t1.iteration = 1;
    t1.params = {{"x", 0.125}, {"k", 9.0}};
    t1.loss = std::nan("");
    t1.ok = false;
    trials = {t0, t1};

    const std::string csv = trials_to_csv(space, trials);
    CHECK(csv == "iteration,loss,x,k\n0,0.25,0.5,4\n1,nan,0.125,9\n");
}

TEST_CASE("tune data split caps rows and keeps an 80/20 shape") {
    std::mt19937_64 eng = rng::make_engine(90, 1);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::vector<FeatureVector> X(50, FeatureVector{});
    std::vector<double> y(50);
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (int f = 0; f < 8; ++f) X[i][f] = ux(eng);
        y[i] = static_cast<double>(i);
    }

    const TuneData full = make_tune_data(X, y, 3, 0);
    CHECK(full.x_fit.size() == 40);
    CHECK(full.x_val.size() == 10);
    CHECK(full.y_fit.size() == 40);
    CHECK(full.y_val.size() == 10);

    const TuneData capped = make_tune_data(X, y, 3, 20);
    CHECK(capped.x_fit.size() == 16);
    CHECK(capped.x_val.size() == 4);

    // Same seed, same carve; different seed, different carve.
    const TuneData again = make_tune_data(X, y, 3, 20);
    CHECK(again.y_fit == capped.y_fit);
    CHECK(again.y_val == capped.y_val);
    const TuneData other = make_tune_data(X, y, 4, 20);
    CHECK(other.y_fit != capped.y_fit);

    // Every carved row is one of the originals, and no target is duplicated.
    std::vector<double> seen = capped.y_fit;
    seen.insert(seen.end(), capped.y_val.begin(), capped.y_val.end());
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    for (double v : seen) CHECK((v >= 0.0 && v < 50.0));
}

TEST_CASE("knn tuning picks a smoothing k and refits on the full set") {
    // Noisy linear target: k=1 memorizes the noise, very large k oversmooths,
    // so validation MAE favors an interior k.
    std::mt19937_64 eng = rng::make_engine(91, 2);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<FeatureVector> X(600, FeatureVector{});
    std::vector<double> y(600);
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (int f = 0; f < 8; ++f) X[i][f] = ux(eng);
        y[i] = 2.0 * X[i][0] + noise(eng);
    }

    const KnnModel model = tune_knn(X, y, 7, 25, 0);
    CHECK(model.points.size() == X.size());
    CHECK(model.k >= 1);
    CHECK(model.k <= 25);

    // The tuned k scores no worse on the inner validation split than the
    // extremes of the range.
    const TuneData data = make_tune_data(X, y, 7, 0);
    const auto val_mae = [&](int k) {
        const KnnModel m = knn_fit(data.x_fit, data.y_fit, KnnConfig{k});
        double abs_sum = 0.0;
        for (std::size_t i = 0; i < data.x_val.size(); ++i) {
            abs_sum += std::abs(knn_predict(m, data.x_val[i]) - data.y_val[i]);
        }
        return abs_sum / static_cast<double>(data.x_val.size());
    };
    CHECK(val_mae(model.k) <= val_mae(1));
    CHECK(val_mae(model.k) <= val_mae(25));

    // Deterministic in the seed.
    const KnnModel same = tune_knn(X, y, 7, 25, 0);
    CHECK(same.k == model.k);
    CHECK(same.targets_m == model.targets_m);

    CHECK_THROWS_AS(tune_knn(X, y, 7, 0, 0), std::invalid_argument);

    // Degenerate range: falls back to k=1 without invoking the search.
    const KnnModel tiny = tune_knn(X, y, 7, 1, 0);
    CHECK(tiny.k == 1);
}

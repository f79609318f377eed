#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "amcw/scene_studio.hpp"

using namespace amcw;

namespace {

constexpr double kPi = 3.141592653589793;

bool near(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol + tol * std::abs(b);
}

struct Ray {
    double x, y, z;
};

// Equal-angle pixel mapping: x grows to the right, y to the top, centre of
// the grid looks down the optical axis.
Ray pixel_ray(const CornerSceneConfig& cfg, int px, int py) {
    const double ax = ((px + 0.5) / cfg.width - 0.5) * cfg.fov_h_rad;
    const double ay = (0.5 - (py + 0.5) / cfg.height) * cfg.fov_v_rad;
    return {std::cos(ay) * std::sin(ax), std::sin(ay), std::cos(ay) * std::cos(ax)};
}

struct RefHit {
    bool right = false;
    double d_as = 0.0;
    double cos_inc = 0.0;
    double seam_dist = 0.0;  // arc distance from the hit point to the seam line
};

// Independent reference: the wall hit by the pixel ray, from the plane
// equation x*cos(h) + z*sin(h) = D*sin(h) (mirrored in x for the left wall).
RefHit ref_hit(const CornerSceneConfig& cfg, int px, int py) {
    const Ray v = pixel_ray(cfg, px, py);
    const double h = cfg.opening_rad / 2.0;
    RefHit r;
    r.right = v.x >= 0.0;
    const double vx = std::abs(v.x);
    const double denom = vx * std::cos(h) + v.z * std::sin(h);
    const double t = cfg.distance_m * std::sin(h) / denom;
    r.d_as = t;
    r.cos_inc = denom;
    r.seam_dist = std::hypot(t * vx, t * v.z - cfg.distance_m);
    return r;
}

// Stub model whose trees contribute their leaf values unscaled.
BoosterModel stub_model(double base_score) {
    BoosterModel model;
    model.base_score = base_score;
    model.config.learning_rate = 1.0;
    return model;
}

RegressionTree leaf_tree(double value) {
    RegressionTree tree;
    tree.nodes.push_back({-1, 0.0, value, -1, -1});
    return tree;
}

RegressionTree split_tree(int feature, double threshold, double below, double above) {
    RegressionTree tree;
    tree.nodes.push_back({feature, threshold, 0.0, 1, 2});
    tree.nodes.push_back({-1, 0.0, below, -1, -1});
    tree.nodes.push_back({-1, 0.0, above, -1, -1});
    return tree;
}

DepthMap hand_map() {
    DepthMap m;
    m.width = 4;
    m.height = 2;
    m.values = {1.0, -2.0, 3.0, -4.0, 5.0, 6.0, -7.0, 8.0};
    m.mask = {1, 0, 1, 1, 1, 1, 1, 1};
    return m;
}

}  // namespace

TEST_CASE("corner config validation") {
    CornerSceneConfig ok;
    CHECK_NOTHROW(validate(ok));

    auto bad = [](auto mutate) {
        CornerSceneConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    };
    bad([](auto& c) { c.distance_m = 0.0; });
    bad([](auto& c) { c.opening_rad = 0.0; });
    bad([](auto& c) { c.opening_rad = kPi; });
    bad([](auto& c) { c.reflect_left = -0.1; });
    bad([](auto& c) { c.reflect_right = 1.1; });
    bad([](auto& c) { c.width = 1; });
    bad([](auto& c) { c.height = 0; });
    bad([](auto& c) { c.fov_h_rad = 0.0; });
    bad([](auto& c) { c.fov_v_rad = kPi; });
    bad([](auto& c) { c.falloff_scale_m = 0.0; });
    bad([](auto& c) { c.gamma_r_v2 = 0.0; });
}

TEST_CASE("right-angle corner matches the closed-form geometry") {
    CornerSceneConfig cfg;
    cfg.width = 32;
    cfg.height = 24;
    cfg.reflect_left = 0.6;
    cfg.reflect_right = 0.9;
    cfg.falloff_enabled = false;
    const SceneGrid grid = trace_corner(cfg);
    REQUIRE(grid.scenes.size() == 32u * 24u);
    REQUIRE(grid.mask.size() == grid.scenes.size());

    const double sqrt2 = std::sqrt(2.0);
    for (int py = 0; py < cfg.height; ++py) {
        for (int px = 0; px < cfg.width; ++px) {
            const std::size_t i = static_cast<std::size_t>(py) * cfg.width + px;
            REQUIRE(grid.mask[i] == 1);
            const TwoPathScene& s = grid.scenes[i];
            const Ray v = pixel_ray(cfg, px, py);

            // For a 90-degree corner the hit distance collapses to
            // D / (v.z + |v.x|) and the detour is the seam distance.
            const double d_as = cfg.distance_m / (v.z + std::abs(v.x));
            const double d_ab = sqrt2 * d_as * std::abs(v.x);
            const double cos_inc = (std::abs(v.x) + v.z) / sqrt2;
            CHECK(near(s.d_as, d_as, 1e-12));
            CHECK(near(s.d_ab, d_ab, 1e-9));
            CHECK(s.gamma_r == cfg.gamma_r_v2);

            const double hit_refl = v.x >= 0.0 ? cfg.reflect_right : cfg.reflect_left;
            const double opp_refl = v.x >= 0.0 ? cfg.reflect_left : cfg.reflect_right;
            CHECK(near(s.rho_sas, hit_refl * cos_inc, 1e-12));
            CHECK(s.rho_sab == hit_refl);
            CHECK(s.rho_bas == hit_refl);
            CHECK(s.rho_aba == opp_refl);  // falloff disabled

            CHECK(s.d_as > 1.6);
            CHECK(s.d_as < 2.3);
        }
    }
}

TEST_CASE("detour falloff scales only the far-wall bounce") {
    CornerSceneConfig cfg;
    cfg.width = 16;
    cfg.height = 8;
    CornerSceneConfig flat = cfg;
    flat.falloff_enabled = false;
    const SceneGrid on = trace_corner(cfg);
    const SceneGrid off = trace_corner(flat);

    for (std::size_t i = 0; i < on.scenes.size(); ++i) {
        const double ratio = 1.0 + off.scenes[i].d_ab / cfg.falloff_scale_m;
        CHECK(near(on.scenes[i].rho_aba, off.scenes[i].rho_aba / (ratio * ratio), 1e-12));
        CHECK(on.scenes[i].rho_sas == off.scenes[i].rho_sas);
        CHECK(on.scenes[i].rho_sab == off.scenes[i].rho_sab);
        CHECK(on.scenes[i].rho_bas == off.scenes[i].rho_bas);
        CHECK(on.scenes[i].d_as == off.scenes[i].d_as);
        CHECK(on.scenes[i].d_ab == off.scenes[i].d_ab);
    }
}

TEST_CASE("acute and obtuse openings change the detour law") {
    // Perpendicular foot lands on the far wall for acute corners, so the
    // detour is seam_dist * sin(theta); for obtuse corners it falls back to
    // the seam itself.
    CornerSceneConfig acute;
    acute.opening_rad = kPi / 3.0;
    acute.width = 32;
    acute.height = 6;
    const SceneGrid a = trace_corner(acute);
    for (int py = 0; py < acute.height; ++py) {
        for (int px = 0; px < acute.width; ++px) {
            const std::size_t i = static_cast<std::size_t>(py) * acute.width + px;
            const RefHit r = ref_hit(acute, px, py);
            CHECK(near(a.scenes[i].d_as, r.d_as, 1e-12));
            CHECK(near(a.scenes[i].d_ab, r.seam_dist * std::sin(acute.opening_rad), 1e-9));
            const double refl = r.right ? acute.reflect_right : acute.reflect_left;
            CHECK(near(a.scenes[i].rho_sas, refl * r.cos_inc, 1e-12));
        }
    }

    CornerSceneConfig obtuse = acute;
    obtuse.opening_rad = 2.0 * kPi / 3.0;
    const SceneGrid o = trace_corner(obtuse);
    for (int py = 0; py < obtuse.height; ++py) {
        for (int px = 0; px < obtuse.width; ++px) {
            const std::size_t i = static_cast<std::size_t>(py) * obtuse.width + px;
            const RefHit r = ref_hit(obtuse, px, py);
            CHECK(near(o.scenes[i].d_as, r.d_as, 1e-12));
            CHECK(near(o.scenes[i].d_ab, r.seam_dist, 1e-9));
        }
    }
}

TEST_CASE("detour grows away from the seam and vanishes on it") {
    CornerSceneConfig cfg;
    cfg.width = 64;
    cfg.height = 48;
    const SceneGrid grid = trace_corner(cfg);
    const int row = cfg.height / 2;
    auto scene = [&](int px) -> const TwoPathScene& {
        return grid.scenes[static_cast<std::size_t>(row) * cfg.width + px];
    };

    for (int px = cfg.width / 2; px + 1 < cfg.width; ++px)
        CHECK(scene(px + 1).d_ab > scene(px).d_ab);
    for (int px = cfg.width / 2 - 1; px > 0; --px)
        CHECK(scene(px - 1).d_ab > scene(px).d_ab);
    CHECK(scene(cfg.width / 2).d_ab < 0.05);
    CHECK(scene(0).d_ab > 0.5);
    CHECK(scene(cfg.width - 1).d_ab > 0.5);

    // Depth varies smoothly along a scanline.
    for (int px = 0; px + 1 < cfg.width; ++px)
        CHECK(std::abs(scene(px + 1).d_as - scene(px).d_as) < 0.05);

    // An odd-width grid has a column dead on the seam: no detour at all.
    CornerSceneConfig odd = cfg;
    odd.width = 33;
    odd.height = 5;
    const SceneGrid og = trace_corner(odd);
    for (int py = 0; py < odd.height; ++py) {
        const TwoPathScene& s = og.scenes[static_cast<std::size_t>(py) * odd.width + 16];
        CHECK(s.d_ab == 0.0);
        CHECK(s.rho_aba == odd.reflect_left);  // falloff(0) == 1
    }
}

TEST_CASE("zero_mpi strips every detour coefficient") {
    CornerSceneConfig cfg;
    cfg.width = 8;
    cfg.height = 4;
    SceneGrid grid = trace_corner(cfg);
    const SceneGrid before = grid;
    zero_mpi(grid);
    for (std::size_t i = 0; i < grid.scenes.size(); ++i) {
        CHECK(grid.scenes[i].rho_sab == 0.0);
        CHECK(grid.scenes[i].rho_aba == 0.0);
        CHECK(grid.scenes[i].rho_bas == 0.0);
        CHECK(grid.scenes[i].rho_sas == before.scenes[i].rho_sas);
        CHECK(grid.scenes[i].d_as == before.scenes[i].d_as);
        CHECK(grid.scenes[i].d_ab == before.scenes[i].d_ab);
    }
}

TEST_CASE("noise-free maps reproduce the geometry") {
    CornerSceneConfig cfg;
    cfg.width = 12;
    cfg.height = 8;
    SceneGrid grid = trace_corner(cfg);
    const std::vector<double> freqs = {12.5e6, 18.75e6, 25e6, 31.25e6};
    const ModulationConfig mod;
    const SensorParams params;
    const NoiseToggles off = NoiseToggles::all_off();

    SceneGrid direct = grid;
    zero_mpi(direct);
    const RenderedMaps clean =
        render_maps(direct, mod, freqs, params, off, SimMode::analytic, 11, 1);
    CHECK(clean.freqs_hz == freqs);
    REQUIRE(clean.depth.size() == 4);
    REQUIRE(clean.amplitude.size() == 4);
    for (std::size_t i = 0; i < grid.scenes.size(); ++i) {
        CHECK(clean.truth.values[i] == grid.scenes[i].d_as);
        CHECK(clean.truth.mask[i] == 1);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(std::abs(clean.depth[j].values[i] - grid.scenes[i].d_as) < 1e-7);
            const TwoPathScene& s = grid.scenes[i];
            const double amp = s.gamma_r * s.rho_sas / (s.d_as * s.d_as);
            CHECK(near(clean.amplitude[j].values[i], amp, 1e-9));
        }
    }

    const RenderedMaps mpi = render_maps(grid, mod, freqs, params, off, SimMode::analytic, 11, 1);
    bool biased = false;
    bool freq_dependent = false;
    for (std::size_t i = 0; i < grid.scenes.size(); ++i) {
        const TwoPathScene& s = grid.scenes[i];
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = mpi.depth[j].values[i];
            CHECK(d >= s.d_as - 1e-9);
            CHECK(d <= s.d_as + s.d_ab + 1e-9);
            if (d - s.d_as > 5e-4) biased = true;
        }
        if (std::abs(mpi.depth[0].values[i] - mpi.depth[3].values[i]) > 1e-6)
            freq_dependent = true;
    }
    CHECK(biased);
    CHECK(freq_dependent);

    // The slow per-sample path agrees with the geometry as well.
    CornerSceneConfig tiny = cfg;
    tiny.width = 4;
    tiny.height = 3;
    SceneGrid small = trace_corner(tiny);
    zero_mpi(small);
    const RenderedMaps traced =
        render_maps(small, mod, {25e6}, params, off, SimMode::trace, 11, 1);
    for (std::size_t i = 0; i < small.scenes.size(); ++i)
        CHECK(std::abs(traced.depth[0].values[i] - small.scenes[i].d_as) < 1e-7);
}

TEST_CASE("rendering is deterministic and thread-count invariant") {
    CornerSceneConfig cfg;
    cfg.width = 8;
    cfg.height = 6;
    const SceneGrid grid = trace_corner(cfg);
    const std::vector<double> freqs = {18.75e6, 31.25e6};
    const ModulationConfig mod;
    const SensorParams params;
    const NoiseToggles on;

    const RenderedMaps a = render_maps(grid, mod, freqs, params, on, SimMode::analytic, 3, 1);
    const RenderedMaps b = render_maps(grid, mod, freqs, params, on, SimMode::analytic, 3, 1);
    const RenderedMaps c = render_maps(grid, mod, freqs, params, on, SimMode::analytic, 3, 3);
    const RenderedMaps d = render_maps(grid, mod, freqs, params, on, SimMode::analytic, 4, 1);
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        CHECK(a.depth[j].values == b.depth[j].values);
        CHECK(a.amplitude[j].values == b.amplitude[j].values);
        CHECK(a.depth[j].values == c.depth[j].values);
        CHECK(a.depth[j].values != d.depth[j].values);
    }

    CHECK_THROWS_AS(render_maps(SceneGrid{}, mod, freqs, params, on, SimMode::analytic, 3, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(render_maps(grid, mod, {}, params, on, SimMode::analytic, 3, 1),
                    std::invalid_argument);
}

TEST_CASE("correction feeds depths and amplitudes to the model in order") {
    CornerSceneConfig cfg;
    cfg.width = 10;
    cfg.height = 6;
    const SceneGrid grid = trace_corner(cfg);
    const std::vector<double> freqs = {12.5e6, 18.75e6, 25e6, 31.25e6};
    const RenderedMaps maps = render_maps(grid, ModulationConfig{}, freqs, SensorParams{},
                                          NoiseToggles::all_off(), SimMode::analytic, 7, 1);

    const BoosterModel constant = stub_model(1.7);
    const DepthMap flat = correct_map(constant, maps);
    CHECK(flat.width == cfg.width);
    CHECK(flat.mask == maps.truth.mask);
    for (std::size_t i = 0; i < flat.values.size(); ++i) CHECK(flat.values[i] == 1.7);

    const DepthMap err = error_map(flat, maps.truth);
    for (std::size_t i = 0; i < err.values.size(); ++i)
        CHECK(near(err.values[i], (1.7 - maps.truth.values[i]) * 1000.0, 1e-9));

    // One-split stumps prove which feature slot each map lands in.
    std::vector<double> d3 = maps.depth[3].values;
    std::nth_element(d3.begin(), d3.begin() + d3.size() / 2, d3.end());
    const double d_cut = d3[d3.size() / 2];
    BoosterModel on_depth = stub_model(0.0);
    on_depth.trees.push_back(split_tree(3, d_cut, -1.0, 1.0));
    const DepthMap by_depth = correct_map(on_depth, maps);

    std::vector<double> a3 = maps.amplitude[3].values;
    std::nth_element(a3.begin(), a3.begin() + a3.size() / 2, a3.end());
    const double a_cut = a3[a3.size() / 2];
    BoosterModel on_amp = stub_model(0.0);
    on_amp.trees.push_back(split_tree(7, a_cut, -1.0, 1.0));
    const DepthMap by_amp = correct_map(on_amp, maps);

    for (std::size_t i = 0; i < by_depth.values.size(); ++i) {
        CHECK(by_depth.values[i] == (maps.depth[3].values[i] < d_cut ? -1.0 : 1.0));
        CHECK(by_amp.values[i] == (maps.amplitude[3].values[i] < a_cut ? -1.0 : 1.0));
    }

    // Trees stack on top of the base score.
    BoosterModel stacked = stub_model(2.0);
    stacked.trees.push_back(leaf_tree(0.25));
    stacked.trees.push_back(leaf_tree(-0.05));
    const DepthMap sum = correct_map(stacked, maps);
    for (double v : sum.values) CHECK(near(v, 2.2, 1e-12));

    const RenderedMaps two = render_maps(grid, ModulationConfig{}, {12.5e6, 25e6}, SensorParams{},
                                         NoiseToggles::all_off(), SimMode::analytic, 7, 1);
    CHECK_THROWS_AS(correct_map(constant, two), std::invalid_argument);
}

TEST_CASE("error map subtracts truth in millimetres and intersects masks") {
    DepthMap pred;
    pred.width = 2;
    pred.height = 1;
    pred.values = {1.501, 2.0};
    pred.mask = {1, 1};
    DepthMap truth = pred;
    truth.values = {1.5, 2.25};
    truth.mask = {1, 0};

    const DepthMap err = error_map(pred, truth);
    CHECK(near(err.values[0], 1.0, 1e-9));
    CHECK(err.mask[0] == 1);
    CHECK(err.mask[1] == 0);
    CHECK(err.values[1] == 0.0);

    DepthMap wide;
    wide.width = 3;
    wide.height = 1;
    wide.values = {0.0, 0.0, 0.0};
    wide.mask = {1, 1, 1};
    CHECK_THROWS_AS(error_map(pred, wide), std::invalid_argument);
}

TEST_CASE("masked and column-band means") {
    const DepthMap m = hand_map();
    CHECK(m.at(2, 1) == -7.0);
    CHECK(m.valid(1, 0) == false);

    CHECK(near(masked_mean_abs(m), (1.0 + 3 + 4 + 5 + 6 + 7 + 8) / 7.0, 1e-12));
    CHECK(near(seam_band_mean_abs(m, 1), (3.0 + 6 + 7) / 3.0, 1e-12));
    CHECK(near(outer_columns_mean_abs(m, 0.5), (1.0 + 4 + 5 + 8) / 4.0, 1e-12));

    // Even width and a zero band select no columns at all.
    CHECK_THROWS_AS(seam_band_mean_abs(m, 0), std::invalid_argument);

    DepthMap odd;
    odd.width = 5;
    odd.height = 1;
    odd.values = {1.0, 2.0, 3.0, 4.0, 5.0};
    odd.mask = {1, 1, 1, 1, 1};
    CHECK(seam_band_mean_abs(odd, 0) == 3.0);

    CHECK_THROWS_AS(outer_columns_mean_abs(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(outer_columns_mean_abs(m, 1.5), std::invalid_argument);

    DepthMap dead = m;
    dead.mask.assign(dead.mask.size(), 0);
    CHECK_THROWS_AS(masked_mean_abs(dead), std::invalid_argument);
}

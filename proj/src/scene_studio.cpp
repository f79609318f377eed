#include "amcw/scene_studio.hpp"

#include <cmath>
#include <stdexcept>

#include "amcw/parallel.hpp"
#include "amcw/rng.hpp"

namespace amcw {

void validate(const CornerSceneConfig& cfg) {
    const double pi = 3.141592653589793;
    if (!(cfg.distance_m > 0.0)) throw std::invalid_argument("corner: distance must be > 0");
    if (!(cfg.opening_rad > 0.0 && cfg.opening_rad < pi))
        throw std::invalid_argument("corner: opening angle must be in (0, pi)");
    if (!(cfg.reflect_left >= 0.0 && cfg.reflect_left <= 1.0) ||
        !(cfg.reflect_right >= 0.0 && cfg.reflect_right <= 1.0))
        throw std::invalid_argument("corner: reflectivities must be in [0, 1]");
    if (cfg.width < 2 || cfg.height < 2) throw std::invalid_argument("corner: grid must be >= 2x2");
    if (!(cfg.fov_h_rad > 0.0 && cfg.fov_h_rad < pi) ||
        !(cfg.fov_v_rad > 0.0 && cfg.fov_v_rad < pi))
        throw std::invalid_argument("corner: fov must be in (0, pi)");
    if (!(cfg.falloff_scale_m > 0.0))
        throw std::invalid_argument("corner: falloff scale must be > 0");
    if (!(cfg.gamma_r_v2 > 0.0)) throw std::invalid_argument("corner: gamma_r must be > 0");
}

namespace {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Half-plane wall through the seam line (x = 0, z = distance). `sign` is +1
// for the right wall (x >= 0) and -1 for the left.
struct Wall {
    Vec3 normal;  // unit, pointing toward the sensor
    double sign = 1.0;
    double reflect = 1.0;
};

struct Hit {
    bool ok = false;
    double t = 0.0;
    Vec3 point;
    double cos_inc = 0.0;
};

Hit intersect(const Wall& wall, const Vec3& v, double distance) {
    Hit hit;
    const double denom = dot(v, wall.normal);
    if (std::abs(denom) < 1e-12) return hit;  // ray parallel to the wall
    const double t = distance * wall.normal.z / denom;
    if (!(t > 0.0)) return hit;
    const Vec3 p{v.x * t, v.y * t, v.z * t};
    if (p.x * wall.sign < 0.0) return hit;  // outside the wall's half-plane
    hit.ok = true;
    hit.t = t;
    hit.point = p;
    hit.cos_inc = std::abs(denom);
    return hit;
}

}  // namespace

SceneGrid trace_corner(const CornerSceneConfig& cfg) {
    validate(cfg);

    const double half = cfg.opening_rad / 2.0;
    // Inward normals: seam at (0, 0, distance); each wall leans half the
    // opening angle away from the optical axis.
    const Wall right{{-std::cos(half), 0.0, -std::sin(half)}, +1.0, cfg.reflect_right};
    const Wall left{{std::cos(half), 0.0, -std::sin(half)}, -1.0, cfg.reflect_left};

    SceneGrid grid;
    grid.width = cfg.width;
    grid.height = cfg.height;
    grid.scenes.resize(static_cast<std::size_t>(cfg.width) * cfg.height);
    grid.mask.assign(grid.scenes.size(), 0);

    for (int py = 0; py < cfg.height; ++py) {
        const double ay = (0.5 - (py + 0.5) / cfg.height) * cfg.fov_v_rad;
        for (int px = 0; px < cfg.width; ++px) {
            const double ax = ((px + 0.5) / cfg.width - 0.5) * cfg.fov_h_rad;
            const Vec3 v{std::cos(ay) * std::sin(ax), std::sin(ay), std::cos(ay) * std::cos(ax)};

            const Hit hit_r = intersect(right, v, cfg.distance_m);
            const Hit hit_l = intersect(left, v, cfg.distance_m);
            const bool use_right = hit_r.ok && (!hit_l.ok || hit_r.t <= hit_l.t);
            const Hit& hit = use_right ? hit_r : hit_l;
            if (!hit.ok) continue;
            const Wall& hit_wall = use_right ? right : left;
            const Wall& opp_wall = use_right ? left : right;

            // Foot of the perpendicular onto the opposite plane; when it
            // falls outside that wall's half-plane, fall back to the nearest
            // point on the seam line itself.
            const Vec3 rel{hit.point.x, hit.point.y, hit.point.z - cfg.distance_m};
            const double along = dot(rel, opp_wall.normal);
            Vec3 foot{hit.point.x - along * opp_wall.normal.x, hit.point.y,
                      hit.point.z - along * opp_wall.normal.z};
            double d_ab = std::abs(along);
            if (foot.x * opp_wall.sign < 0.0) {
                d_ab = std::hypot(hit.point.x, hit.point.z - cfg.distance_m);
            }

            const double falloff =
                cfg.falloff_enabled ? 1.0 / ((1.0 + d_ab / cfg.falloff_scale_m) *
                                             (1.0 + d_ab / cfg.falloff_scale_m))
                                    : 1.0;

            TwoPathScene scene;
            scene.gamma_r = cfg.gamma_r_v2;
            scene.d_as = hit.t;
            scene.d_ab = d_ab;
            scene.rho_sas = hit_wall.reflect * hit.cos_inc;
            scene.rho_sab = hit_wall.reflect;
            scene.rho_aba = opp_wall.reflect * falloff;
            scene.rho_bas = hit_wall.reflect;

            const std::size_t idx = static_cast<std::size_t>(py) * cfg.width + px;
            grid.scenes[idx] = scene;
            grid.mask[idx] = 1;
        }
    }
    return grid;
}

void zero_mpi(SceneGrid& grid) {
    for (TwoPathScene& scene : grid.scenes) {
        scene.rho_sab = 0.0;
        scene.rho_aba = 0.0;
        scene.rho_bas = 0.0;
    }
}

RenderedMaps render_maps(const SceneGrid& grid, const ModulationConfig& base_cfg,
                         const std::vector<double>& freqs_hz, const SensorParams& params,
                         const NoiseToggles& toggles, SimMode mode, std::uint64_t seed,
                         int threads) {
    if (grid.scenes.empty() || grid.width < 1 || grid.height < 1)
        throw std::invalid_argument("render: empty scene grid");
    if (freqs_hz.empty()) throw std::invalid_argument("render: no frequencies");
    validate(params);

    RenderedMaps maps;
    maps.freqs_hz = freqs_hz;
    const auto n_pixels = grid.scenes.size();
    maps.truth.width = grid.width;
    maps.truth.height = grid.height;
    maps.truth.values.assign(n_pixels, 0.0);
    maps.truth.mask = grid.mask;
    for (std::size_t i = 0; i < n_pixels; ++i) {
        if (grid.mask[i]) maps.truth.values[i] = grid.scenes[i].d_as;
    }

    ModulationConfig cfg0 = base_cfg;
    cfg0.freq_hz = freqs_hz[0];
    const double p0 = calibrate(cfg0, params, grid.scenes[0].gamma_r);

    for (std::size_t j = 0; j < freqs_hz.size(); ++j) {
        DepthMap depth, amp;
        depth.width = amp.width = grid.width;
        depth.height = amp.height = grid.height;
        depth.values.assign(n_pixels, 0.0);
        amp.values.assign(n_pixels, 0.0);
        depth.mask = grid.mask;
        amp.mask = grid.mask;

        ModulationConfig cfg = base_cfg;
        cfg.freq_hz = freqs_hz[j];
        parallel_for_blocks(n_pixels, resolve_threads(threads),
                            [&](std::size_t begin, std::size_t end) {
                                for (std::size_t i = begin; i < end; ++i) {
                                    if (!grid.mask[i]) continue;
                                    auto eng = rng::make_engine(seed, i, 0x100 + j);
                                    const MeasurementRecord rec = simulate_measurement(
                                        grid.scenes[i], cfg, params, toggles, eng, mode, p0);
                                    depth.values[i] = rec.depth_m;
                                    amp.values[i] = rec.amplitude_v2;
                                }
                            });
        maps.depth.push_back(std::move(depth));
        maps.amplitude.push_back(std::move(amp));
    }
    return maps;
}

DepthMap correct_map(const BoosterModel& model, const RenderedMaps& maps) {
    if (maps.freqs_hz.size() != 4 || maps.depth.size() != 4 || maps.amplitude.size() != 4)
        throw std::invalid_argument("correct: expected exactly four rendered frequencies");

    DepthMap out;
    out.width = maps.truth.width;
    out.height = maps.truth.height;
    out.values.assign(maps.truth.values.size(), 0.0);
    out.mask.assign(maps.truth.values.size(), 0);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        bool valid = true;
        for (const DepthMap& m : maps.depth) valid = valid && m.mask[i] != 0;
        if (!valid) continue;
        FeatureVector x;
        for (std::size_t j = 0; j < 4; ++j) {
            x[j] = maps.depth[j].values[i];
            x[4 + j] = maps.amplitude[j].values[i];
        }
        out.values[i] = model.predict(x);
        out.mask[i] = 1;
    }
    return out;
}

DepthMap error_map(const DepthMap& map, const DepthMap& truth) {
    if (map.width != truth.width || map.height != truth.height)
        throw std::invalid_argument("error_map: dimension mismatch");

    DepthMap out;
    out.width = map.width;
    out.height = map.height;
    out.values.assign(map.values.size(), 0.0);
    out.mask.assign(map.values.size(), 0);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.mask[i] && truth.mask[i]) {
            out.values[i] = (map.values[i] - truth.values[i]) * 1000.0;
            out.mask[i] = 1;
        }
    }
    return out;
}

double masked_mean_abs(const DepthMap& map) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (map.mask[i]) {
            sum += std::abs(map.values[i]);
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("map: no valid pixels");
    return sum / static_cast<double>(n);
}

namespace {

double columns_mean_abs(const DepthMap& map, const std::vector<std::uint8_t>& take) {
    double sum = 0.0;
    std::size_t n = 0;
    for (int py = 0; py < map.height; ++py) {
        for (int px = 0; px < map.width; ++px) {
            if (!take[px] || !map.valid(px, py)) continue;
            sum += std::abs(map.at(px, py));
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("map: no valid pixels in column selection");
    return sum / static_cast<double>(n);
}

}  // namespace

double seam_band_mean_abs(const DepthMap& map, int band_px) {
    std::vector<std::uint8_t> take(map.width, 0);
    const double seam = map.width / 2.0;
    for (int px = 0; px < map.width; ++px) {
        take[px] = std::abs(px + 0.5 - seam) <= band_px ? 1 : 0;
    }
    return columns_mean_abs(map, take);
}

double outer_columns_mean_abs(const DepthMap& map, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("map: fraction must be in (0, 1]");
    const int per_side = std::max(1, static_cast<int>(map.width * fraction / 2.0));
    std::vector<std::uint8_t> take(map.width, 0);
    for (int px = 0; px < map.width; ++px) {
        take[px] = (px < per_side || px >= map.width - per_side) ? 1 : 0;
    }
    return columns_mean_abs(map, take);
}

}  // namespace amcw

#include "amcw/json_codec.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace amcw::codec {

namespace {

[[noreturn]] void bad(const char* ctx, const std::string& what) {
    throw std::invalid_argument(std::string(ctx) + ": " + what);
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

}  // namespace

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx) {
    if (!j.is_object()) bad(ctx, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key())) bad(ctx, "unknown key '" + it.key() + "'");
    }
}

double jnum(const json& j, const char* key, double def, const char* ctx) {
    const json* v = find(j, key);
    if (!v) return def;
    if (!v->is_number()) bad(ctx, std::string("'") + key + "' must be a number");
    return v->get<double>();
}

bool jbool(const json& j, const char* key, bool def, const char* ctx) {
    const json* v = find(j, key);
    if (!v) return def;
    if (!v->is_boolean()) bad(ctx, std::string("'") + key + "' must be a boolean");
    return v->get<bool>();
}

std::int64_t jint(const json& j, const char* key, std::int64_t def, const char* ctx) {
    const json* v = find(j, key);
    if (!v) return def;
    if (!v->is_number_integer() && !v->is_number_unsigned())
        bad(ctx, std::string("'") + key + "' must be an integer");
    return v->get<std::int64_t>();
}

std::string jstr(const json& j, const char* key, const std::string& def, const char* ctx) {
    const json* v = find(j, key);
    if (!v) return def;
    if (!v->is_string()) bad(ctx, std::string("'") + key + "' must be a string");
    return v->get<std::string>();
}

json pack(const ModulationConfig& m) {
    return json{{"alpha", m.alpha}, {"m_volts", m.m_volts}, {"c_mps", m.c_mps}};
}

ModulationConfig unpack_modulation(const json& j) {
    const char* ctx = "modulation";
    check_keys(j, {"alpha", "m_volts", "c_mps"}, ctx);
    ModulationConfig m;
    m.alpha = jnum(j, "alpha", m.alpha, ctx);
    m.m_volts = jnum(j, "m_volts", m.m_volts, ctx);
    m.c_mps = jnum(j, "c_mps", m.c_mps, ctx);
    return m;
}

json pack(const SceneRanges& r) {
    return json{{"gamma_r_v2", r.gamma_r},
                {"d_as_m", {r.d_as_lo, r.d_as_hi}},
                {"d_ab_m", {r.d_ab_lo, r.d_ab_hi}},
                {"rho_sas", {r.rho_sas_lo, r.rho_sas_hi}},
                {"rho_sab", {r.rho_sab_lo, r.rho_sab_hi}},
                {"rho_aba", {r.rho_aba_lo, r.rho_aba_hi}},
                {"rho_bas", {r.rho_bas_lo, r.rho_bas_hi}}};
}

namespace {

void unpack_bounds(const json& j, const char* key, double& lo, double& hi, const char* ctx) {
    const json* v = find(j, key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        bad(ctx, std::string("'") + key + "' must be a [lo, hi] number pair");
    lo = (*v)[0].get<double>();
    hi = (*v)[1].get<double>();
}

}  // namespace

SceneRanges unpack_ranges(const json& j) {
    const char* ctx = "ranges";
    check_keys(j, {"gamma_r_v2", "d_as_m", "d_ab_m", "rho_sas", "rho_sab", "rho_aba", "rho_bas"},
               ctx);
    SceneRanges r;
    r.gamma_r = jnum(j, "gamma_r_v2", r.gamma_r, ctx);
    unpack_bounds(j, "d_as_m", r.d_as_lo, r.d_as_hi, ctx);
    unpack_bounds(j, "d_ab_m", r.d_ab_lo, r.d_ab_hi, ctx);
    unpack_bounds(j, "rho_sas", r.rho_sas_lo, r.rho_sas_hi, ctx);
    unpack_bounds(j, "rho_sab", r.rho_sab_lo, r.rho_sab_hi, ctx);
    unpack_bounds(j, "rho_aba", r.rho_aba_lo, r.rho_aba_hi, ctx);
    unpack_bounds(j, "rho_bas", r.rho_bas_lo, r.rho_bas_hi, ctx);
    return r;
}

json pack(const SensorParams& p) {
    return json{{"eta", p.eta},
                {"m_gain", p.m_gain},
                {"f_excess", p.f_excess},
                {"q_coulomb", p.q_coulomb},
                {"t_transit_s", p.t_transit_s},
                {"p_a_cm2", p.p_a_cm2},
                {"i_fm_a_cm2", p.i_fm_a_cm2},
                {"temp_k", p.temp_k},
                {"e_g_j", p.e_g_j},
                {"k_b", p.k_b},
                {"bw_hz", p.bw_hz},
                {"s_tia_a2hz", p.s_tia_a2hz},
                {"r_load_ohm", p.r_load_ohm},
                {"g_tia_v_per_a", p.g_tia_v_per_a},
                {"lambda_nm", p.lambda_nm},
                {"h_planck", p.h_planck},
                {"c_mps", p.c_mps},
                {"eps_back_sigma", p.eps_back_sigma},
                {"eps_rand_sigma", p.eps_rand_sigma},
                {"trace_dt_s", p.trace_dt_s},
                {"trace_t_int_s", p.trace_t_int_s}};
}

SensorParams unpack_sensor(const json& j) {
    const char* ctx = "sensor";
    check_keys(j,
               {"eta", "m_gain", "f_excess", "q_coulomb", "t_transit_s", "p_a_cm2", "i_fm_a_cm2",
                "temp_k", "e_g_j", "k_b", "bw_hz", "s_tia_a2hz", "r_load_ohm", "g_tia_v_per_a",
                "lambda_nm", "h_planck", "c_mps", "eps_back_sigma", "eps_rand_sigma", "trace_dt_s",
                "trace_t_int_s"},
               ctx);
    SensorParams p;
    p.eta = jnum(j, "eta", p.eta, ctx);
    p.m_gain = jnum(j, "m_gain", p.m_gain, ctx);
    p.f_excess = jnum(j, "f_excess", p.f_excess, ctx);
    p.q_coulomb = jnum(j, "q_coulomb", p.q_coulomb, ctx);
    p.t_transit_s = jnum(j, "t_transit_s", p.t_transit_s, ctx);
    p.p_a_cm2 = jnum(j, "p_a_cm2", p.p_a_cm2, ctx);
    p.i_fm_a_cm2 = jnum(j, "i_fm_a_cm2", p.i_fm_a_cm2, ctx);
    p.temp_k = jnum(j, "temp_k", p.temp_k, ctx);
    p.e_g_j = jnum(j, "e_g_j", p.e_g_j, ctx);
    p.k_b = jnum(j, "k_b", p.k_b, ctx);
    p.bw_hz = jnum(j, "bw_hz", p.bw_hz, ctx);
    p.s_tia_a2hz = jnum(j, "s_tia_a2hz", p.s_tia_a2hz, ctx);
    p.r_load_ohm = jnum(j, "r_load_ohm", p.r_load_ohm, ctx);
    p.g_tia_v_per_a = jnum(j, "g_tia_v_per_a", p.g_tia_v_per_a, ctx);
    p.lambda_nm = jnum(j, "lambda_nm", p.lambda_nm, ctx);
    p.h_planck = jnum(j, "h_planck", p.h_planck, ctx);
    p.c_mps = jnum(j, "c_mps", p.c_mps, ctx);
    p.eps_back_sigma = jnum(j, "eps_back_sigma", p.eps_back_sigma, ctx);
    p.eps_rand_sigma = jnum(j, "eps_rand_sigma", p.eps_rand_sigma, ctx);
    p.trace_dt_s = jnum(j, "trace_dt_s", p.trace_dt_s, ctx);
    p.trace_t_int_s = jnum(j, "trace_t_int_s", p.trace_t_int_s, ctx);
    return p;
}

json pack(const NoiseToggles& t) {
    return json{{"shot", t.shot},         {"avalanche", t.avalanche}, {"dark", t.dark},
                {"tia", t.tia},           {"thermal", t.thermal},     {"background", t.background},
                {"residual", t.residual}};
}

NoiseToggles unpack_toggles(const json& j) {
    const char* ctx = "noise";
    check_keys(j, {"shot", "avalanche", "dark", "tia", "thermal", "background", "residual"}, ctx);
    NoiseToggles t;
    t.shot = jbool(j, "shot", t.shot, ctx);
    t.avalanche = jbool(j, "avalanche", t.avalanche, ctx);
    t.dark = jbool(j, "dark", t.dark, ctx);
    t.tia = jbool(j, "tia", t.tia, ctx);
    t.thermal = jbool(j, "thermal", t.thermal, ctx);
    t.background = jbool(j, "background", t.background, ctx);
    t.residual = jbool(j, "residual", t.residual, ctx);
    return t;
}

json pack(const TrainConfig& c) {
    return json{{"k_trees", c.k_trees},
                {"max_depth", c.max_depth},
                {"learning_rate", c.learning_rate},
                {"lambda_reg", c.lambda_reg},
                {"gamma_reg", c.gamma_reg},
                {"min_child_weight", c.min_child_weight},
                {"subsample", c.subsample},
                {"seed", c.seed}};
}

TrainConfig unpack_train(const json& j) {
    const char* ctx = "train";
    check_keys(j,
               {"k_trees", "max_depth", "learning_rate", "lambda_reg", "gamma_reg",
                "min_child_weight", "subsample", "seed"},
               ctx);
    TrainConfig c;
    c.k_trees = static_cast<int>(jint(j, "k_trees", c.k_trees, ctx));
    c.max_depth = static_cast<int>(jint(j, "max_depth", c.max_depth, ctx));
    c.learning_rate = jnum(j, "learning_rate", c.learning_rate, ctx);
    c.lambda_reg = jnum(j, "lambda_reg", c.lambda_reg, ctx);
    c.gamma_reg = jnum(j, "gamma_reg", c.gamma_reg, ctx);
    c.min_child_weight = jnum(j, "min_child_weight", c.min_child_weight, ctx);
    c.subsample = jnum(j, "subsample", c.subsample, ctx);
    c.seed = static_cast<std::uint64_t>(jint(j, "seed", static_cast<std::int64_t>(c.seed), ctx));
    return c;
}

json pack(const TpeConfig& c) {
    return json{{"mu_th", c.mu_th},
                {"n_startup", c.n_startup},
                {"gamma_quantile", c.gamma_quantile},
                {"n_candidates", c.n_candidates},
                {"seed", c.seed}};
}

TpeConfig unpack_tpe(const json& j) {
    const char* ctx = "tpe";
    check_keys(j, {"mu_th", "n_startup", "gamma_quantile", "n_candidates", "seed"}, ctx);
    TpeConfig c;
    c.mu_th = static_cast<int>(jint(j, "mu_th", c.mu_th, ctx));
    c.n_startup = static_cast<int>(jint(j, "n_startup", c.n_startup, ctx));
    c.gamma_quantile = jnum(j, "gamma_quantile", c.gamma_quantile, ctx);
    c.n_candidates = static_cast<int>(jint(j, "n_candidates", c.n_candidates, ctx));
    c.seed = static_cast<std::uint64_t>(jint(j, "seed", static_cast<std::int64_t>(c.seed), ctx));
    return c;
}

json pack(const CornerSceneConfig& c) {
    return json{{"distance_m", c.distance_m},
                {"opening_rad", c.opening_rad},
                {"reflect_left", c.reflect_left},
                {"reflect_right", c.reflect_right},
                {"width", c.width},
                {"height", c.height},
                {"fov_h_rad", c.fov_h_rad},
                {"fov_v_rad", c.fov_v_rad},
                {"falloff_enabled", c.falloff_enabled},
                {"falloff_scale_m", c.falloff_scale_m},
                {"gamma_r_v2", c.gamma_r_v2}};
}

CornerSceneConfig unpack_corner(const json& j) {
    const char* ctx = "corner_scene";
    check_keys(j,
               {"distance_m", "opening_rad", "reflect_left", "reflect_right", "width", "height",
                "fov_h_rad", "fov_v_rad", "falloff_enabled", "falloff_scale_m", "gamma_r_v2"},
               ctx);
    CornerSceneConfig c;
    c.distance_m = jnum(j, "distance_m", c.distance_m, ctx);
    c.opening_rad = jnum(j, "opening_rad", c.opening_rad, ctx);
    c.reflect_left = jnum(j, "reflect_left", c.reflect_left, ctx);
    c.reflect_right = jnum(j, "reflect_right", c.reflect_right, ctx);
    c.width = static_cast<int>(jint(j, "width", c.width, ctx));
    c.height = static_cast<int>(jint(j, "height", c.height, ctx));
    c.fov_h_rad = jnum(j, "fov_h_rad", c.fov_h_rad, ctx);
    c.fov_v_rad = jnum(j, "fov_v_rad", c.fov_v_rad, ctx);
    c.falloff_enabled = jbool(j, "falloff_enabled", c.falloff_enabled, ctx);
    c.falloff_scale_m = jnum(j, "falloff_scale_m", c.falloff_scale_m, ctx);
    c.gamma_r_v2 = jnum(j, "gamma_r_v2", c.gamma_r_v2, ctx);
    return c;
}

const char* mode_name(SimMode m) {
    return m == SimMode::trace ? "trace" : "analytic";
}

SimMode mode_from_name(const std::string& s) {
    if (s == "trace") return SimMode::trace;
    if (s == "analytic") return SimMode::analytic;
    throw std::invalid_argument("config: mode must be 'trace' or 'analytic', got '" + s + "'");
}

}  // namespace amcw::codec

// SPDX-License-Identifier: Apache-2.0
#include "wspso/json_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "wspso/errors.hpp"
#include "wspso/link_layer.hpp"

namespace wspso {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ValidationError(field, field + ": " + what);
}

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

double req_num(const Json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field)) bad(field, "missing required field");
    const Json& v = j.at(field);
    if (!v.is_number()) bad(field, "must be a number");
    return v.get<double>();
}

long long req_int(const Json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field)) bad(field, "missing required field");
    const Json& v = j.at(field);
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::isfinite(d)) return static_cast<long long>(d);
    }
    bad(field, "must be an integer");
}

long long opt_int(const Json& j, const std::string& field, long long fallback) {
    if (!j.is_object() || !j.contains(field)) return fallback;
    return req_int(j, field);
}

Json hyper_to_json(const HyperParams& h) {
    return Json{{"p_num", h.p_num}, {"omega", h.omega}, {"c1", h.c1}, {"c2", h.c2},
                {"k1", h.k1},       {"k2", h.k2},       {"k3", h.k3}, {"k4", h.k4}};
}

HyperParams hyper_from_json(const Json& j) {
    HyperParams h;
    h.p_num = static_cast<int>(req_int(j, "p_num"));
    h.omega = req_num(j, "omega");
    h.c1 = req_num(j, "c1");
    h.c2 = req_num(j, "c2");
    h.k1 = req_num(j, "k1");
    h.k2 = req_num(j, "k2");
    h.k3 = req_num(j, "k3");
    h.k4 = req_num(j, "k4");
    h.validate();
    return h;
}

Json breakdown_to_json(const FitnessBreakdown& fb) {
    return Json{{"min_sum_rate", fb.t_value}, {"f_value", fb.f_value},
                {"s_value", fb.s_value},      {"a_value", fb.a_value},
                {"c_value", fb.c_value},      {"col_value", fb.col_value}};
}

FitnessBreakdown breakdown_from_json(const Json& j) {
    FitnessBreakdown fb;
    fb.t_value = req_num(j, "min_sum_rate");
    fb.f_value = req_num(j, "f_value");
    fb.s_value = req_num(j, "s_value");
    fb.a_value = req_num(j, "a_value");
    fb.c_value = req_num(j, "c_value");
    fb.col_value = j.contains("col_value") ? req_num(j, "col_value") : 0.0;
    return fb;
}

Json collision_to_json(const CollisionReport& r) {
    Json j{{"violations", r.violations}};
    if (std::isfinite(r.min_distance))
        j["min_pair_distance"] = r.min_distance;
    else
        j["min_pair_distance"] = nullptr;
    return j;
}

RunParams run_params_from_json(const Json& args) {
    RunParams p;
    p.hyper = hyper_from_json(args);
    const long long iters = opt_int(args, "p_iter", 50);
    if (iters < 0) bad("p_iter", "must be >= 0");
    p.p_iter = static_cast<int>(iters);
    const long long seed = opt_int(args, "seed", 0);
    p.seed = static_cast<std::uint64_t>(seed);
    return p;
}

Json run_params_to_json(const RunParams& p) {
    Json j = hyper_to_json(p.hyper);
    j["p_iter"] = p.p_iter;
    j["seed"] = p.seed;
    return j;
}

Json record_to_json(const RunRecord& r, bool include_timing) {
    Json metrics = breakdown_to_json(r.best);
    metrics["evaluations"] = r.evaluations;
    if (include_timing) metrics["wall_ms"] = r.wall_ms;
    Json j{{"v", 1},
           {"run_id", r.run_id},
           {"hyper", hyper_to_json(r.hyper)},
           {"p_iter", r.p_iter},
           {"seed", r.seed},
           {"metrics", metrics}};
    if (include_timing) j["timestamp"] = r.timestamp;
    return j;
}

RunRecord record_from_json(const Json& j) {
    RunRecord r;
    if (opt_int(j, "v", 1) != 1) bad("v", "unsupported record version");
    r.run_id = req_int(j, "run_id");
    if (!j.contains("hyper")) bad("hyper", "missing required field");
    r.hyper = hyper_from_json(j.at("hyper"));
    r.p_iter = static_cast<int>(req_int(j, "p_iter"));
    r.seed = static_cast<std::uint64_t>(req_int(j, "seed"));
    if (!j.contains("metrics")) bad("metrics", "missing required field");
    const Json& m = j.at("metrics");
    r.best = breakdown_from_json(m);
    r.evaluations = opt_int(m, "evaluations", 0);
    if (m.contains("wall_ms") && m.at("wall_ms").is_number())
        r.wall_ms = m.at("wall_ms").get<double>();
    if (j.contains("timestamp") && j.at("timestamp").is_string())
        r.timestamp = j.at("timestamp").get<std::string>();
    return r;
}

Json scenario_summary_json(const Scenario& s) {
    Json buildings = Json::array();
    for (const Building& b : s.buildings)
        buildings.push_back(Json{{"footprint", {b.footprint.x0, b.footprint.y0, b.footprint.x1,
                                                b.footprint.y1}},
                                 {"height", b.height}});
    return Json{{"uav_count", s.uav_count},
                {"ugv_count", s.ugv_count},
                {"slot_count", s.slot_count},
                {"slot_seconds", s.tau},
                {"v_max_ms", s.v_max},
                {"theta_max_rad", s.theta_max},
                {"d_min_m", s.d_min},
                {"r_min", s.r_min},
                {"p_max_w", s.p_max},
                {"noise_w", s.n0},
                {"grid",
                 {{"x_min", s.grid.x_min},
                  {"y_min", s.grid.y_min},
                  {"h_min", s.grid.h_min},
                  {"delta", s.grid.delta},
                  {"nx", s.grid.nx},
                  {"ny", s.grid.ny},
                  {"nz", s.grid.nz}}},
                {"buildings", buildings}};
}

Json result_record_json(const HyperParams& h, int p_iter, std::uint64_t seed,
                        const OptimizationResult& res) {
    return Json{{"v", 1},
                {"hyper", hyper_to_json(h)},
                {"p_iter", p_iter},
                {"seed", seed},
                {"metrics",
                 [&] {
                     Json m = breakdown_to_json(res.best);
                     m["evaluations"] = res.evaluations;
                     return m;
                 }()},
                {"history", res.history},
                {"collision", collision_to_json(res.collision)}};
}

std::string trajectory_table(const TrajectorySet& traj, const Scenario& s,
                             const RadioMap& map) {
    const auto [sched, power] = greedy_schedule_and_power(traj, s, map);
    std::ostringstream out;
    out << "# m t x y z ugv rate\n";
    for (int m = 1; m <= traj.uav_count; ++m)
        for (int t = 1; t <= traj.slot_count; ++t) {
            const Vec3& p = traj.pos(m, t);
            const int n = sched.ugv_for(m, t);
            const double rate =
                n == 0 ? 0.0 : link_rate(m, n, t, traj, sched, power, s, map);
            out << m << " " << t << " " << fmt(p.x) << " " << fmt(p.y) << " " << fmt(p.z)
                << " " << n << " " << fmt(rate) << "\n";
        }
    return out.str();
}

} // namespace wspso

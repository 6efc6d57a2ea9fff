// SPDX-License-Identifier: Apache-2.0
#include "wspso/swarm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "wspso/errors.hpp"
#include "wspso/rng.hpp"

namespace wspso {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ValidationError(field, field + ": " + what);
}

void check_weight(const char* name, double v) {
    if (!std::isfinite(v) || v < 0.0) bad(name, "must be finite and >= 0");
}

void check_shapes(const Particle& a, const Particle& b) {
    if (a.position.uav_count != b.position.uav_count ||
        a.position.slot_count != b.position.slot_count)
        throw ContractError("crossover parents have different shapes");
}

double reflect_axis(double v, double lo, double hi, double& vel) {
    // One bounce is enough for the step sizes the optimizer produces; fall
    // back to clamping if the overshoot spans the whole box.
    if (v < lo) {
        v = lo + (lo - v);
        vel = -vel;
    } else if (v > hi) {
        v = hi - (v - hi);
        vel = -vel;
    }
    if (v < lo || v > hi) v = std::clamp(v, lo, hi);
    return v;
}

void evaluate_swarm(SwarmState& st, const Scenario& s, const RadioMap& map,
                    const HyperParams& hyper, double collision_weight,
                    long long& evaluations) {
    for (Particle& p : st.particles) {
        const FitnessBreakdown fb = fitness(p.position, s, map, hyper, collision_weight);
        ++evaluations;
        if (fb.f_value > p.p_best_fitness) {
            p.p_best_fitness = fb.f_value;
            p.p_best = p.position;
        }
    }
    for (std::size_t k = 0; k < st.particles.size(); ++k) {
        if (st.particles[k].p_best_fitness > st.g_best_fitness) {
            st.g_best_fitness = st.particles[k].p_best_fitness;
            st.g_best = st.particles[k].p_best;
            st.g_best_index = static_cast<int>(k);
        }
    }
}

SwarmState finish_init(std::vector<TrajectorySet> positions, const Scenario& s,
                       const RadioMap& map, const HyperParams& hyper,
                       const OptimizerOptions& options, std::mt19937_64 rng,
                       long long* evaluations) {
    SwarmState st;
    st.rng = rng;
    st.particles.reserve(positions.size());
    for (TrajectorySet& q : positions) {
        Particle p;
        p.velocity = TrajectorySet::zeros(q.uav_count, q.slot_count);
        p.p_best = q;
        p.position = std::move(q);
        st.particles.push_back(std::move(p));
    }
    st.g_best = st.particles.front().position;
    long long local = 0;
    long long& evals = evaluations ? *evaluations : local;
    for (Particle& p : st.particles) {
        p.p_best_fitness =
            fitness(p.p_best, s, map, hyper, options.collision_weight).f_value;
        ++evals;
    }
    st.g_best_fitness = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < st.particles.size(); ++k) {
        if (st.particles[k].p_best_fitness > st.g_best_fitness) {
            st.g_best_fitness = st.particles[k].p_best_fitness;
            st.g_best = st.particles[k].p_best;
            st.g_best_index = static_cast<int>(k);
        }
    }
    return st;
}

} // namespace

void HyperParams::validate() const {
    if (p_num < 2) bad("p_num", "must be >= 2");
    check_weight("omega", omega);
    check_weight("c1", c1);
    check_weight("c2", c2);
    check_weight("k1", k1);
    check_weight("k2", k2);
    check_weight("k3", k3);
    check_weight("k4", k4);
}

HyperParams baseline1() { return HyperParams{100, 0.5, 2.0, 2.0, 2.0, 0.5, 5.0, 5.0}; }

HyperParams baseline2() {
    return HyperParams{58, 0.8765, 5.4321, 9.8765, 3.7284, 8.1235, 1.9823, 6.5432};
}

TrajectorySet warm_start(const Scenario& s, const RadioMap& map) {
    (void)map;
    const int M = s.uav_count;
    const int T = s.slot_count;
    const double cruise_h = (s.h_min + s.h_max) / 2.0;
    const double step_max = s.v_max * s.tau;
    const Box3 box = s.grid.bounding_box();

    // UGV n goes to UAV ((n-1) mod M) + 1; a UAV left without assignees
    // tracks the whole fleet instead.
    std::vector<std::vector<int>> assigned(static_cast<std::size_t>(M));
    for (int n = 1; n <= s.ugv_count; ++n)
        assigned[static_cast<std::size_t>((n - 1) % M)].push_back(n);
    std::vector<int> all(static_cast<std::size_t>(s.ugv_count));
    for (int n = 1; n <= s.ugv_count; ++n) all[static_cast<std::size_t>(n - 1)] = n;

    TrajectorySet q = TrajectorySet::zeros(M, T);
    for (int m = 1; m <= M; ++m) {
        const std::vector<int>& mine =
            assigned[static_cast<std::size_t>(m - 1)].empty()
                ? all
                : assigned[static_cast<std::size_t>(m - 1)];
        Vec3 prev;
        for (int t = 1; t <= T; ++t) {
            Vec3 centroid{};
            for (int n : mine) centroid += ugv_position(s, n, t);
            centroid = centroid * (1.0 / static_cast<double>(mine.size()));
            Vec3 target{centroid.x, centroid.y, cruise_h};
            target = box.clamp(target);
            if (t == 1) {
                prev = target;
            } else {
                prev = box.clamp(prev + clamp_norm(target - prev, step_max));
            }
            q.pos(m, t) = prev;
        }
    }
    return q;
}

SwarmState init_swarm(const TrajectorySet& warm, const Scenario& s, const RadioMap& map,
                      const HyperParams& hyper, std::uint64_t seed,
                      const OptimizerOptions& options) {
    hyper.validate();
    std::mt19937_64 rng(seed);
    const Box3 box = s.grid.bounding_box();
    std::vector<TrajectorySet> positions;
    positions.reserve(static_cast<std::size_t>(hyper.p_num));
    positions.push_back(warm);
    for (int k = 2; k <= hyper.p_num; ++k) {
        TrajectorySet q = warm;
        for (int m = 1; m <= q.uav_count; ++m)
            for (int t = 1; t <= q.slot_count; ++t) {
                Vec3& w = q.pos(m, t);
                w.x += uniform_range(rng, -10.0, 10.0);
                w.y += uniform_range(rng, -10.0, 10.0);
                w.z += uniform_range(rng, -5.0, 5.0);
                w = box.clamp(w);
            }
        positions.push_back(std::move(q));
    }
    return finish_init(std::move(positions), s, map, hyper, options, rng, nullptr);
}

SwarmState init_swarm_random(const Scenario& s, const RadioMap& map, const HyperParams& hyper,
                             std::uint64_t seed, const OptimizerOptions& options) {
    hyper.validate();
    std::mt19937_64 rng(seed);
    const VoxelGrid& g = s.grid;
    std::vector<TrajectorySet> positions;
    positions.reserve(static_cast<std::size_t>(hyper.p_num));
    for (int k = 1; k <= hyper.p_num; ++k) {
        TrajectorySet q = TrajectorySet::zeros(s.uav_count, s.slot_count);
        for (int m = 1; m <= s.uav_count; ++m)
            for (int t = 1; t <= s.slot_count; ++t)
                q.pos(m, t) = {uniform_range(rng, g.x_min, g.x_max()),
                               uniform_range(rng, g.y_min, g.y_max()),
                               uniform_range(rng, g.h_min, g.h_max())};
        positions.push_back(std::move(q));
    }
    return finish_init(std::move(positions), s, map, hyper, options, rng, nullptr);
}

void update_velocity(Particle& p, const TrajectorySet& g_best, const HyperParams& hyper,
                     double r1, double r2) {
    for (std::size_t i = 0; i < p.velocity.points.size(); ++i) {
        const Vec3& q = p.position.points[i];
        const Vec3& pb = p.p_best.points[i];
        const Vec3& gb = g_best.points[i];
        p.velocity.points[i] = p.velocity.points[i] * hyper.omega +
                               (pb - q) * (hyper.c1 * r1) + (gb - q) * (hyper.c2 * r2);
    }
}

void update_velocity(Particle& p, const TrajectorySet& g_best, const HyperParams& hyper,
                     std::mt19937_64& rng, bool per_coordinate) {
    if (!per_coordinate) {
        const double r1 = uniform01(rng);
        const double r2 = uniform01(rng);
        update_velocity(p, g_best, hyper, r1, r2);
        return;
    }
    for (std::size_t i = 0; i < p.velocity.points.size(); ++i) {
        const Vec3& q = p.position.points[i];
        const Vec3& pb = p.p_best.points[i];
        const Vec3& gb = g_best.points[i];
        Vec3& v = p.velocity.points[i];
        auto axis = [&](double vv, double qq, double pp, double gg) {
            const double r1 = uniform01(rng);
            const double r2 = uniform01(rng);
            return hyper.omega * vv + hyper.c1 * r1 * (pp - qq) + hyper.c2 * r2 * (gg - qq);
        };
        v = {axis(v.x, q.x, pb.x, gb.x), axis(v.y, q.y, pb.y, gb.y),
             axis(v.z, q.z, pb.z, gb.z)};
    }
}

void update_position(Particle& p, const Box3& bounds, bool reflect) {
    for (std::size_t i = 0; i < p.position.points.size(); ++i) {
        Vec3 q = p.position.points[i] + p.velocity.points[i];
        if (reflect) {
            Vec3& v = p.velocity.points[i];
            q.x = reflect_axis(q.x, bounds.lo.x, bounds.hi.x, v.x);
            q.y = reflect_axis(q.y, bounds.lo.y, bounds.hi.y, v.y);
            q.z = reflect_axis(q.z, bounds.lo.z, bounds.hi.z, v.z);
        } else {
            q = bounds.clamp(q);
        }
        p.position.points[i] = q;
    }
}

double speed_penalty(const TrajectorySet& traj, const Scenario& s) {
    double sum = 0.0;
    for (int m = 1; m <= traj.uav_count; ++m)
        for (int t = 2; t <= traj.slot_count; ++t) {
            const double v = distance(traj.pos(m, t), traj.pos(m, t - 1)) / s.tau;
            sum += std::max(0.0, (v - s.v_max) / s.v_max);
        }
    return sum;
}

double angle_penalty(const TrajectorySet& traj, const Scenario& s) {
    double sum = 0.0;
    for (int m = 1; m <= traj.uav_count; ++m)
        for (int t = 2; t <= traj.slot_count - 1; ++t) {
            const Vec3 d1 = traj.pos(m, t) - traj.pos(m, t - 1);
            const Vec3 d2 = traj.pos(m, t + 1) - traj.pos(m, t);
            const double theta = angle_between(d1, d2);
            sum += std::max(0.0, (theta - s.theta_max) / s.theta_max);
        }
    return sum;
}

double building_penalty(const TrajectorySet& traj, const Scenario& s) {
    double sum = 0.0;
    for (int m = 1; m <= traj.uav_count; ++m)
        for (int t = 1; t <= traj.slot_count - 1; ++t) {
            const Vec3& p = traj.pos(m, t);
            double worst = 0.0;
            for (const Building& b : s.buildings) {
                if (!b.footprint.contains(p.x, p.y)) continue;
                if (p.z >= b.height) continue;
                worst = std::max(worst, (b.height - p.z) / b.height);
            }
            sum += worst;
        }
    return sum;
}

double collision_penalty(const TrajectorySet& traj, const Scenario& s) {
    if (s.d_min <= 0.0) return 0.0;
    double sum = 0.0;
    for (int t = 1; t <= traj.slot_count; ++t)
        for (int m = 1; m <= traj.uav_count; ++m)
            for (int mm = m + 1; mm <= traj.uav_count; ++mm) {
                const double d = distance(traj.pos(m, t), traj.pos(mm, t));
                sum += std::max(0.0, (s.d_min - d) / s.d_min);
            }
    return sum;
}

CollisionReport collision_report(const TrajectorySet& traj, const Scenario& s) {
    CollisionReport r;
    for (int t = 1; t <= traj.slot_count; ++t)
        for (int m = 1; m <= traj.uav_count; ++m)
            for (int mm = m + 1; mm <= traj.uav_count; ++mm) {
                const double d = distance(traj.pos(m, t), traj.pos(mm, t));
                r.min_distance = std::min(r.min_distance, d);
                if (d < s.d_min) ++r.violations;
            }
    return r;
}

FitnessBreakdown fitness(const TrajectorySet& traj, const Scenario& s, const RadioMap& map,
                         const HyperParams& hyper, double collision_weight) {
    FitnessBreakdown fb;
    const auto [sched, power] = greedy_schedule_and_power(traj, s, map);
    fb.t_value = min_sum_rate(traj, sched, power, s, map);
    fb.s_value = speed_penalty(traj, s);
    fb.a_value = angle_penalty(traj, s);
    fb.c_value = building_penalty(traj, s);
    fb.col_value = collision_penalty(traj, s);
    fb.f_value = hyper.k1 * fb.t_value - hyper.k2 * fb.s_value - hyper.k3 * fb.a_value -
                 hyper.k4 * fb.c_value - collision_weight * fb.col_value;
    return fb;
}

void crossover_at(Particle& a, Particle& b, int t_star) {
    check_shapes(a, b);
    const int T = a.position.slot_count;
    if (t_star < 2 || t_star > T)
        throw ContractError("crossover point " + std::to_string(t_star) + " outside [2, " +
                            std::to_string(T) + "]");
    for (int m = 1; m <= a.position.uav_count; ++m)
        for (int t = t_star; t <= T; ++t) {
            std::swap(a.position.pos(m, t), b.position.pos(m, t));
            std::swap(a.velocity.pos(m, t), b.velocity.pos(m, t));
        }
}

void crossover(Particle& a, Particle& b, std::mt19937_64& rng) {
    check_shapes(a, b);
    const int T = a.position.slot_count;
    if (T < 3) return;
    crossover_at(a, b, static_cast<int>(uniform_int(rng, 2, T - 1)));
}

void mutate(Particle& p, std::mt19937_64& rng, const MutationParams& params,
            const Box3& bounds) {
    for (int m = 1; m <= p.position.uav_count; ++m)
        for (int t = 1; t <= p.position.slot_count; ++t) {
            if (uniform01(rng) >= params.prob) continue;
            Vec3& w = p.position.pos(m, t);
            w.x += gaussian(rng) * params.sigma_h;
            w.y += gaussian(rng) * params.sigma_h;
            w.z += gaussian(rng) * params.sigma_v;
            w = bounds.clamp(w);
        }
}

OptimizationResult run_ws_pso_cm(const Scenario& s, const RadioMap& map,
                                 const HyperParams& hyper, int p_iter, std::uint64_t seed,
                                 const OptimizerOptions& options) {
    hyper.validate();
    if (p_iter < 0) bad("p_iter", "must be >= 0");
    s.validate();

    const auto start = std::chrono::steady_clock::now();
    OptimizationResult res;
    const Box3 box = s.grid.bounding_box();
    const int P = hyper.p_num;
    const int T = s.slot_count;

    SwarmState st = options.warm_start
                        ? init_swarm(warm_start(s, map), s, map, hyper, seed, options)
                        : init_swarm_random(s, map, hyper, seed, options);
    res.evaluations += P;
    res.history.push_back(st.g_best_fitness);

    for (int iter = 1; iter <= p_iter; ++iter) {
        st.iter = iter;
        for (Particle& p : st.particles) {
            update_velocity(p, st.g_best, hyper, st.rng, options.per_coordinate_rand);
            update_position(p, box, options.reflect_at_bounds);
        }
        evaluate_swarm(st, s, map, hyper, options.collision_weight, res.evaluations);

        if (T >= 3) {
            for (int pair = 0; pair < P / 2; ++pair) {
                const auto i = static_cast<std::size_t>(uniform_int(st.rng, 0, P - 1));
                const auto j = static_cast<std::size_t>(uniform_int(st.rng, 0, P - 1));
                const auto t_star = static_cast<int>(uniform_int(st.rng, 2, T - 1));
                if (i == j) continue;
                crossover_at(st.particles[i], st.particles[j], t_star);
            }
        }
        for (int k = 0; k < P; ++k) {
            if (k == st.g_best_index) continue;
            mutate(st.particles[static_cast<std::size_t>(k)], st.rng, options.mutation, box);
        }
        evaluate_swarm(st, s, map, hyper, options.collision_weight, res.evaluations);
        res.history.push_back(st.g_best_fitness);
    }

    res.g_best = st.g_best;
    res.best = fitness(st.g_best, s, map, hyper, options.collision_weight);
    ++res.evaluations;
    res.collision = collision_report(st.g_best, s);
    res.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    return res;
}

} // namespace wspso

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "wspso/link_layer.hpp"
#include "wspso/radio_map.hpp"
#include "wspso/scenario.hpp"

namespace wspso {

/// The eight tuned knobs: swarm size, velocity-update coefficients, and
/// fitness weights.
struct HyperParams {
    int p_num = 100;
    double omega = 0.5;
    double c1 = 2.0;
    double c2 = 2.0;
    double k1 = 2.0;
    double k2 = 0.5;
    double k3 = 5.0;
    double k4 = 5.0;

    void validate() const;
    bool operator==(const HyperParams&) const = default;
};

/// Conventional PSO settings.
HyperParams baseline1();
/// Deliberately mis-tuned settings, the tuning agent's worst-case anchor.
HyperParams baseline2();

/// Objective value with its components. f = k1*t - k2*s - k3*a - k4*c,
/// minus collision_weight*col when that optional term is enabled.
struct FitnessBreakdown {
    double t_value = 0.0;   ///< min-sum-rate objective, bps/Hz
    double s_value = 0.0;   ///< speed penalty
    double a_value = 0.0;   ///< turning-angle penalty
    double c_value = 0.0;   ///< building-clearance penalty
    double col_value = 0.0; ///< separation penalty (reported even when unweighted)
    double f_value = 0.0;
};

struct CollisionReport {
    int violations = 0; ///< (m, m', t) pairs closer than d_min
    double min_distance = std::numeric_limits<double>::infinity(); ///< inf when M = 1
};

struct Particle {
    TrajectorySet position;
    TrajectorySet velocity; ///< same shape, meters per slot-step
    TrajectorySet p_best;
    double p_best_fitness = -std::numeric_limits<double>::infinity();
};

struct SwarmState {
    std::vector<Particle> particles;
    TrajectorySet g_best;
    double g_best_fitness = -std::numeric_limits<double>::infinity();
    int g_best_index = 0; ///< 0-based owner of g_best
    int iter = 0;
    std::mt19937_64 rng;
};

struct MutationParams {
    double prob = 0.05;    ///< per-waypoint perturbation probability
    double sigma_h = 5.0;  ///< horizontal std dev, meters
    double sigma_v = 2.0;  ///< vertical std dev, meters
};

struct OptimizerOptions {
    bool warm_start = true;
    bool per_coordinate_rand = false; ///< draw r1/r2 per coordinate instead of per particle
    bool reflect_at_bounds = false;   ///< reflect off the box instead of clamping
    double collision_weight = 0.0;    ///< optional fifth fitness term, off by default
    MutationParams mutation;
};

struct OptimizationResult {
    TrajectorySet g_best;
    FitnessBreakdown best;
    std::vector<double> history; ///< g_best fitness per iteration, index 0 = initial swarm
    long long evaluations = 0;
    double wall_ms = 0.0; ///< diagnostic only; never serialized into result records
    CollisionReport collision;
};

/// Deterministic geometric initializer: UGVs are dealt to UAVs round-robin
/// and each UAV tracks the centroid of its assigned UGVs at mid-altitude,
/// with every step clamped to v_max*tau and the grid box.
TrajectorySet warm_start(const Scenario& s, const RadioMap& map);

/// Particle 1 = warm exactly; the rest jitter it by +-10 m horizontally and
/// +-5 m vertically. Velocities start at zero.
SwarmState init_swarm(const TrajectorySet& warm, const Scenario& s, const RadioMap& map,
                      const HyperParams& hyper, std::uint64_t seed,
                      const OptimizerOptions& options = {});

/// Uniform-random positions over the grid box; the warm-start comparison
/// baseline.
SwarmState init_swarm_random(const Scenario& s, const RadioMap& map, const HyperParams& hyper,
                             std::uint64_t seed, const OptimizerOptions& options = {});

/// v' = omega*v + c1*r1*(p_best - q) + c2*r2*(g_best - q) with caller-chosen
/// scalar factors.
void update_velocity(Particle& p, const TrajectorySet& g_best, const HyperParams& hyper,
                     double r1, double r2);

/// Same update drawing r1/r2 from the generator: one scalar pair per call,
/// or one pair per coordinate when per_coordinate is set.
void update_velocity(Particle& p, const TrajectorySet& g_best, const HyperParams& hyper,
                     std::mt19937_64& rng, bool per_coordinate = false);

/// q' = q + v, kept inside `bounds` by clamping (default) or reflection
/// (which also flips the offending velocity component).
void update_position(Particle& p, const Box3& bounds, bool reflect = false);

/// Sum over UAVs and steps of max(0, (step_speed - v_max)/v_max).
double speed_penalty(const TrajectorySet& traj, const Scenario& s);

/// Sum over UAVs and interior slots of max(0, (theta - theta_max)/theta_max);
/// zero-length displacements count as no turn.
double angle_penalty(const TrajectorySet& traj, const Scenario& s);

/// Sum over UAVs and slots 1..T-1 of (h_b - H)/h_b for waypoints inside a
/// building footprint below its top (largest violating building counts).
double building_penalty(const TrajectorySet& traj, const Scenario& s);

/// Sum over slots and UAV pairs of max(0, (d_min - d)/d_min).
double collision_penalty(const TrajectorySet& traj, const Scenario& s);

CollisionReport collision_report(const TrajectorySet& traj, const Scenario& s);

/// Evaluate a trajectory set: T via the greedy link layer, penalties, and
/// the combined objective.
FitnessBreakdown fitness(const TrajectorySet& traj, const Scenario& s, const RadioMap& map,
                         const HyperParams& hyper, double collision_weight = 0.0);

/// Swap positions and velocities of both particles for all slots >= t_star.
/// p_best is left untouched on both sides.
void crossover_at(Particle& a, Particle& b, int t_star);

/// Single-point crossover at t* drawn uniformly from 2..T-1. Identity when
/// T < 3 (no interior cut point exists).
void crossover(Particle& a, Particle& b, std::mt19937_64& rng);

/// Independently perturb each waypoint with probability params.prob by a
/// zero-mean Gaussian, clamped to `bounds`. p_best untouched.
void mutate(Particle& p, std::mt19937_64& rng, const MutationParams& params,
            const Box3& bounds);

/// Full optimizer loop. history has length p_iter + 1 and is non-decreasing;
/// identical inputs give identical results.
OptimizationResult run_ws_pso_cm(const Scenario& s, const RadioMap& map,
                                 const HyperParams& hyper, int p_iter, std::uint64_t seed,
                                 const OptimizerOptions& options = {});

} // namespace wspso

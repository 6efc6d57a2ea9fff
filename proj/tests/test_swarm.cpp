// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "wspso/errors.hpp"
#include "wspso/rng.hpp"
#include "wspso/swarm.hpp"
#include "test_support.hpp"

using namespace wspso;

namespace {

TrajectorySet single_point(const Vec3& p) {
    TrajectorySet q = TrajectorySet::zeros(1, 1);
    q.pos(1, 1) = p;
    return q;
}

TrajectorySet line(const std::vector<Vec3>& pts) {
    TrajectorySet q = TrajectorySet::zeros(1, static_cast<int>(pts.size()));
    for (int t = 1; t <= q.slot_count; ++t) q.pos(1, t) = pts[static_cast<std::size_t>(t - 1)];
    return q;
}

/// Uniform trajectory inside the tiny scenario's box, for fuzzing.
TrajectorySet random_traj(const Scenario& s, std::mt19937_64& rng) {
    TrajectorySet q = TrajectorySet::zeros(s.uav_count, s.slot_count);
    const Box3 box = s.grid.bounding_box();
    for (auto& p : q.points)
        p = {uniform_range(rng, box.lo.x, box.hi.x), uniform_range(rng, box.lo.y, box.hi.y),
             uniform_range(rng, box.lo.z, box.hi.z)};
    return q;
}

/// Multiset of per-slot columns, for crossover conservation checks.
std::multimap<int, Vec3> columns(const Particle& a, const Particle& b) {
    std::multimap<int, Vec3> cols;
    for (int t = 1; t <= a.position.slot_count; ++t) {
        for (int m = 1; m <= a.position.uav_count; ++m) {
            cols.insert({t, a.position.pos(m, t)});
            cols.insert({t, b.position.pos(m, t)});
        }
    }
    return cols;
}

bool same_columns(const std::multimap<int, Vec3>& x, const std::multimap<int, Vec3>& y) {
    if (x.size() != y.size()) return false;
    for (const auto& [t, v] : x) {
        auto [lo, hi] = y.equal_range(t);
        if (std::count_if(lo, hi, [&](const auto& kv) { return kv.second == v; }) !=
            std::count_if(x.lower_bound(t), x.upper_bound(t),
                          [&](const auto& kv) { return kv.second == v; }))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("velocity update matches the closed form") {
    Particle p;
    p.position = single_point({0.0, 0.0, 0.0});
    p.velocity = single_point({0.0, 0.0, 0.0});
    p.p_best = single_point({10.0, 0.0, 0.0});
    const TrajectorySet g = single_point({10.0, 0.0, 0.0});

    HyperParams h;
    h.omega = 0.5;
    h.c1 = 2.0;
    h.c2 = 2.0;
    // v' = 0.5*0 + 2*1*(10-0) + 2*1*(10-0) = 40.
    update_velocity(p, g, h, 1.0, 1.0);
    CHECK(p.velocity.pos(1, 1) == Vec3{40.0, 0.0, 0.0});

    // Position is untouched, so the pulls repeat: v' = 0.5*40 + 20 + 20 = 60.
    update_velocity(p, g, h, 1.0, 1.0);
    CHECK(p.velocity.pos(1, 1) == Vec3{60.0, 0.0, 0.0});
}

TEST_CASE("position update clamps to the box, or reflects when asked") {
    const Box3 box{{0.0, 0.0, 60.0}, {40.0, 40.0, 80.0}};
    Particle p;
    p.position = single_point({35.0, 20.0, 79.0});
    p.velocity = single_point({10.0, 0.0, 5.0});
    p.p_best = p.position;

    Particle clamped = p;
    update_position(clamped, box);
    CHECK(clamped.position.pos(1, 1) == Vec3{40.0, 20.0, 80.0});

    Particle bounced = p;
    update_position(bounced, box, true);
    CHECK(bounced.position.pos(1, 1) == Vec3{35.0, 20.0, 76.0});
    CHECK(bounced.velocity.pos(1, 1).x == -10.0);
    CHECK(bounced.velocity.pos(1, 1).z == -5.0);
}

TEST_CASE("speed penalty hand case") {
    Scenario s = testsup::tiny_scenario(1, 1, 3);
    s.v_max = 10.0;
    s.tau = 1.0;
    // Steps of 20 m and 10 m: only the first exceeds v_max, by 100 percent.
    const TrajectorySet q =
        line({{0.0, 0.0, 60.0}, {20.0, 0.0, 60.0}, {30.0, 0.0, 60.0}});
    CHECK(speed_penalty(q, s) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("angle penalty hand case and hover exemption") {
    Scenario s = testsup::tiny_scenario(1, 1, 3);
    s.theta_max = std::numbers::pi / 2.0;
    // One interior slot with a U-turn: theta = pi = 2 * theta_max.
    const TrajectorySet u_turn =
        line({{0.0, 0.0, 60.0}, {10.0, 0.0, 60.0}, {0.0, 0.0, 60.0}});
    CHECK(angle_penalty(u_turn, s) == doctest::Approx(1.0).epsilon(1e-9));

    // Hovering at the interior slot: no displacement, no turn.
    const TrajectorySet hover =
        line({{0.0, 0.0, 60.0}, {0.0, 0.0, 60.0}, {10.0, 0.0, 60.0}});
    CHECK(angle_penalty(hover, s) == 0.0);
}

TEST_CASE("building penalty charges the worst building per waypoint") {
    Scenario s = testsup::tiny_scenario(1, 1, 2);
    s.buildings.push_back({{0.0, 0.0, 40.0, 40.0}, 90.0});
    s.buildings.push_back({{0.0, 0.0, 10.0, 10.0}, 75.0});
    // Slot 1 sits inside both footprints at H = 60: violations are
    // (90-60)/90 = 1/3 and (75-60)/75 = 0.2; the larger one counts.
    // Slot T is exempt by construction.
    const TrajectorySet q = line({{5.0, 5.0, 60.0}, {5.0, 5.0, 60.0}});
    CHECK(building_penalty(q, s) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    // Above every rooftop: clean.
    const TrajectorySet high = line({{5.0, 5.0, 95.0}, {5.0, 5.0, 95.0}});
    CHECK(building_penalty(high, s) == 0.0);
}

TEST_CASE("collision penalty and report") {
    Scenario s = testsup::tiny_scenario(2, 1, 1);
    s.d_min = 10.0;
    TrajectorySet q = TrajectorySet::zeros(2, 1);
    q.pos(1, 1) = {0.0, 0.0, 60.0};
    q.pos(2, 1) = {5.0, 0.0, 60.0};
    CHECK(collision_penalty(q, s) == doctest::Approx(0.5).epsilon(1e-9));
    const CollisionReport rep = collision_report(q, s);
    CHECK(rep.violations == 1);
    CHECK(rep.min_distance == doctest::Approx(5.0));

    q.pos(2, 1) = {15.0, 0.0, 60.0};
    CHECK(collision_penalty(q, s) == 0.0);
    CHECK(collision_report(q, s).violations == 0);
}

TEST_CASE("penalties are non-negative under fuzzing and zero when feasible") {
    const Scenario s = testsup::tiny_scenario(2, 2, 6);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const TrajectorySet q = random_traj(s, rng);
        CHECK(speed_penalty(q, s) >= 0.0);
        CHECK(angle_penalty(q, s) >= 0.0);
        CHECK(building_penalty(q, s) >= 0.0);
        CHECK(collision_penalty(q, s) >= 0.0);
    }

    // A slow straight line violates nothing.
    Scenario clean = testsup::tiny_scenario(1, 1, 4);
    const TrajectorySet straight = line({{0.0, 0.0, 70.0},
                                         {5.0, 0.0, 70.0},
                                         {10.0, 0.0, 70.0},
                                         {15.0, 0.0, 70.0}});
    CHECK(speed_penalty(straight, clean) == 0.0);
    CHECK(angle_penalty(straight, clean) == 0.0);
    CHECK(building_penalty(straight, clean) == 0.0);
}

TEST_CASE("fitness combines the terms with the configured weights") {
    Scenario s = testsup::tiny_scenario(1, 1, 2);
    s.v_max = 1.0; // force a speed violation
    const RadioMap map = testsup::flat_map(s, 1e-8);
    const TrajectorySet q = line({{0.0, 0.0, 60.0}, {3.0, 0.0, 60.0}});

    HyperParams h;
    h.k1 = 2.0;
    h.k2 = 0.5;
    h.k3 = 5.0;
    h.k4 = 5.0;
    const FitnessBreakdown fb = fitness(q, s, map, h);
    CHECK(fb.s_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fb.f_value == doctest::Approx(h.k1 * fb.t_value - h.k2 * fb.s_value -
                                        h.k3 * fb.a_value - h.k4 * fb.c_value)
                            .epsilon(1e-12));

    const FitnessBreakdown with_col = fitness(q, s, map, h, 1.5);
    CHECK(with_col.f_value ==
          doctest::Approx(fb.f_value - 1.5 * with_col.col_value).epsilon(1e-12));
}

TEST_CASE("crossover swaps the tail and leaves p_best alone") {
    const int T = 6;
    Particle a;
    a.position = TrajectorySet::zeros(2, T);
    a.velocity = TrajectorySet::zeros(2, T);
    for (int m = 1; m <= 2; ++m)
        for (int t = 1; t <= T; ++t) {
            a.position.pos(m, t) = {double(100 * m + t), 0.0, 0.0};
            a.velocity.pos(m, t) = {double(m), double(t), 0.0};
        }
    a.p_best = a.position;
    Particle b = a;
    for (auto& p : b.position.points) p.x += 1000.0;
    for (auto& v : b.velocity.points) v.y += 50.0;
    b.p_best = b.position;

    const Particle a0 = a;
    const Particle b0 = b;
    crossover_at(a, b, 4);

    for (int m = 1; m <= 2; ++m)
        for (int t = 1; t <= T; ++t) {
            const bool swapped = t >= 4;
            CHECK(a.position.pos(m, t) ==
                  (swapped ? b0.position.pos(m, t) : a0.position.pos(m, t)));
            CHECK(b.position.pos(m, t) ==
                  (swapped ? a0.position.pos(m, t) : b0.position.pos(m, t)));
            // Velocities travel with their position donor.
            CHECK(a.velocity.pos(m, t) ==
                  (swapped ? b0.velocity.pos(m, t) : a0.velocity.pos(m, t)));
        }
    CHECK(a.p_best == a0.p_best);
    CHECK(b.p_best == b0.p_best);
}

TEST_CASE("randomized crossover conserves columns and is identity for T < 3") {
    Particle a;
    a.position = TrajectorySet::zeros(1, 5);
    a.velocity = TrajectorySet::zeros(1, 5);
    for (int t = 1; t <= 5; ++t) a.position.pos(1, t) = {double(t), 1.0, 0.0};
    a.p_best = a.position;
    Particle b = a;
    for (auto& p : b.position.points) p.y = 2.0;
    b.p_best = b.position;

    std::mt19937_64 rng(7);
    const auto before = columns(a, b);
    crossover(a, b, rng);
    CHECK(same_columns(before, columns(a, b)));

    Particle short_a;
    short_a.position = TrajectorySet::zeros(1, 2);
    short_a.velocity = TrajectorySet::zeros(1, 2);
    short_a.position.pos(1, 1) = {1.0, 0.0, 0.0};
    short_a.p_best = short_a.position;
    Particle short_b = short_a;
    short_b.position.pos(1, 1) = {9.0, 0.0, 0.0};
    const Particle sa0 = short_a;
    const Particle sb0 = short_b;
    crossover(short_a, short_b, rng);
    CHECK(short_a.position == sa0.position);
    CHECK(short_b.position == sb0.position);
}

TEST_CASE("mutation is seed-stable, in-box, and leaves p_best alone") {
    const Box3 box{{0.0, 0.0, 60.0}, {40.0, 40.0, 80.0}};
    MutationParams params;
    params.prob = 1.0; // touch everything so the test always has effect

    Particle p;
    p.position = TrajectorySet::zeros(2, 5);
    p.velocity = TrajectorySet::zeros(2, 5);
    for (auto& q : p.position.points) q = {20.0, 20.0, 70.0};
    p.p_best = p.position;
    Particle q = p;

    std::mt19937_64 r1(21);
    std::mt19937_64 r2(21);
    mutate(p, r1, params, box);
    mutate(q, r2, params, box);
    CHECK(p.position == q.position);
    CHECK(p.p_best.pos(1, 1) == Vec3{20.0, 20.0, 70.0});
    for (const auto& pt : p.position.points) CHECK(box.contains(pt));

    // prob = 0 is a no-op that still leaves the generator deterministic.
    Particle z = q;
    MutationParams never;
    never.prob = 0.0;
    std::mt19937_64 r3(5);
    mutate(z, r3, never, box);
    CHECK(z.position == q.position);
}

TEST_CASE("warm start respects speed and the flight box") {
    const Scenario s = testsup::tiny_scenario(2, 3, 6);
    const RadioMap map = testsup::flat_map(s, 1e-8);
    const TrajectorySet w = warm_start(s, map);
    REQUIRE(w.uav_count == 2);
    REQUIRE(w.slot_count == 6);
    const Box3 box = s.grid.bounding_box();
    for (int m = 1; m <= 2; ++m) {
        for (int t = 1; t <= 6; ++t) {
            CHECK(box.contains(w.pos(m, t)));
            CHECK(w.pos(m, t).z == doctest::Approx((s.h_min + s.h_max) / 2.0));
            if (t > 1)
                CHECK(distance(w.pos(m, t), w.pos(m, t - 1)) <= s.v_max * s.tau + 1e-9);
        }
    }
}

TEST_CASE("swarm init pins particle 1 to the warm trajectory") {
    const Scenario s = testsup::tiny_scenario(1, 2, 4);
    const RadioMap map = testsup::flat_map(s, 1e-8);
    const TrajectorySet w = warm_start(s, map);
    HyperParams h;
    h.p_num = 6;
    const SwarmState st = init_swarm(w, s, map, h, 3);
    REQUIRE(st.particles.size() == 6);
    CHECK(st.particles[0].position == w);
    CHECK(st.g_best_fitness > -std::numeric_limits<double>::infinity());
    const Box3 box = s.grid.bounding_box();
    for (const auto& p : st.particles) {
        for (const auto& pt : p.position.points) CHECK(box.contains(pt));
        CHECK(p.p_best == p.position);
    }

    const SwarmState rnd = init_swarm_random(s, map, h, 3);
    REQUIRE(rnd.particles.size() == 6);
    bool differs = false;
    for (const auto& p : rnd.particles)
        if (!(p.position == w)) differs = true;
    CHECK(differs);
}

TEST_CASE("optimizer history grows monotonically with length p_iter + 1") {
    const Scenario s = testsup::tiny_scenario(1, 2, 4);
    const RadioMap map = RadioMap::synthesize(s, 17);
    HyperParams h;
    h.p_num = 8;
    const int p_iter = 6;
    const OptimizationResult res = run_ws_pso_cm(s, map, h, p_iter, 11);
    REQUIRE(res.history.size() == static_cast<std::size_t>(p_iter) + 1);
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i] >= res.history[i - 1]);
    CHECK(res.best.f_value == doctest::Approx(res.history.back()));
    CHECK(res.evaluations == 8 + 2LL * 8 * p_iter + 1);

    const OptimizationResult none = run_ws_pso_cm(s, map, h, 0, 11);
    CHECK(none.history.size() == 1);
    CHECK(none.evaluations == 8 + 1);
}

TEST_CASE("identical runs are bitwise identical, different seeds differ") {
    const Scenario s = testsup::tiny_scenario(1, 2, 4);
    const RadioMap map = RadioMap::synthesize(s, 23);
    HyperParams h;
    h.p_num = 10;
    const OptimizationResult a = run_ws_pso_cm(s, map, h, 5, 42);
    const OptimizationResult b = run_ws_pso_cm(s, map, h, 5, 42);
    CHECK(a.g_best == b.g_best);
    CHECK(a.history == b.history);
    CHECK(a.best.f_value == b.best.f_value);

    const OptimizationResult c = run_ws_pso_cm(s, map, h, 5, 43);
    CHECK(a.history != c.history);
}

TEST_CASE("baseline presets carry their published values") {
    const HyperParams b1 = baseline1();
    CHECK(b1.p_num == 100);
    CHECK(b1.omega == 0.5);
    CHECK(b1.c1 == 2.0);
    CHECK(b1.c2 == 2.0);
    CHECK(b1.k1 == 2.0);
    CHECK(b1.k2 == 0.5);
    CHECK(b1.k3 == 5.0);
    CHECK(b1.k4 == 5.0);

    const HyperParams b2 = baseline2();
    CHECK(b2.p_num == 58);
    CHECK(b2.omega == 0.8765);
    CHECK(b2.c1 == 5.4321);
    CHECK(b2.c2 == 9.8765);
    CHECK(b2.k1 == 3.7284);
    CHECK(b2.k2 == 8.1235);
    CHECK(b2.k3 == 1.9823);
    CHECK(b2.k4 == 6.5432);
}

TEST_CASE("hyper-parameter validation names the failing field") {
    HyperParams h;
    h.p_num = 0;
    CHECK_THROWS_WITH_AS(h.validate(), doctest::Contains("p_num"), ValidationError);
    h = HyperParams{};
    h.omega = -0.1;
    CHECK_THROWS_WITH_AS(h.validate(), doctest::Contains("omega"), ValidationError);
    h = HyperParams{};
    h.k2 = -1.0;
    CHECK_THROWS_WITH_AS(h.validate(), doctest::Contains("k2"), ValidationError);
    CHECK_NOTHROW(HyperParams{}.validate());
}

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "wspso/errors.hpp"
#include "wspso/radio_map.hpp"
#include "test_support.hpp"

using namespace wspso;

namespace {

PropagationModel bare_model() {
    PropagationModel m;
    m.shadowing_db = 0.0; // deterministic distance law only
    return m;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("same seed gives identical gains, different seed differs somewhere") {
    const Scenario s = testsup::tiny_scenario(1, 2, 3);
    const RadioMap a = RadioMap::synthesize(s, 9);
    const RadioMap b = RadioMap::synthesize(s, 9);
    const RadioMap c = RadioMap::synthesize(s, 10);
    bool any_diff = false;
    for (int n = 1; n <= 2; ++n)
        for (int t = 1; t <= 3; ++t)
            for (int x = 1; x <= s.grid.nx; ++x)
                for (int y = 1; y <= s.grid.ny; ++y)
                    for (int z = 1; z <= s.grid.nz; ++z) {
                        const VoxelIndex idx{x, y, z};
                        CHECK(a.gain(n, t, idx) == b.gain(n, t, idx));
                        if (a.gain(n, t, idx) != c.gain(n, t, idx)) any_diff = true;
                    }
    CHECK(any_diff);
}

TEST_CASE("gains live in (0, 1]") {
    const Scenario s = testsup::tiny_scenario(1, 2, 3);
    const RadioMap m = RadioMap::synthesize(s, 4);
    for (int n = 1; n <= 2; ++n)
        for (int x = 1; x <= s.grid.nx; ++x)
            for (int z = 1; z <= s.grid.nz; ++z) {
                const double g = m.gain(n, 2, {x, 3, z});
                CHECK(g > 0.0);
                CHECK(g <= 1.0);
            }
}

TEST_CASE("without shadowing, gain follows the distance law exactly") {
    Scenario s = testsup::tiny_scenario(1, 1, 2);
    s.ugv_paths[0].speed = 0.0;
    s.ugv_paths[0].waypoints = {{2.5, 2.5, 0.0}}; // center of voxel (1,1,*)
    const PropagationModel model = bare_model();
    const RadioMap m = RadioMap::synthesize(s, model, 1);

    const Vec3 tx{2.5, 2.5, 0.0};
    const Vec3 p = voxel_center(s.grid, {5, 1, 2});
    const double d = distance(p, tx);
    const double expect = model.ref_gain * std::pow(d, -model.exponent);
    CHECK(m.gain(1, 1, {5, 1, 2}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("doubling the distance scales gain by 2^-2.7") {
    Scenario s = testsup::tiny_scenario(1, 1, 1);
    // Drop the grid floor so the first voxel layer is centered on the ground
    // plane; the transmitter then sees purely horizontal distances.
    s.grid = {0.0, 0.0, -2.5, 5.0, 32, 2, 2};
    s.h_min = s.grid.h_min;
    s.h_max = s.grid.h_max();
    s.ugv_paths[0].speed = 0.0;
    s.ugv_paths[0].waypoints = {{2.5, 2.5, 0.0}};
    const RadioMap m = RadioMap::synthesize(s, bare_model(), 1);

    // Voxel centers along +x at z of the transmitter: distances 10 and 20.
    const double g1 = m.gain(1, 1, {3, 1, 1});
    const double g2 = m.gain(1, 1, {5, 1, 1});
    CHECK(g2 / g1 == doctest::Approx(std::pow(2.0, -2.7)).epsilon(1e-12));
    CHECK(std::pow(2.0, -2.7) == doctest::Approx(0.15389).epsilon(1e-4));
}

TEST_CASE("the transmitter's own voxel reports the reference gain") {
    Scenario s = testsup::tiny_scenario(1, 1, 1);
    s.grid = {0.0, 0.0, 0.0, 5.0, 4, 4, 2};
    s.h_min = 0.0;
    s.h_max = s.grid.h_max();
    s.ugv_paths[0].speed = 0.0;
    s.ugv_paths[0].waypoints = {{3.9, 1.2, 0.0}}; // off-center on purpose
    const RadioMap m = RadioMap::synthesize(s, bare_model(), 5);
    CHECK(m.gain(1, 1, {1, 1, 1}) == 1e-4);
}

TEST_CASE("a blocking building multiplies the gain by the blockage loss") {
    Scenario s = testsup::tiny_scenario(1, 1, 1);
    s.grid = {0.0, 0.0, 0.0, 5.0, 32, 2, 2};
    s.h_min = 0.0;
    s.h_max = s.grid.h_max();
    s.ugv_paths[0].speed = 0.0;
    s.ugv_paths[0].waypoints = {{2.5, 2.5, 0.0}};

    Scenario blocked = s;
    blocked.buildings.push_back({{20.0, 0.0, 30.0, 10.0}, 9.0}); // spans the ray
    const RadioMap clear = RadioMap::synthesize(s, bare_model(), 2);
    const RadioMap shadowed = RadioMap::synthesize(blocked, bare_model(), 2);

    const VoxelIndex far{8, 1, 1}; // center x = 37.5, beyond the slab
    CHECK(shadowed.gain(1, 1, far) ==
          doctest::Approx(clear.gain(1, 1, far) * 1e-2).epsilon(1e-12));
    const VoxelIndex near{2, 1, 1}; // center x = 7.5, before the slab
    CHECK(shadowed.gain(1, 1, near) == doctest::Approx(clear.gain(1, 1, near)));
}

TEST_CASE("shadowing perturbs the distance law but stays seed-stable") {
    Scenario s = testsup::tiny_scenario(1, 1, 1);
    s.ugv_paths[0].speed = 0.0;
    s.ugv_paths[0].waypoints = {{2.5, 2.5, 0.0}};
    const RadioMap plain = RadioMap::synthesize(s, bare_model(), 3);
    const RadioMap rough = RadioMap::synthesize(s, 3); // default 4 dB shadowing
    bool any_diff = false;
    for (int x = 1; x <= s.grid.nx; ++x)
        if (rough.gain(1, 1, {x, 4, 2}) != plain.gain(1, 1, {x, 4, 2})) any_diff = true;
    CHECK(any_diff);
    const RadioMap rough2 = RadioMap::synthesize(s, 3);
    CHECK(rough.gain(1, 1, {7, 4, 2}) == rough2.gain(1, 1, {7, 4, 2}));
}

TEST_CASE("gain_at resolves the containing voxel") {
    const Scenario s = testsup::tiny_scenario(1, 1, 2);
    const RadioMap m = RadioMap::synthesize(s, 8);
    const Vec3 p{11.0, 22.0, 71.0};
    CHECK(m.gain_at(1, 2, p) == m.gain(1, 2, index_of(s.grid, p)));
    CHECK_THROWS_AS(m.gain(0, 1, {1, 1, 1}), DomainError);
    CHECK_THROWS_AS(m.gain(1, 3, {1, 1, 1}), DomainError);
    CHECK_THROWS_AS(m.gain(1, 1, {9, 1, 1}), DomainError);
}

TEST_CASE("from_gains validates shape and range") {
    const Scenario s = testsup::tiny_scenario(1, 1, 1);
    CHECK_THROWS_AS(RadioMap::from_gains(s.grid, 1, 2, {}), DomainError);
    std::vector<std::vector<double>> bad(1, std::vector<double>(3, 0.5));
    CHECK_THROWS_AS(RadioMap::from_gains(s.grid, 1, 1, bad), DomainError);
    std::vector<std::vector<double>> neg(
        1, std::vector<double>(s.grid.voxel_count(), -0.1));
    CHECK_THROWS_AS(RadioMap::from_gains(s.grid, 1, 1, neg), DomainError);
}

TEST_CASE("snapshot save/load round-trips every gain") {
    const Scenario s = testsup::tiny_scenario(2, 2, 2);
    const RadioMap m = RadioMap::synthesize(s, 12);
    const std::string path = temp_path("wspso_map_roundtrip.rmap");
    m.save(path);
    const RadioMap back = RadioMap::load(path);
    CHECK(back.ugv_count() == 2);
    CHECK(back.slot_count() == 2);
    CHECK(back.grid().nx == s.grid.nx);
    for (int n = 1; n <= 2; ++n)
        for (int t = 1; t <= 2; ++t)
            for (int x = 1; x <= s.grid.nx; x += 3)
                for (int y = 1; y <= s.grid.ny; y += 3)
                    for (int z = 1; z <= s.grid.nz; ++z)
                        CHECK(back.gain(n, t, {x, y, z}) == m.gain(n, t, {x, y, z}));
    std::remove(path.c_str());
    CHECK_THROWS_AS(RadioMap::load(path), IoError);
}

TEST_CASE("clone answers identically for both map kinds") {
    const Scenario s = testsup::tiny_scenario(1, 2, 2);
    const RadioMap synth = RadioMap::synthesize(s, 6);
    const RadioMap synth_copy = synth.clone();
    CHECK(synth_copy.gain(2, 1, {4, 4, 2}) == synth.gain(2, 1, {4, 4, 2}));

    const RadioMap data = testsup::flat_map(s, 1e-6);
    const RadioMap data_copy = data.clone();
    CHECK(data_copy.gain(1, 2, {1, 1, 1}) == 1e-6);
}

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "wspso/geometry.hpp"

namespace wspso {

/// Voxelized flight volume. Indices are 1-based, matching slot indices.
struct VoxelGrid {
    double x_min = 0.0;
    double y_min = 0.0;
    double h_min = 0.0; ///< grid floor; also the minimum flight altitude
    double delta = 1.0; ///< cubic cell edge, meters
    int nx = 1;
    int ny = 1;
    int nz = 1;

    double x_max() const { return x_min + delta * nx; }
    double y_max() const { return y_min + delta * ny; }
    double h_max() const { return h_min + delta * nz; }
    Box3 bounding_box() const { return {{x_min, y_min, h_min}, {x_max(), y_max(), h_max()}}; }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
};

/// 1-based voxel index triple.
struct VoxelIndex {
    int x = 1;
    int y = 1;
    int z = 1;
    bool operator==(const VoxelIndex& o) const { return x == o.x && y == o.y && z == o.z; }
};

/// Map an in-volume position to its voxel index. Positions exactly on the
/// upper faces fall into the last cell. Throws DomainError naming the
/// offending axis for anything outside the volume.
VoxelIndex index_of(const VoxelGrid& grid, const Vec3& position);

/// Center of a voxel in world coordinates.
Vec3 voxel_center(const VoxelGrid& grid, const VoxelIndex& idx);

struct Building {
    Rect2 footprint; ///< meters, axis-aligned
    double height = 0.0;

    Box3 solid() const {
        return {{footprint.x0, footprint.y0, 0.0}, {footprint.x1, footprint.y1, height}};
    }
};

/// Ground vehicle route: piecewise-linear waypoints traversed at constant
/// speed, clamped at the final waypoint. All waypoints are at z = 0.
struct UgvPath {
    std::vector<Vec3> waypoints;
    double speed = 0.0; ///< m/s
};

/// Static problem description. All stored values are SI (meters, seconds,
/// watts); rates are bps/Hz. The on-disk format uses km/h and dBm, converted
/// on load (see docs/formats.md).
struct Scenario {
    int uav_count = 0;   ///< M
    int ugv_count = 0;   ///< N
    int slot_count = 0;  ///< T
    double tau = 1.0;    ///< seconds per slot
    double v_max = 0.0;  ///< m/s
    double theta_max = 0.0; ///< radians
    double h_min = 0.0;  ///< mirrors grid.h_min
    double h_max = 0.0;
    double d_min = 0.0;  ///< inter-UAV separation floor, meters
    double r_min = 0.0;  ///< QoS rate floor, bps/Hz
    double p_max = 0.0;  ///< watts
    double n0 = 0.0;     ///< AWGN power, watts
    VoxelGrid grid;
    std::vector<Building> buildings;
    std::vector<UgvPath> ugv_paths;

    /// Verbatim file-unit values, kept so serialization round-trips exactly.
    struct FileUnits {
        double v_max_kmh = 0.0;
        double theta_max_deg = 0.0;
        double p_max_dbm = 0.0;
        double noise_dbm = 0.0;
        std::vector<double> ugv_speed_kmh;
    } file_units;

    /// Check every invariant; throws ValidationError naming the field.
    void validate() const;
};

bool operator==(const Scenario& a, const Scenario& b);

/// Load and validate a scenario file.
Scenario load_scenario(const std::string& path);

/// Parse and validate scenario text (same schema as the file).
Scenario scenario_from_string(const std::string& text);

/// Serialize back to file-format text; load(serialize(s)) == s.
std::string scenario_to_string(const Scenario& s);

void save_scenario(const Scenario& s, const std::string& path);

/// Position of UGV n (1-based) at slot t (1-based, t=1 is the start).
Vec3 ugv_position(const Scenario& s, int n, int t);

} // namespace wspso

// SPDX-License-Identifier: Apache-2.0
#include "wspso/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "toml_lite.hpp"
#include "wspso/errors.hpp"

namespace wspso {

namespace {

double kmh_to_ms(double kmh) { return kmh / 3.6; }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double ms_to_kmh(double ms) { return ms * 3.6; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

/// Shortest decimal form that parses back to the same double.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int axis_index(double v, double lo, double delta, int n, const char* axis) {
    const double hi = lo + delta * n;
    if (!(v >= lo && v <= hi)) {
        throw DomainError(std::string("position ") + axis + "=" + fmt(v) + " outside [" +
                          fmt(lo) + ", " + fmt(hi) + "]");
    }
    int i = static_cast<int>(std::floor((v - lo) / delta)) + 1;
    if (i > n) i = n; // exact upper face belongs to the last cell
    if (i < 1) i = 1;
    return i;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ValidationError(field, field + ": " + what);
}

} // namespace

VoxelIndex index_of(const VoxelGrid& grid, const Vec3& position) {
    return {axis_index(position.x, grid.x_min, grid.delta, grid.nx, "x"),
            axis_index(position.y, grid.y_min, grid.delta, grid.ny, "y"),
            axis_index(position.z, grid.h_min, grid.delta, grid.nz, "z")};
}

Vec3 voxel_center(const VoxelGrid& grid, const VoxelIndex& idx) {
    if (idx.x < 1 || idx.x > grid.nx) throw DomainError("voxel index x=" + std::to_string(idx.x) + " outside [1, " + std::to_string(grid.nx) + "]");
    if (idx.y < 1 || idx.y > grid.ny) throw DomainError("voxel index y=" + std::to_string(idx.y) + " outside [1, " + std::to_string(grid.ny) + "]");
    if (idx.z < 1 || idx.z > grid.nz) throw DomainError("voxel index z=" + std::to_string(idx.z) + " outside [1, " + std::to_string(grid.nz) + "]");
    return {grid.x_min + (idx.x - 0.5) * grid.delta, grid.y_min + (idx.y - 0.5) * grid.delta,
            grid.h_min + (idx.z - 0.5) * grid.delta};
}

void Scenario::validate() const {
    if (uav_count < 1) bad("uav_count", "must be >= 1");
    if (ugv_count < 1) bad("ugv_count", "must be >= 1");
    if (slot_count < 1) bad("slot_count", "must be >= 1");
    if (!(tau > 0.0) || !std::isfinite(tau)) bad("slot_seconds", "must be finite and > 0");
    if (!(v_max > 0.0) || !std::isfinite(v_max)) bad("uav_v_max_kmh", "must be finite and > 0");
    if (!(theta_max > 0.0) || theta_max > std::numbers::pi)
        bad("uav_theta_max_deg", "must be in (0, 180]");
    if (d_min < 0.0 || !std::isfinite(d_min)) bad("uav_d_min_m", "must be finite and >= 0");
    if (r_min < 0.0 || !std::isfinite(r_min)) bad("qos_r_min", "must be finite and >= 0");
    if (!(p_max > 0.0) || !std::isfinite(p_max)) bad("uav_p_max_dbm", "must give power > 0");
    if (!(n0 > 0.0) || !std::isfinite(n0)) bad("noise_dbm", "must give power > 0");
    if (!(grid.delta > 0.0) || !std::isfinite(grid.delta)) bad("grid.delta", "must be finite and > 0");
    if (grid.nx < 1) bad("grid.nx", "must be >= 1");
    if (grid.ny < 1) bad("grid.ny", "must be >= 1");
    if (grid.nz < 1) bad("grid.nz", "must be >= 1");
    if (h_min != grid.h_min) bad("h_min", "must equal grid.h_min");
    if (h_max != grid.h_max()) bad("h_max", "must equal the grid ceiling");
    for (std::size_t i = 0; i < buildings.size(); ++i) {
        const auto label = "building[" + std::to_string(i) + "]";
        const Rect2& f = buildings[i].footprint;
        if (!(f.x0 < f.x1) || !(f.y0 < f.y1)) bad(label + ".footprint", "must have x0 < x1 and y0 < y1");
        if (!(buildings[i].height > 0.0)) bad(label + ".height", "must be > 0");
    }
    if (static_cast<int>(ugv_paths.size()) != ugv_count)
        bad("ugv", "need exactly ugv_count route entries, got " + std::to_string(ugv_paths.size()));
    for (std::size_t i = 0; i < ugv_paths.size(); ++i) {
        const auto label = "ugv[" + std::to_string(i) + "]";
        if (ugv_paths[i].waypoints.empty()) bad(label + ".waypoints", "must have at least one waypoint");
        if (ugv_paths[i].speed < 0.0 || !std::isfinite(ugv_paths[i].speed))
            bad(label + ".speed_kmh", "must be finite and >= 0");
        for (const Vec3& w : ugv_paths[i].waypoints)
            if (w.z != 0.0) bad(label + ".waypoints", "must lie on the ground plane");
    }
    if (!file_units.ugv_speed_kmh.empty() &&
        file_units.ugv_speed_kmh.size() != ugv_paths.size())
        bad("ugv", "speed_kmh list does not match route count");
}

bool operator==(const Scenario& a, const Scenario& b) {
    auto grid_eq = [](const VoxelGrid& g, const VoxelGrid& h) {
        return g.x_min == h.x_min && g.y_min == h.y_min && g.h_min == h.h_min &&
               g.delta == h.delta && g.nx == h.nx && g.ny == h.ny && g.nz == h.nz;
    };
    auto bld_eq = [](const Building& p, const Building& q) {
        return p.footprint.x0 == q.footprint.x0 && p.footprint.y0 == q.footprint.y0 &&
               p.footprint.x1 == q.footprint.x1 && p.footprint.y1 == q.footprint.y1 &&
               p.height == q.height;
    };
    auto path_eq = [](const UgvPath& p, const UgvPath& q) {
        return p.speed == q.speed && p.waypoints == q.waypoints;
    };
    if (!(a.uav_count == b.uav_count && a.ugv_count == b.ugv_count &&
          a.slot_count == b.slot_count && a.tau == b.tau && a.v_max == b.v_max &&
          a.theta_max == b.theta_max && a.h_min == b.h_min && a.h_max == b.h_max &&
          a.d_min == b.d_min && a.r_min == b.r_min && a.p_max == b.p_max && a.n0 == b.n0 &&
          grid_eq(a.grid, b.grid)))
        return false;
    if (a.buildings.size() != b.buildings.size() || a.ugv_paths.size() != b.ugv_paths.size())
        return false;
    for (std::size_t i = 0; i < a.buildings.size(); ++i)
        if (!bld_eq(a.buildings[i], b.buildings[i])) return false;
    for (std::size_t i = 0; i < a.ugv_paths.size(); ++i)
        if (!path_eq(a.ugv_paths[i], b.ugv_paths[i])) return false;
    return a.file_units.v_max_kmh == b.file_units.v_max_kmh &&
           a.file_units.theta_max_deg == b.file_units.theta_max_deg &&
           a.file_units.p_max_dbm == b.file_units.p_max_dbm &&
           a.file_units.noise_dbm == b.file_units.noise_dbm &&
           a.file_units.ugv_speed_kmh == b.file_units.ugv_speed_kmh;
}

Scenario scenario_from_string(const std::string& text) {
    const toml::Table root = toml::parse(text);
    Scenario s;
    s.uav_count = static_cast<int>(toml::require_integer(root, "uav_count"));
    s.ugv_count = static_cast<int>(toml::require_integer(root, "ugv_count"));
    s.slot_count = static_cast<int>(toml::require_integer(root, "slot_count"));
    s.tau = toml::require_number(root, "slot_seconds");
    s.file_units.v_max_kmh = toml::require_number(root, "uav_v_max_kmh");
    s.file_units.theta_max_deg = toml::require_number(root, "uav_theta_max_deg");
    s.d_min = toml::require_number(root, "uav_d_min_m");
    s.r_min = toml::require_number(root, "qos_r_min");
    s.file_units.p_max_dbm = toml::require_number(root, "uav_p_max_dbm");
    s.file_units.noise_dbm = toml::require_number(root, "noise_dbm");
    s.v_max = kmh_to_ms(s.file_units.v_max_kmh);
    s.theta_max = deg_to_rad(s.file_units.theta_max_deg);
    s.p_max = dbm_to_watts(s.file_units.p_max_dbm);
    s.n0 = dbm_to_watts(s.file_units.noise_dbm);

    const toml::Value& grid = toml::require(root, "grid");
    if (!grid.is_table()) throw ParseError("key 'grid' must be a table");
    s.grid.x_min = toml::require_number(grid.tbl, "x_min");
    s.grid.y_min = toml::require_number(grid.tbl, "y_min");
    s.grid.h_min = toml::require_number(grid.tbl, "h_min");
    s.grid.delta = toml::require_number(grid.tbl, "delta");
    s.grid.nx = static_cast<int>(toml::require_integer(grid.tbl, "nx"));
    s.grid.ny = static_cast<int>(toml::require_integer(grid.tbl, "ny"));
    s.grid.nz = static_cast<int>(toml::require_integer(grid.tbl, "nz"));
    s.h_min = s.grid.h_min;
    s.h_max = s.grid.h_max();

    if (const auto it = root.find("building"); it != root.end()) {
        for (const toml::Table& b : it->second.tables) {
            const toml::Array& f = toml::require_array(b, "footprint");
            if (f.size() != 4) throw ParseError("key 'footprint' must be [x0, y0, x1, y1]");
            for (const toml::Value& v : f)
                if (!v.is_number()) throw ParseError("key 'footprint' must hold numbers");
            Building bld;
            bld.footprint = {f[0].number, f[1].number, f[2].number, f[3].number};
            bld.height = toml::require_number(b, "height");
            s.buildings.push_back(bld);
        }
    }

    if (const auto it = root.find("ugv"); it != root.end()) {
        for (const toml::Table& u : it->second.tables) {
            UgvPath path;
            const double kmh = toml::require_number(u, "speed_kmh");
            s.file_units.ugv_speed_kmh.push_back(kmh);
            path.speed = kmh_to_ms(kmh);
            const toml::Array& pts = toml::require_array(u, "waypoints");
            for (const toml::Value& p : pts) {
                if (!p.is_array() || p.arr.size() != 2 || !p.arr[0].is_number() ||
                    !p.arr[1].is_number())
                    throw ParseError("key 'waypoints' must hold [x, y] pairs");
                path.waypoints.push_back({p.arr[0].number, p.arr[1].number, 0.0});
            }
            s.ugv_paths.push_back(std::move(path));
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_string(buf.str());
}

std::string scenario_to_string(const Scenario& s) {
    // Fall back to unit values derived from SI when the scenario was built
    // programmatically rather than loaded.
    Scenario::FileUnits u = s.file_units;
    if (u.ugv_speed_kmh.size() != s.ugv_paths.size()) {
        u.v_max_kmh = ms_to_kmh(s.v_max);
        u.theta_max_deg = rad_to_deg(s.theta_max);
        u.p_max_dbm = watts_to_dbm(s.p_max);
        u.noise_dbm = watts_to_dbm(s.n0);
        u.ugv_speed_kmh.clear();
        for (const UgvPath& p : s.ugv_paths) u.ugv_speed_kmh.push_back(ms_to_kmh(p.speed));
    }

    std::ostringstream out;
    out << "# Multi-vehicle relay scenario. Lengths in meters, speeds in km/h,\n"
           "# powers in dBm, rates in bps/Hz.\n";
    out << "uav_count = " << s.uav_count << "\n";
    out << "ugv_count = " << s.ugv_count << "\n";
    out << "slot_count = " << s.slot_count << "\n";
    out << "slot_seconds = " << fmt(s.tau) << "\n";
    out << "uav_v_max_kmh = " << fmt(u.v_max_kmh) << "\n";
    out << "uav_theta_max_deg = " << fmt(u.theta_max_deg) << "\n";
    out << "uav_d_min_m = " << fmt(s.d_min) << "\n";
    out << "qos_r_min = " << fmt(s.r_min) << "\n";
    out << "uav_p_max_dbm = " << fmt(u.p_max_dbm) << "\n";
    out << "noise_dbm = " << fmt(u.noise_dbm) << "\n";
    out << "\n[grid]\n";
    out << "x_min = " << fmt(s.grid.x_min) << "\n";
    out << "y_min = " << fmt(s.grid.y_min) << "\n";
    out << "h_min = " << fmt(s.grid.h_min) << "\n";
    out << "delta = " << fmt(s.grid.delta) << "\n";
    out << "nx = " << s.grid.nx << "\n";
    out << "ny = " << s.grid.ny << "\n";
    out << "nz = " << s.grid.nz << "\n";
    for (const Building& b : s.buildings) {
        out << "\n[[building]]\n";
        out << "footprint = [" << fmt(b.footprint.x0) << ", " << fmt(b.footprint.y0) << ", "
            << fmt(b.footprint.x1) << ", " << fmt(b.footprint.y1) << "]\n";
        out << "height = " << fmt(b.height) << "\n";
    }
    for (std::size_t i = 0; i < s.ugv_paths.size(); ++i) {
        out << "\n[[ugv]]\n";
        out << "speed_kmh = " << fmt(u.ugv_speed_kmh[i]) << "\n";
        out << "waypoints = [";
        const auto& pts = s.ugv_paths[i].waypoints;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j) out << ", ";
            out << "[" << fmt(pts[j].x) << ", " << fmt(pts[j].y) << "]";
        }
        out << "]\n";
    }
    return out.str();
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write scenario file '" + path + "'");
    out << scenario_to_string(s);
    if (!out) throw IoError("write failed for scenario file '" + path + "'");
}

Vec3 ugv_position(const Scenario& s, int n, int t) {
    if (n < 1 || n > s.ugv_count)
        throw DomainError("ugv index " + std::to_string(n) + " outside [1, " +
                          std::to_string(s.ugv_count) + "]");
    if (t < 1 || t > s.slot_count)
        throw DomainError("slot index " + std::to_string(t) + " outside [1, " +
                          std::to_string(s.slot_count) + "]");
    const UgvPath& path = s.ugv_paths[static_cast<std::size_t>(n - 1)];
    double remaining = path.speed * s.tau * (t - 1);
    Vec3 pos = path.waypoints.front();
    for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        const Vec3& a = path.waypoints[i];
        const Vec3& b = path.waypoints[i + 1];
        const double seg = distance(a, b);
        if (seg <= 0.0) continue;
        if (remaining <= seg) return a + (b - a) * (remaining / seg);
        remaining -= seg;
        pos = b;
    }
    return pos; // route exhausted; the vehicle waits at the final waypoint
}

} // namespace wspso

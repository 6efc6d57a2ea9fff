// SPDX-License-Identifier: Apache-2.0
#include "wspso/radio_map.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "wspso/errors.hpp"
#include "wspso/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "map snapshots are little-endian; big-endian hosts are unsupported");

namespace wspso {

namespace {

std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

double lattice_gaussian(std::uint64_t seed, std::int64_t i, std::int64_t j, std::int64_t k) {
    std::uint64_t h = hash_combine(seed, zigzag(i));
    h = hash_combine(h, zigzag(j));
    h = hash_combine(h, zigzag(k));
    return hash_to_gaussian(h, 0);
}

/// Value noise: trilinear blend of unit gaussians pinned to a world-space
/// lattice. Continuous in space, order-independent, seed-deterministic.
double shadow_field(std::uint64_t seed, const Vec3& p, double cell) {
    const double fx = p.x / cell;
    const double fy = p.y / cell;
    const double fz = p.z / cell;
    const auto ix = static_cast<std::int64_t>(std::floor(fx));
    const auto iy = static_cast<std::int64_t>(std::floor(fy));
    const auto iz = static_cast<std::int64_t>(std::floor(fz));
    const double ax = fx - static_cast<double>(ix);
    const double ay = fy - static_cast<double>(iy);
    const double az = fz - static_cast<double>(iz);
    double acc = 0.0;
    for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy)
            for (int dz = 0; dz < 2; ++dz) {
                const double w = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay) *
                                 (dz ? az : 1.0 - az);
                if (w == 0.0) continue;
                acc += w * lattice_gaussian(seed, ix + dx, iy + dy, iz + dz);
            }
    return acc;
}

std::size_t voxel_offset(const VoxelGrid& g, const VoxelIndex& idx) {
    return (static_cast<std::size_t>(idx.x - 1) * g.ny + (idx.y - 1)) * g.nz + (idx.z - 1);
}

void check_slot(int n, int t, int ugv_count, int slot_count) {
    if (n < 1 || n > ugv_count)
        throw DomainError("ugv index " + std::to_string(n) + " outside [1, " +
                          std::to_string(ugv_count) + "]");
    if (t < 1 || t > slot_count)
        throw DomainError("slot index " + std::to_string(t) + " outside [1, " +
                          std::to_string(slot_count) + "]");
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_raw(std::ifstream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError(std::string("map snapshot truncated while reading ") + what);
    return v;
}

} // namespace

RadioMap RadioMap::synthesize(const Scenario& s, const PropagationModel& model,
                              std::uint64_t seed) {
    s.validate();
    RadioMap m;
    m.grid_ = s.grid;
    m.ugv_count_ = s.ugv_count;
    m.slot_count_ = s.slot_count;
    m.synthetic_ = true;
    m.model_ = model;
    m.seed_ = seed;
    m.buildings_ = s.buildings;
    m.tx_positions_.reserve(static_cast<std::size_t>(s.ugv_count) * s.slot_count);
    for (int n = 1; n <= s.ugv_count; ++n)
        for (int t = 1; t <= s.slot_count; ++t) m.tx_positions_.push_back(ugv_position(s, n, t));
    m.slices_ = std::make_unique<std::vector<Slice>>(
        static_cast<std::size_t>(s.ugv_count) * s.slot_count);
    return m;
}

RadioMap RadioMap::from_gains(const VoxelGrid& grid, int ugv_count, int slot_count,
                              std::vector<std::vector<double>> slices) {
    if (ugv_count < 1) throw DomainError("ugv_count must be >= 1");
    if (slot_count < 1) throw DomainError("slot_count must be >= 1");
    const auto expected = static_cast<std::size_t>(ugv_count) * slot_count;
    if (slices.size() != expected)
        throw DomainError("need " + std::to_string(expected) + " slices, got " +
                          std::to_string(slices.size()));
    RadioMap m;
    m.grid_ = grid;
    m.ugv_count_ = ugv_count;
    m.slot_count_ = slot_count;
    m.slices_ = std::make_unique<std::vector<Slice>>(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        if (slices[i].size() != grid.voxel_count())
            throw DomainError("slice " + std::to_string(i) + " has " +
                              std::to_string(slices[i].size()) + " gains, expected " +
                              std::to_string(grid.voxel_count()));
        for (double g : slices[i])
            if (!(g > 0.0) || !(g <= 1.0) || !std::isfinite(g))
                throw DomainError("slice " + std::to_string(i) +
                                  " holds a gain outside (0, 1]");
        (*m.slices_)[i].gains = std::move(slices[i]);
    }
    return m;
}

RadioMap RadioMap::clone() const {
    RadioMap m;
    m.grid_ = grid_;
    m.ugv_count_ = ugv_count_;
    m.slot_count_ = slot_count_;
    m.synthetic_ = synthetic_;
    m.model_ = model_;
    m.seed_ = seed_;
    m.tx_positions_ = tx_positions_;
    m.buildings_ = buildings_;
    m.slices_ = std::make_unique<std::vector<Slice>>(slices_->size());
    if (!synthetic_)
        for (std::size_t i = 0; i < slices_->size(); ++i)
            (*m.slices_)[i].gains = (*slices_)[i].gains;
    return m;
}

double RadioMap::compute_gain(const Vec3& center, const Vec3& tx, bool same_voxel) const {
    const PropagationModel& m = model_;
    double d = same_voxel ? 0.0 : distance(center, tx);
    if (d < m.ref_distance) d = m.ref_distance;
    double g = m.ref_gain * std::pow(d / m.ref_distance, -m.exponent);
    if (!same_voxel) {
        for (const Building& b : buildings_)
            if (segment_intersects_box(center, tx, b.solid())) g *= m.blockage_loss;
    }
    if (m.shadowing_db != 0.0) {
        const double sd = m.shadowing_db * shadow_field(seed_, center, m.shadow_cell);
        g *= std::pow(10.0, sd / 10.0);
    }
    if (g > 1.0) g = 1.0;
    return g;
}

void RadioMap::materialize(Slice& s, int n, int t) const {
    s.gains.resize(grid_.voxel_count());
    const Vec3 tx = tx_positions_[static_cast<std::size_t>(n - 1) * slot_count_ + (t - 1)];
    const bool tx_in_grid = grid_.bounding_box().contains(tx);
    VoxelIndex tx_idx;
    if (tx_in_grid) tx_idx = index_of(grid_, tx);
    std::size_t i = 0;
    for (int x = 1; x <= grid_.nx; ++x)
        for (int y = 1; y <= grid_.ny; ++y)
            for (int z = 1; z <= grid_.nz; ++z, ++i) {
                const VoxelIndex idx{x, y, z};
                const bool same = tx_in_grid && idx == tx_idx;
                s.gains[i] = compute_gain(voxel_center(grid_, idx), tx, same);
            }
}

const std::vector<double>& RadioMap::slice(int n, int t) const {
    check_slot(n, t, ugv_count_, slot_count_);
    Slice& s = (*slices_)[static_cast<std::size_t>(n - 1) * slot_count_ + (t - 1)];
    std::call_once(s.once, [&] {
        if (synthetic_) materialize(s, n, t);
    });
    return s.gains;
}

double RadioMap::gain(int n, int t, const VoxelIndex& idx) const {
    if (idx.x < 1 || idx.x > grid_.nx || idx.y < 1 || idx.y > grid_.ny || idx.z < 1 ||
        idx.z > grid_.nz)
        throw DomainError("voxel index (" + std::to_string(idx.x) + ", " +
                          std::to_string(idx.y) + ", " + std::to_string(idx.z) +
                          ") outside the grid");
    return slice(n, t)[voxel_offset(grid_, idx)];
}

double RadioMap::gain_at(int n, int t, const Vec3& position) const {
    return gain(n, t, index_of(grid_, position));
}

void RadioMap::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write map snapshot '" + path + "'");
    out.write("RMAP", 4);
    write_raw(out, std::uint32_t{1});
    write_raw(out, grid_.x_min);
    write_raw(out, grid_.y_min);
    write_raw(out, grid_.h_min);
    write_raw(out, grid_.delta);
    write_raw(out, static_cast<std::uint32_t>(grid_.nx));
    write_raw(out, static_cast<std::uint32_t>(grid_.ny));
    write_raw(out, static_cast<std::uint32_t>(grid_.nz));
    write_raw(out, static_cast<std::uint32_t>(ugv_count_));
    write_raw(out, static_cast<std::uint32_t>(slot_count_));
    for (int n = 1; n <= ugv_count_; ++n)
        for (int t = 1; t <= slot_count_; ++t) {
            const std::vector<double>& g = slice(n, t);
            out.write(reinterpret_cast<const char*>(g.data()),
                      static_cast<std::streamsize>(g.size() * sizeof(double)));
        }
    if (!out) throw IoError("write failed for map snapshot '" + path + "'");
}

RadioMap RadioMap::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open map snapshot '" + path + "'");
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "RMAP", 4) != 0)
        throw ParseError("'" + path + "' is not a map snapshot (bad magic)");
    const auto version = read_raw<std::uint32_t>(in, "version");
    if (version != 1)
        throw ParseError("map snapshot version " + std::to_string(version) + " unsupported");
    VoxelGrid grid;
    grid.x_min = read_raw<double>(in, "x_min");
    grid.y_min = read_raw<double>(in, "y_min");
    grid.h_min = read_raw<double>(in, "h_min");
    grid.delta = read_raw<double>(in, "delta");
    grid.nx = static_cast<int>(read_raw<std::uint32_t>(in, "nx"));
    grid.ny = static_cast<int>(read_raw<std::uint32_t>(in, "ny"));
    grid.nz = static_cast<int>(read_raw<std::uint32_t>(in, "nz"));
    const auto n_count = static_cast<int>(read_raw<std::uint32_t>(in, "ugv_count"));
    const auto t_count = static_cast<int>(read_raw<std::uint32_t>(in, "slot_count"));
    if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1 || n_count < 1 || t_count < 1)
        throw ParseError("map snapshot has empty dimensions");
    std::vector<std::vector<double>> slices;
    slices.reserve(static_cast<std::size_t>(n_count) * t_count);
    for (int i = 0; i < n_count * t_count; ++i) {
        std::vector<double> g(grid.voxel_count());
        in.read(reinterpret_cast<char*>(g.data()),
                static_cast<std::streamsize>(g.size() * sizeof(double)));
        if (!in) throw IoError("map snapshot truncated in slice " + std::to_string(i));
        slices.push_back(std::move(g));
    }
    return from_gains(grid, n_count, t_count, std::move(slices));
}

} // namespace wspso

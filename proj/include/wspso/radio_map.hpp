// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "wspso/scenario.hpp"

namespace wspso {

/// Log-distance propagation with per-building blockage and smooth log-normal
/// shadowing. Gains are linear power ratios in (0, 1].
struct PropagationModel {
    double ref_gain = 1e-4;      ///< gain at the reference distance
    double ref_distance = 1.0;   ///< meters
    double exponent = 2.7;       ///< path-loss exponent
    double blockage_loss = 1e-2; ///< multiplicative factor per blocking building
    double shadowing_db = 4.0;   ///< shadowing std dev in dB; 0 disables it
    double shadow_cell = 20.0;   ///< shadowing lattice pitch, meters
};

/// Channel gain database over (UGV, slot, voxel). Synthetic maps derive each
/// (n, t) slice lazily from the model and memoize it; data-backed maps hold
/// the slices directly. Queries are thread-safe.
class RadioMap {
public:
    RadioMap(RadioMap&&) noexcept = default;
    RadioMap& operator=(RadioMap&&) noexcept = default;

    /// Build a model-backed map. Transmitter positions are the scenario's
    /// UGV positions per slot; identical (scenario, model, seed) give a
    /// bitwise-identical map.
    static RadioMap synthesize(const Scenario& s, const PropagationModel& model,
                               std::uint64_t seed);
    static RadioMap synthesize(const Scenario& s, std::uint64_t seed) {
        return synthesize(s, PropagationModel{}, seed);
    }

    /// Build a data-backed map from explicit slices. slices[(n-1)*T + (t-1)]
    /// holds voxel gains laid out as ((x-1)*ny + (y-1))*nz + (z-1).
    static RadioMap from_gains(const VoxelGrid& grid, int ugv_count, int slot_count,
                               std::vector<std::vector<double>> slices);

    /// Independent copy. Model-backed maps re-derive their slices lazily and
    /// identically; data-backed maps copy their gains.
    RadioMap clone() const;

    /// Gain between UGV n and the voxel, at slot t. 1-based everywhere.
    double gain(int n, int t, const VoxelIndex& idx) const;

    /// Gain at the voxel containing a world position.
    double gain_at(int n, int t, const Vec3& position) const;

    const VoxelGrid& grid() const { return grid_; }
    int ugv_count() const { return ugv_count_; }
    int slot_count() const { return slot_count_; }

    /// Binary snapshot (see docs/formats.md). Forces full materialization.
    void save(const std::string& path) const;
    static RadioMap load(const std::string& path);

private:
    RadioMap() = default;

    struct Slice {
        std::once_flag once;
        std::vector<double> gains;
    };

    const std::vector<double>& slice(int n, int t) const;
    void materialize(Slice& s, int n, int t) const;
    double compute_gain(const Vec3& center, const Vec3& tx, bool same_voxel) const;

    VoxelGrid grid_;
    int ugv_count_ = 0;
    int slot_count_ = 0;
    bool synthetic_ = false;
    PropagationModel model_;
    std::uint64_t seed_ = 0;
    std::vector<Vec3> tx_positions_;    ///< (n-1)*T + (t-1), synthetic maps only
    std::vector<Building> buildings_;   ///< synthetic maps only
    std::unique_ptr<std::vector<Slice>> slices_;
};

} // namespace wspso

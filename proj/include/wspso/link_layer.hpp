// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "wspso/radio_map.hpp"
#include "wspso/scenario.hpp"

namespace wspso {

/// Candidate UAV positions over the horizon. Feasibility is not enforced
/// here; the optimizer measures violations through penalties.
struct TrajectorySet {
    int uav_count = 0;
    int slot_count = 0;
    std::vector<Vec3> points; ///< (m-1)*slot_count + (t-1)

    static TrajectorySet zeros(int uav_count, int slot_count) {
        TrajectorySet q;
        q.uav_count = uav_count;
        q.slot_count = slot_count;
        q.points.assign(static_cast<std::size_t>(uav_count) * slot_count, Vec3{});
        return q;
    }
    const Vec3& pos(int m, int t) const {
        return points[static_cast<std::size_t>(m - 1) * slot_count + (t - 1)];
    }
    Vec3& pos(int m, int t) {
        return points[static_cast<std::size_t>(m - 1) * slot_count + (t - 1)];
    }
    bool operator==(const TrajectorySet& o) const {
        return uav_count == o.uav_count && slot_count == o.slot_count && points == o.points;
    }
};

/// Per-slot UAV-to-UGV assignment. Each UAV serves at most one UGV per slot
/// by construction; valid() additionally checks that no UGV is claimed twice.
struct Schedule {
    int uav_count = 0;
    int ugv_count = 0;
    int slot_count = 0;
    std::vector<int> link; ///< (m-1)*slot_count + (t-1) -> UGV id, 0 when idle

    static Schedule empty(int uav_count, int ugv_count, int slot_count) {
        Schedule s;
        s.uav_count = uav_count;
        s.ugv_count = ugv_count;
        s.slot_count = slot_count;
        s.link.assign(static_cast<std::size_t>(uav_count) * slot_count, 0);
        return s;
    }
    int ugv_for(int m, int t) const {
        return link[static_cast<std::size_t>(m - 1) * slot_count + (t - 1)];
    }
    void set(int m, int n, int t) {
        link[static_cast<std::size_t>(m - 1) * slot_count + (t - 1)] = n;
    }
    bool a(int m, int n, int t) const { return ugv_for(m, t) == n && n != 0; }
    bool scheduled(int n, int t) const {
        for (int m = 1; m <= uav_count; ++m)
            if (ugv_for(m, t) == n) return true;
        return false;
    }
    /// True when no UGV is assigned to two UAVs in the same slot.
    bool valid() const;
};

/// Per-UGV transmit power over the horizon, watts.
struct PowerPlan {
    int ugv_count = 0;
    int slot_count = 0;
    std::vector<double> watts; ///< (n-1)*slot_count + (t-1)

    static PowerPlan uniform(int ugv_count, int slot_count, double w) {
        PowerPlan p;
        p.ugv_count = ugv_count;
        p.slot_count = slot_count;
        p.watts.assign(static_cast<std::size_t>(ugv_count) * slot_count, w);
        return p;
    }
    double p(int n, int t) const {
        return watts[static_cast<std::size_t>(n - 1) * slot_count + (t - 1)];
    }
    double& p(int n, int t) {
        return watts[static_cast<std::size_t>(n - 1) * slot_count + (t - 1)];
    }
};

/// SINR of the scheduled link (m, n) at slot t. Interference comes from
/// every other UGV that is scheduled to some UAV in the same slot. Throws
/// ContractError when (m, n) is not scheduled at t.
double sinr(int m, int n, int t, const TrajectorySet& traj, const Schedule& sched,
            const PowerPlan& power, const Scenario& s, const RadioMap& map);

/// log2(1 + SINR) for a scheduled link; exactly 0 for an unscheduled one.
double link_rate(int m, int n, int t, const TrajectorySet& traj, const Schedule& sched,
                 const PowerPlan& power, const Scenario& s, const RadioMap& map);

/// Deterministic per-slot access heuristic: all UGVs at full power, greedy
/// maximum-gain matching (lowest-index tie-break), then one simultaneous
/// drop of every matched link whose rate falls below the QoS floor.
std::pair<Schedule, PowerPlan> greedy_schedule_and_power(const TrajectorySet& traj,
                                                         const Scenario& s,
                                                         const RadioMap& map);

/// min over UGVs of that UGV's total rate across all slots and UAVs.
double min_sum_rate(const TrajectorySet& traj, const Schedule& sched, const PowerPlan& power,
                    const Scenario& s, const RadioMap& map);

} // namespace wspso

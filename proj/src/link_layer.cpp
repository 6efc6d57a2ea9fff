// SPDX-License-Identifier: Apache-2.0
#include "wspso/link_layer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "wspso/errors.hpp"

namespace wspso {

namespace {

void check_indices(int m, int n, int t, const TrajectorySet& traj, const Schedule& sched) {
    if (m < 1 || m > traj.uav_count)
        throw DomainError("uav index " + std::to_string(m) + " outside [1, " +
                          std::to_string(traj.uav_count) + "]");
    if (n < 1 || n > sched.ugv_count)
        throw DomainError("ugv index " + std::to_string(n) + " outside [1, " +
                          std::to_string(sched.ugv_count) + "]");
    if (t < 1 || t > traj.slot_count)
        throw DomainError("slot index " + std::to_string(t) + " outside [1, " +
                          std::to_string(traj.slot_count) + "]");
}

} // namespace

bool Schedule::valid() const {
    for (int t = 1; t <= slot_count; ++t) {
        std::vector<bool> taken(static_cast<std::size_t>(ugv_count) + 1, false);
        for (int m = 1; m <= uav_count; ++m) {
            const int n = ugv_for(m, t);
            if (n == 0) continue;
            if (n < 0 || n > ugv_count) return false;
            if (taken[static_cast<std::size_t>(n)]) return false;
            taken[static_cast<std::size_t>(n)] = true;
        }
    }
    return true;
}

double sinr(int m, int n, int t, const TrajectorySet& traj, const Schedule& sched,
            const PowerPlan& power, const Scenario& s, const RadioMap& map) {
    check_indices(m, n, t, traj, sched);
    if (!sched.a(m, n, t))
        throw ContractError("sinr queried for unscheduled link (m=" + std::to_string(m) +
                            ", n=" + std::to_string(n) + ", t=" + std::to_string(t) + ")");
    const VoxelIndex w = index_of(map.grid(), traj.pos(m, t));
    const double signal = map.gain(n, t, w) * power.p(n, t);
    double interference = 0.0;
    for (int p = 1; p <= sched.ugv_count; ++p) {
        if (p == n || !sched.scheduled(p, t)) continue;
        interference += map.gain(p, t, w) * power.p(p, t);
    }
    return signal / (interference + s.n0);
}

double link_rate(int m, int n, int t, const TrajectorySet& traj, const Schedule& sched,
                 const PowerPlan& power, const Scenario& s, const RadioMap& map) {
    check_indices(m, n, t, traj, sched);
    if (!sched.a(m, n, t)) return 0.0;
    return std::log2(1.0 + sinr(m, n, t, traj, sched, power, s, map));
}

std::pair<Schedule, PowerPlan> greedy_schedule_and_power(const TrajectorySet& traj,
                                                         const Scenario& s,
                                                         const RadioMap& map) {
    const int M = traj.uav_count;
    const int N = s.ugv_count;
    const int T = traj.slot_count;
    Schedule sched = Schedule::empty(M, N, T);
    PowerPlan power = PowerPlan::uniform(N, T, s.p_max);

    // gain desc, then uav asc, then ugv asc
    struct Cand {
        double gain;
        int m;
        int n;
    };
    std::vector<Cand> cands;
    cands.reserve(static_cast<std::size_t>(M) * N);
    for (int t = 1; t <= T; ++t) {
        cands.clear();
        for (int m = 1; m <= M; ++m) {
            const VoxelIndex w = index_of(map.grid(), traj.pos(m, t));
            for (int n = 1; n <= N; ++n) cands.push_back({map.gain(n, t, w), m, n});
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return std::tie(b.gain, a.m, a.n) < std::tie(a.gain, b.m, b.n);
        });
        std::vector<bool> uav_used(static_cast<std::size_t>(M) + 1, false);
        std::vector<bool> ugv_used(static_cast<std::size_t>(N) + 1, false);
        for (const Cand& c : cands) {
            if (uav_used[static_cast<std::size_t>(c.m)] ||
                ugv_used[static_cast<std::size_t>(c.n)])
                continue;
            sched.set(c.m, c.n, t);
            uav_used[static_cast<std::size_t>(c.m)] = true;
            ugv_used[static_cast<std::size_t>(c.n)] = true;
        }

        // One simultaneous QoS pass: rates of the survivors only improve
        // once the weak links stop transmitting.
        std::vector<int> drop;
        for (int m = 1; m <= M; ++m) {
            const int n = sched.ugv_for(m, t);
            if (n == 0) continue;
            if (link_rate(m, n, t, traj, sched, power, s, map) < s.r_min) drop.push_back(m);
        }
        for (int m : drop) sched.set(m, 0, t);
    }
    return {std::move(sched), std::move(power)};
}

double min_sum_rate(const TrajectorySet& traj, const Schedule& sched, const PowerPlan& power,
                    const Scenario& s, const RadioMap& map) {
    std::vector<double> per_ugv(static_cast<std::size_t>(s.ugv_count) + 1, 0.0);
    for (int t = 1; t <= traj.slot_count; ++t)
        for (int m = 1; m <= traj.uav_count; ++m) {
            const int n = sched.ugv_for(m, t);
            if (n == 0) continue;
            per_ugv[static_cast<std::size_t>(n)] +=
                link_rate(m, n, t, traj, sched, power, s, map);
        }
    double lo = per_ugv[1];
    for (int n = 2; n <= s.ugv_count; ++n) lo = std::min(lo, per_ugv[static_cast<std::size_t>(n)]);
    return lo;
}

} // namespace wspso

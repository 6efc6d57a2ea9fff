// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "wspso/swarm.hpp"

namespace wspso {

using Json = nlohmann::json;

/// Field helpers; throw ValidationError naming the offending field.
double req_num(const Json& j, const std::string& field);
long long req_int(const Json& j, const std::string& field);
long long opt_int(const Json& j, const std::string& field, long long fallback);

Json hyper_to_json(const HyperParams& h);
HyperParams hyper_from_json(const Json& j);

Json breakdown_to_json(const FitnessBreakdown& fb);
FitnessBreakdown breakdown_from_json(const Json& j);

Json collision_to_json(const CollisionReport& r);

/// Arguments of one optimizer invocation.
struct RunParams {
    HyperParams hyper;
    int p_iter = 50;
    std::uint64_t seed = 0;
};
RunParams run_params_from_json(const Json& args);
Json run_params_to_json(const RunParams& p);

/// One completed invocation, as persisted and served back by the server.
struct RunRecord {
    long long run_id = 0;
    HyperParams hyper;
    int p_iter = 50;
    std::uint64_t seed = 0;
    FitnessBreakdown best;
    long long evaluations = 0;
    double wall_ms = 0.0;   ///< excluded from deterministic outputs
    std::string timestamp;  ///< likewise
};

/// include_timing controls wall_ms/timestamp; deterministic reports drop
/// them, the append-only log keeps them.
Json record_to_json(const RunRecord& r, bool include_timing);
RunRecord record_from_json(const Json& j);

Json scenario_summary_json(const Scenario& s);

/// Deterministic record for a single CLI run (no timing fields).
Json result_record_json(const HyperParams& h, int p_iter, std::uint64_t seed,
                        const OptimizationResult& res);

/// Plain table, one row per (uav, slot): m t x y z ugv rate. The schedule
/// and rates are recomputed from the trajectory with the greedy rule.
std::string trajectory_table(const TrajectorySet& traj, const Scenario& s,
                             const RadioMap& map);

} // namespace wspso

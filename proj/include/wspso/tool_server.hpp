// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wspso/json_io.hpp"
#include "wspso/radio_map.hpp"
#include "wspso/scenario.hpp"
#include "wspso/transport.hpp"

namespace wspso {

/// Test seams. on_run_start runs on the executor thread right before each
/// optimizer run; blocking inside it holds the server in its busy state.
struct ServerHooks {
    std::function<void()> on_run_start;
};

struct ServerOptions {
    std::string log_path;          ///< append-only JSONL; empty = in-memory only
    int rate_limit_per_min = 10;   ///< tools/call budget; 0 disables
    std::function<double()> clock; ///< seconds, for the token bucket; default steady
    ServerHooks hooks;
};

/// Line-delimited JSON-RPC 2.0 server over any LineTransport, exposing the
/// optimizer and its run history as tools. One optimizer run in flight;
/// concurrent calls are refused as busy. See docs/protocol.md.
class ToolServer {
public:
    ToolServer(Scenario scenario, RadioMap map, ServerOptions options = {});
    ~ToolServer();
    ToolServer(const ToolServer&) = delete;
    ToolServer& operator=(const ToolServer&) = delete;

    /// Serves one stream until it ends; drains any in-flight run before
    /// returning so nothing touches the transport afterwards.
    void serve(LineTransport& transport);

    std::vector<RunRecord> history_snapshot() const;

    /// The tools/list payload, also pinned verbatim in docs/protocol.md.
    static Json tool_descriptors();

private:
    struct PendingRun {
        Json id;
        RunParams params;
    };

    void dispatch(const std::string& line, LineTransport& t);
    void handle_call(const Json& id, const Json& params, LineTransport& t);
    Json history_json(const Json& args) const;
    void worker_loop();
    void append_record(const RunRecord& r);
    void replay_log();
    bool take_token();

    Scenario scenario_;
    RadioMap map_;
    ServerOptions options_;

    mutable std::mutex history_mu_;
    std::vector<RunRecord> history_;
    long long next_run_id_ = 1;
    std::ofstream log_;

    std::mutex job_mu_;
    std::condition_variable job_cv_;
    std::condition_variable idle_cv_;
    std::optional<PendingRun> job_;
    bool stop_ = false;
    bool busy_ = false;
    LineTransport* out_ = nullptr;
    std::thread worker_;

    std::mutex bucket_mu_;
    double tokens_ = 0.0;
    double last_refill_ = 0.0;
};

} // namespace wspso

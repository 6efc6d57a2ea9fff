// SPDX-License-Identifier: Apache-2.0
#include "wspso/tool_server.hpp"

#include <chrono>
#include <ctime>

#include "wspso/errors.hpp"

namespace wspso {

namespace {

constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kToolFailure = -32000;
constexpr int kBusy = -32001;

std::string rpc_error(const Json& id, int code, const std::string& message) {
    return Json{{"jsonrpc", "2.0"},
                {"id", id},
                {"error", {{"code", code}, {"message", message}}}}
        .dump();
}

std::string rpc_result(const Json& id, Json result) {
    return Json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}}.dump();
}

std::string utc_now() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

ToolServer::ToolServer(Scenario scenario, RadioMap map, ServerOptions options)
    : scenario_(std::move(scenario)), map_(std::move(map)), options_(std::move(options)) {
    scenario_.validate();
    if (!options_.clock) options_.clock = steady_seconds;
    tokens_ = static_cast<double>(options_.rate_limit_per_min);
    last_refill_ = options_.clock();
    if (!options_.log_path.empty()) {
        replay_log();
        log_.open(options_.log_path, std::ios::app);
        if (!log_) throw IoError("cannot open run log '" + options_.log_path + "'");
    }
    worker_ = std::thread([this] { worker_loop(); });
}

ToolServer::~ToolServer() {
    {
        const std::lock_guard<std::mutex> lock(job_mu_);
        stop_ = true;
    }
    job_cv_.notify_all();
    if (worker_.joinable()) worker_.join();
}

void ToolServer::replay_log() {
    std::ifstream in(options_.log_path);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            RunRecord r = record_from_json(Json::parse(line));
            next_run_id_ = std::max(next_run_id_, r.run_id + 1);
            history_.push_back(std::move(r));
        } catch (const std::exception&) {
            // A torn final line from an interrupted write is not fatal.
        }
    }
}

Json ToolServer::tool_descriptors() {
    auto weight = [](const char* desc) {
        return Json{{"type", "number"}, {"minimum", 0}, {"description", desc}};
    };
    const Json run_schema{
        {"type", "object"},
        {"properties",
         {{"p_num",
           {{"type", "integer"}, {"minimum", 2}, {"description", "swarm size"}}},
          {"omega", weight("inertia weight")},
          {"c1", weight("cognitive coefficient")},
          {"c2", weight("social coefficient")},
          {"k1", weight("rate weight")},
          {"k2", weight("speed penalty weight")},
          {"k3", weight("turn penalty weight")},
          {"k4", weight("building penalty weight")},
          {"p_iter",
           {{"type", "integer"},
            {"minimum", 0},
            {"default", 50},
            {"description", "optimizer iterations"}}},
          {"seed",
           {{"type", "integer"}, {"default", 0}, {"description", "run seed"}}}}},
        {"required", {"p_num", "omega", "c1", "c2", "k1", "k2", "k3", "k4"}}};
    return Json{
        {"tools",
         {{{"name", "run_ws_pso_cm"},
           {"description",
            "Run the warm-start particle swarm optimizer with crossover and mutation "
            "on the loaded scenario and radio map, then record and return the run "
            "metrics."},
           {"input_schema", run_schema}},
          {{"name", "get_scenario"},
           {"description",
            "Describe the loaded scenario: fleet sizes, horizon, limits, grid, and "
            "buildings."},
           {"input_schema",
            {{"type", "object"}, {"properties", Json::object()}, {"required", Json::array()}}}},
          {{"name", "get_history"},
           {"description", "Return the most recent optimizer runs, newest first."},
           {"input_schema",
            {{"type", "object"},
             {"properties",
              {{"limit",
                {{"type", "integer"},
                 {"minimum", 1},
                 {"default", 20},
                 {"description", "maximum records"}}}}},
             {"required", Json::array()}}}}}}};
}

void ToolServer::serve(LineTransport& transport) {
    {
        const std::lock_guard<std::mutex> lock(job_mu_);
        out_ = &transport;
    }
    try {
        std::string line;
        while (transport.read_line(line)) dispatch(line, transport);
    } catch (const TransportError&) {
        // A peer that vanished mid-reply ends the session like an EOF would.
    }
    // Drain: the worker must not touch the transport once serve returns.
    std::unique_lock<std::mutex> lock(job_mu_);
    idle_cv_.wait(lock, [&] { return !busy_; });
    out_ = nullptr;
}

bool ToolServer::take_token() {
    if (options_.rate_limit_per_min <= 0) return true;
    const std::lock_guard<std::mutex> lock(bucket_mu_);
    const double now = options_.clock();
    const double rate_per_s = static_cast<double>(options_.rate_limit_per_min) / 60.0;
    tokens_ = std::min(static_cast<double>(options_.rate_limit_per_min),
                       tokens_ + (now - last_refill_) * rate_per_s);
    last_refill_ = now;
    if (tokens_ < 1.0) return false;
    tokens_ -= 1.0;
    return true;
}

void ToolServer::dispatch(const std::string& line, LineTransport& t) {
    Json msg;
    try {
        msg = Json::parse(line);
    } catch (const Json::exception&) {
        t.write_line(rpc_error(nullptr, kParseError, "parse error"));
        return;
    }

    const bool shaped = msg.is_object() && msg.contains("jsonrpc") &&
                        msg.at("jsonrpc") == "2.0" && msg.contains("method") &&
                        msg.at("method").is_string();
    const bool has_id =
        msg.is_object() && msg.contains("id") &&
        (msg.at("id").is_number() || msg.at("id").is_string());
    if (!shaped) {
        t.write_line(rpc_error(has_id ? msg.at("id") : Json(nullptr), kInvalidRequest,
                               "invalid request"));
        return;
    }
    if (!has_id) {
        // Notification: never answered, and with no reply channel for errors
        // or results, never executed either.
        return;
    }
    const Json id = msg.at("id");
    const std::string method = msg.at("method").get<std::string>();
    const Json params = msg.contains("params") ? msg.at("params") : Json::object();

    try {
        if (method == "initialize") {
            t.write_line(rpc_result(
                id, Json{{"server", {{"name", "wspsocm-tools"}, {"version", "1.0.0"}}},
                         {"protocol", {{"jsonrpc", "2.0"}, {"framing", "line-delimited"}}},
                         {"capabilities", {{"tools", Json::object()}}}}));
        } else if (method == "tools/list") {
            t.write_line(rpc_result(id, tool_descriptors()));
        } else if (method == "tools/call") {
            handle_call(id, params, t);
        } else {
            t.write_line(rpc_error(id, kMethodNotFound, "method '" + method + "' not found"));
        }
    } catch (const ValidationError& e) {
        t.write_line(rpc_error(id, kInvalidParams, e.what()));
    } catch (const std::exception& e) {
        t.write_line(rpc_error(id, kToolFailure, e.what()));
    }
}

void ToolServer::handle_call(const Json& id, const Json& params, LineTransport& t) {
    if (!params.is_object() || !params.contains("name") || !params.at("name").is_string()) {
        t.write_line(rpc_error(id, kInvalidParams, "name: missing required field"));
        return;
    }
    const std::string name = params.at("name").get<std::string>();
    Json args = Json::object();
    if (params.contains("arguments")) {
        if (!params.at("arguments").is_object()) {
            t.write_line(rpc_error(id, kInvalidParams, "arguments: must be an object"));
            return;
        }
        args = params.at("arguments");
    }
    if (!take_token()) {
        t.write_line(rpc_error(id, kToolFailure, "rate limit exceeded"));
        return;
    }

    if (name == "run_ws_pso_cm") {
        RunParams run = run_params_from_json(args); // ValidationError -> -32602
        const std::lock_guard<std::mutex> lock(job_mu_);
        if (busy_) {
            t.write_line(rpc_error(id, kBusy, "busy: an optimizer run is in flight"));
            return;
        }
        busy_ = true;
        job_ = PendingRun{id, run};
        job_cv_.notify_one();
    } else if (name == "get_scenario") {
        t.write_line(rpc_result(id, scenario_summary_json(scenario_)));
    } else if (name == "get_history") {
        t.write_line(rpc_result(id, history_json(args)));
    } else {
        t.write_line(rpc_error(id, kInvalidParams, "unknown tool '" + name + "'"));
    }
}

Json ToolServer::history_json(const Json& args) const {
    const long long limit = opt_int(args, "limit", 20);
    if (limit < 1) throw ValidationError("limit", "limit: must be >= 1");
    Json records = Json::array();
    const std::lock_guard<std::mutex> lock(history_mu_);
    const auto n = static_cast<long long>(history_.size());
    for (long long i = n - 1; i >= 0 && records.size() < static_cast<std::size_t>(limit); --i)
        records.push_back(record_to_json(history_[static_cast<std::size_t>(i)], true));
    return Json{{"records", std::move(records)}};
}

void ToolServer::append_record(const RunRecord& r) {
    const std::lock_guard<std::mutex> lock(history_mu_);
    history_.push_back(r);
    if (log_.is_open()) {
        log_ << record_to_json(r, true).dump() << '\n';
        log_.flush();
    }
}

void ToolServer::worker_loop() {
    for (;;) {
        PendingRun run;
        LineTransport* out = nullptr;
        {
            std::unique_lock<std::mutex> lock(job_mu_);
            job_cv_.wait(lock, [&] { return stop_ || job_.has_value(); });
            if (stop_ && !job_.has_value()) return;
            run = std::move(*job_);
            job_.reset();
            out = out_;
        }
        if (options_.hooks.on_run_start) options_.hooks.on_run_start();
        std::string reply;
        try {
            const OptimizationResult res = run_ws_pso_cm(
                scenario_, map_, run.params.hyper, run.params.p_iter, run.params.seed);
            RunRecord rec;
            {
                const std::lock_guard<std::mutex> lock(history_mu_);
                rec.run_id = next_run_id_++;
            }
            rec.hyper = run.params.hyper;
            rec.p_iter = run.params.p_iter;
            rec.seed = run.params.seed;
            rec.best = res.best;
            rec.evaluations = res.evaluations;
            rec.wall_ms = res.wall_ms;
            rec.timestamp = utc_now();
            append_record(rec);
            reply = rpc_result(run.id, record_to_json(rec, true));
        } catch (const std::exception& e) {
            reply = rpc_error(run.id, kToolFailure, e.what());
        }
        {
            // Reply and flag clear happen as one step: a client that has seen
            // the reply must find the server idle, and the exit drain must not
            // release the transport while the write is still in flight.
            const std::lock_guard<std::mutex> lock(job_mu_);
            if (out) {
                try {
                    out->write_line(reply);
                } catch (const TransportError&) {
                    // The run is logged either way; a vanished peer loses only
                    // the reply.
                }
            }
            busy_ = false;
        }
        idle_cv_.notify_all();
    }
}

std::vector<RunRecord> ToolServer::history_snapshot() const {
    const std::lock_guard<std::mutex> lock(history_mu_);
    return history_;
}

} // namespace wspso

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <string>
#include <thread>

#include "wspso/json_io.hpp"
#include "wspso/tool_server.hpp"
#include "wspso/transport.hpp"
#include "test_support.hpp"

using namespace wspso;

namespace {

Json small_run_args(int p_iter = 1, int seed = 1) {
    HyperParams h;
    h.p_num = 4;
    Json args = hyper_to_json(h);
    args["p_iter"] = p_iter;
    args["seed"] = seed;
    return args;
}

Json call_msg(int id, const std::string& tool, Json args) {
    return Json{{"jsonrpc", "2.0"},
                {"id", id},
                {"method", "tools/call"},
                {"params", {{"name", tool}, {"arguments", std::move(args)}}}};
}

/// Drives one server over an in-memory pipe; requests are synchronous.
class Session {
public:
    explicit Session(ToolServer& server) {
        auto [client, server_end] = memory_transport_pair();
        client_ = std::move(client);
        server_end_ = std::move(server_end);
        thread_ = std::thread([&server, end = server_end_.get()] { server.serve(*end); });
    }
    ~Session() { finish(); }

    void send_raw(const std::string& line) { client_->write_line(line); }
    void send(const Json& msg) { client_->write_line(msg.dump()); }
    Json read() {
        std::string line;
        REQUIRE(client_->read_line(line));
        return Json::parse(line);
    }
    Json request(const Json& msg) {
        send(msg);
        return read();
    }
    void finish() {
        if (client_) client_->close();
        if (thread_.joinable()) thread_.join();
    }

private:
    std::unique_ptr<LineTransport> client_;
    std::unique_ptr<LineTransport> server_end_;
    std::thread thread_;
};

ToolServer make_server() {
    ServerOptions options;
    options.rate_limit_per_min = 0; // these tests exercise dispatch, not the budget
    const Scenario s = testsup::tiny_scenario(1, 2, 3);
    return ToolServer(s, testsup::flat_map(s, 1e-8), std::move(options));
}

std::string temp_log(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("initialize reports the server identity and framing") {
    ToolServer server = make_server();
    Session io(server);
    const Json r =
        io.request({{"jsonrpc", "2.0"}, {"id", 1}, {"method", "initialize"}});
    CHECK(r.at("jsonrpc") == "2.0");
    CHECK(r.at("id") == 1);
    CHECK(r.at("result").at("server").at("name") == "wspsocm-tools");
    CHECK(r.at("result").at("server").at("version") == "1.0.0");
    CHECK(r.at("result").at("protocol").at("framing") == "line-delimited");
    CHECK(r.at("result").at("capabilities").contains("tools"));
}

TEST_CASE("tools/list names the three tools with schemas") {
    ToolServer server = make_server();
    Session io(server);
    const Json r =
        io.request({{"jsonrpc", "2.0"}, {"id", "ls"}, {"method", "tools/list"}});
    CHECK(r.at("id") == "ls");
    const Json& tools = r.at("result").at("tools");
    REQUIRE(tools.size() == 3);
    CHECK(tools[0].at("name") == "run_ws_pso_cm");
    CHECK(tools[1].at("name") == "get_scenario");
    CHECK(tools[2].at("name") == "get_history");
    for (const Json& t : tools) CHECK(t.at("input_schema").at("type") == "object");
    CHECK(r.at("result") == ToolServer::tool_descriptors());
}

TEST_CASE("run calls return records with increasing run ids") {
    ToolServer server = make_server();
    Session io(server);
    const Json r1 = io.request(call_msg(1, "run_ws_pso_cm", small_run_args(1, 7)));
    REQUIRE(r1.contains("result"));
    const Json& rec1 = r1.at("result");
    CHECK(rec1.at("run_id") == 1);
    CHECK(rec1.at("v") == 1);
    CHECK(rec1.at("metrics").contains("min_sum_rate"));
    CHECK(rec1.at("metrics").contains("f_value"));
    CHECK(rec1.at("metrics").contains("wall_ms"));
    CHECK(rec1.contains("timestamp"));
    CHECK(rec1.at("metrics").at("evaluations") == 4 + 2 * 4 * 1 + 1);

    const Json r2 = io.request(call_msg(2, "run_ws_pso_cm", small_run_args(1, 8)));
    CHECK(r2.at("result").at("run_id") == 2);

    const Json hist = io.request(call_msg(3, "get_history", Json::object()));
    const Json& records = hist.at("result").at("records");
    REQUIRE(records.size() == 2);
    CHECK(records[0].at("run_id") == 2); // newest first
    CHECK(records[1].at("run_id") == 1);

    const Json one =
        io.request(call_msg(4, "get_history", Json{{"limit", 1}}));
    REQUIRE(one.at("result").at("records").size() == 1);
    CHECK(one.at("result").at("records")[0].at("run_id") == 2);

    const auto snapshot = server.history_snapshot();
    REQUIRE(snapshot.size() == 2);
    CHECK(snapshot[0].run_id == 1);
    CHECK(snapshot[1].run_id == 2);
}

TEST_CASE("get_scenario mirrors the loaded scenario") {
    ToolServer server = make_server();
    Session io(server);
    const Json r = io.request(call_msg(1, "get_scenario", Json::object()));
    CHECK(r.at("result").at("uav_count") == 1);
    CHECK(r.at("result").at("ugv_count") == 2);
    CHECK(r.at("result").at("slot_count") == 3);
    CHECK(r.at("result").at("grid").at("delta") == 5.0);
}

TEST_CASE("notifications are neither answered nor executed") {
    ToolServer server = make_server();
    Session io(server);
    Json note = call_msg(0, "run_ws_pso_cm", small_run_args());
    note.erase("id");
    io.send(note);
    io.send({{"jsonrpc", "2.0"}, {"method", "tools/list"}}); // also a notification

    const Json hist = io.request(call_msg(9, "get_history", Json::object()));
    CHECK(hist.at("id") == 9); // first reply on the wire belongs to this request
    CHECK(hist.at("result").at("records").empty());
    CHECK(server.history_snapshot().empty());
}

TEST_CASE("malformed and invalid requests get the standard error codes") {
    ToolServer server = make_server();
    Session io(server);

    io.send_raw("{this is not json");
    Json r = io.read();
    CHECK(r.at("error").at("code") == -32700);
    CHECK(r.at("id").is_null());

    r = io.request(Json{{"jsonrpc", "2.0"}, {"id", 5}});
    CHECK(r.at("error").at("code") == -32600);
    CHECK(r.at("id") == 5); // a usable id is echoed even on shape errors

    io.send_raw("[1,2,3]");
    r = io.read();
    CHECK(r.at("error").at("code") == -32600);
    CHECK(r.at("id").is_null());

    r = io.request({{"jsonrpc", "2.0"}, {"id", 6}, {"method", "shutdown"}});
    CHECK(r.at("error").at("code") == -32601);

    r = io.request({{"jsonrpc", "2.0"}, {"id", 7}, {"method", "tools/call"},
                    {"params", Json::object()}});
    CHECK(r.at("error").at("code") == -32602);
    CHECK(r.at("error").at("message").get<std::string>().find("name") !=
          std::string::npos);

    r = io.request(call_msg(8, "fly_to_the_moon", Json::object()));
    CHECK(r.at("error").at("code") == -32602);
    CHECK(r.at("error").at("message").get<std::string>().find("fly_to_the_moon") !=
          std::string::npos);

    Json missing = small_run_args();
    missing.erase("omega");
    r = io.request(call_msg(9, "run_ws_pso_cm", missing));
    CHECK(r.at("error").at("code") == -32602);
    CHECK(r.at("error").at("message").get<std::string>().find("omega") !=
          std::string::npos);

    Json negative = small_run_args();
    negative["p_iter"] = -1;
    r = io.request(call_msg(10, "run_ws_pso_cm", negative));
    CHECK(r.at("error").at("code") == -32602);
    CHECK(r.at("error").at("message").get<std::string>().find("p_iter") !=
          std::string::npos);
}

TEST_CASE("the token bucket refuses surplus calls and refills over time") {
    auto now = std::make_shared<std::atomic<double>>(0.0);
    ServerOptions options;
    options.rate_limit_per_min = 2;
    options.clock = [now] { return now->load(); };
    const Scenario s = testsup::tiny_scenario(1, 2, 3);
    ToolServer server(s, testsup::flat_map(s, 1e-8), std::move(options));
    Session io(server);

    CHECK(io.request(call_msg(1, "get_scenario", Json::object())).contains("result"));
    CHECK(io.request(call_msg(2, "get_scenario", Json::object())).contains("result"));
    const Json refused = io.request(call_msg(3, "get_scenario", Json::object()));
    CHECK(refused.at("error").at("code") == -32000);
    CHECK(refused.at("error").at("message") == "rate limit exceeded");

    now->store(30.0); // half a minute buys one token at 2 per minute
    CHECK(io.request(call_msg(4, "get_scenario", Json::object())).contains("result"));
    CHECK(io.request(call_msg(5, "get_scenario", Json::object()))
              .at("error")
              .at("code") == -32000);

    // Non-call methods are never budgeted.
    CHECK(io.request({{"jsonrpc", "2.0"}, {"id", 6}, {"method", "tools/list"}})
              .contains("result"));
}

TEST_CASE("a second run while one is in flight is refused as busy") {
    auto gate = std::make_shared<std::promise<void>>();
    auto gate_future = std::make_shared<std::shared_future<void>>(gate->get_future());
    ServerOptions options;
    options.rate_limit_per_min = 0;
    options.hooks.on_run_start = [gate_future] { gate_future->wait(); };
    const Scenario s = testsup::tiny_scenario(1, 2, 3);
    ToolServer server(s, testsup::flat_map(s, 1e-8), std::move(options));
    Session io(server);

    io.send(call_msg(10, "run_ws_pso_cm", small_run_args()));
    const Json busy = io.request(call_msg(11, "run_ws_pso_cm", small_run_args()));
    CHECK(busy.at("id") == 11);
    CHECK(busy.at("error").at("code") == -32001);

    gate->set_value();
    const Json done = io.read();
    CHECK(done.at("id") == 10);
    CHECK(done.at("result").at("run_id") == 1);
}

TEST_CASE("the run log replays on startup, skipping torn lines") {
    const std::string path = temp_log("wspso_server_log.jsonl");
    std::remove(path.c_str());

    {
        ServerOptions options;
        options.rate_limit_per_min = 0;
        options.log_path = path;
        const Scenario s = testsup::tiny_scenario(1, 2, 3);
        ToolServer server(s, testsup::flat_map(s, 1e-8), std::move(options));
        Session io(server);
        io.request(call_msg(1, "run_ws_pso_cm", small_run_args(1, 1)));
        io.request(call_msg(2, "run_ws_pso_cm", small_run_args(1, 2)));
    }
    {
        std::ofstream append(path, std::ios::app);
        append << "{\"v\":1,\"run_id\":"; // torn write
    }

    ServerOptions options;
    options.rate_limit_per_min = 0;
    options.log_path = path;
    const Scenario s = testsup::tiny_scenario(1, 2, 3);
    ToolServer server(s, testsup::flat_map(s, 1e-8), std::move(options));
    CHECK(server.history_snapshot().size() == 2);

    Session io(server);
    const Json r = io.request(call_msg(3, "run_ws_pso_cm", small_run_args(1, 3)));
    CHECK(r.at("result").at("run_id") == 3); // ids continue past the replayed log

    const Json hist = io.request(call_msg(4, "get_history", Json{{"limit", 2}}));
    CHECK(hist.at("result").at("records")[0].at("run_id") == 3);
    CHECK(hist.at("result").at("records")[1].at("run_id") == 2);
    io.finish();
    std::remove(path.c_str());
}

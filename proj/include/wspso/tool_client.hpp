// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <thread>

#include "wspso/json_io.hpp"
#include "wspso/tool_server.hpp"
#include "wspso/transport.hpp"

namespace wspso {

/// Synchronous JSON-RPC caller. call() returns the result payload or throws
/// RpcError (server-reported) / TransportError (wire-level).
class ToolClient {
public:
    virtual ~ToolClient() = default;
    virtual Json call(const std::string& method, const Json& params) = 0;

    Json call_tool(const std::string& name, const Json& arguments) {
        return call("tools/call", Json{{"name", name}, {"arguments", arguments}});
    }
};

/// Client half of a line transport. One request in flight at a time.
class LineRpcClient : public ToolClient {
public:
    explicit LineRpcClient(LineTransport& transport) : transport_(&transport) {}
    Json call(const std::string& method, const Json& params) override;

private:
    LineTransport* transport_;
    long long next_id_ = 1;
};

/// Owns a server plus an in-memory wire to it; for same-process tuning and
/// tests. The served scenario/map behave exactly as over TCP or stdio.
class InProcessClient : public ToolClient {
public:
    InProcessClient(Scenario scenario, RadioMap map, ServerOptions options = {});
    ~InProcessClient() override;

    Json call(const std::string& method, const Json& params) override;
    ToolServer& server() { return *server_; }

private:
    std::unique_ptr<ToolServer> server_;
    std::unique_ptr<LineTransport> client_end_;
    std::unique_ptr<LineTransport> server_end_;
    std::unique_ptr<LineRpcClient> rpc_;
    std::thread serve_thread_;
};

/// TCP client with bounded connect retries.
class SocketClient : public ToolClient {
public:
    SocketClient(const std::string& host, int port, int connect_retries = 5,
                 double backoff_s = 0.2);
    ~SocketClient() override;

    Json call(const std::string& method, const Json& params) override;

private:
    std::unique_ptr<TcpTransport> transport_;
    std::unique_ptr<LineRpcClient> rpc_;
};

} // namespace wspso

// SPDX-License-Identifier: Apache-2.0
#include "wspso/tool_client.hpp"

#include <chrono>

#include "wspso/errors.hpp"

namespace wspso {

Json LineRpcClient::call(const std::string& method, const Json& params) {
    const long long id = next_id_++;
    transport_->write_line(
        Json{{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", params}}.dump());
    std::string line;
    while (transport_->read_line(line)) {
        const Json resp = Json::parse(line, nullptr, false);
        if (resp.is_discarded() || !resp.is_object()) continue;
        if (!resp.contains("id") || resp.at("id") != Json(id)) continue;
        if (resp.contains("error")) {
            const Json& e = resp.at("error");
            const int code = e.contains("code") && e.at("code").is_number_integer()
                                 ? e.at("code").get<int>()
                                 : -32000;
            const std::string msg = e.contains("message") && e.at("message").is_string()
                                        ? e.at("message").get<std::string>()
                                        : "unspecified error";
            throw RpcError(code, msg);
        }
        if (resp.contains("result")) return resp.at("result");
        throw TransportError("response carries neither result nor error");
    }
    throw TransportError("connection closed before a response to '" + method + "'");
}

InProcessClient::InProcessClient(Scenario scenario, RadioMap map, ServerOptions options) {
    server_ = std::make_unique<ToolServer>(std::move(scenario), std::move(map),
                                           std::move(options));
    auto [client_end, server_end] = memory_transport_pair();
    client_end_ = std::move(client_end);
    server_end_ = std::move(server_end);
    rpc_ = std::make_unique<LineRpcClient>(*client_end_);
    serve_thread_ = std::thread([this] { server_->serve(*server_end_); });
}

InProcessClient::~InProcessClient() {
    client_end_->close();
    server_end_->close();
    if (serve_thread_.joinable()) serve_thread_.join();
}

Json InProcessClient::call(const std::string& method, const Json& params) {
    return rpc_->call(method, params);
}

SocketClient::SocketClient(const std::string& host, int port, int connect_retries,
                           double backoff_s) {
    for (int attempt = 0;; ++attempt) {
        try {
            transport_ = TcpTransport::connect(host, port);
            break;
        } catch (const TransportError&) {
            if (attempt >= connect_retries) throw;
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff_s));
        }
    }
    rpc_ = std::make_unique<LineRpcClient>(*transport_);
}

SocketClient::~SocketClient() {
    if (transport_) transport_->close();
}

Json SocketClient::call(const std::string& method, const Json& params) {
    return rpc_->call(method, params);
}

} // namespace wspso

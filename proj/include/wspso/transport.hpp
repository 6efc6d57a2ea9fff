// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

namespace wspso {

/// One UTF-8 message per '\n'-terminated line, both directions. write_line
/// is safe to call from several threads; read_line belongs to one reader.
class LineTransport {
public:
    virtual ~LineTransport() = default;

    /// Blocks for the next line (terminator stripped). False on end of
    /// stream with nothing read.
    virtual bool read_line(std::string& line) = 0;

    /// Sends one line; the terminator is appended here.
    virtual void write_line(const std::string& line) = 0;

    /// Ends the stream; pending and future reads return false.
    virtual void close() {}
};

/// Process stdin/stdout. close() is a no-op (stdin cannot be unblocked
/// portably); the stream ends at EOF.
class StdioTransport final : public LineTransport {
public:
    bool read_line(std::string& line) override;
    void write_line(const std::string& line) override;

private:
    std::mutex write_mu_;
};

/// In-process bidirectional pipe for tests and same-process client/server
/// wiring. Each endpoint reads what the other wrote.
std::pair<std::unique_ptr<LineTransport>, std::unique_ptr<LineTransport>>
memory_transport_pair();

/// Connected TCP stream.
class TcpTransport final : public LineTransport {
public:
    explicit TcpTransport(int fd) : fd_(fd) {}
    ~TcpTransport() override;
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    static std::unique_ptr<TcpTransport> connect(const std::string& host, int port);

    bool read_line(std::string& line) override;
    void write_line(const std::string& line) override;
    void close() override;

private:
    int fd_ = -1;
    std::string rbuf_;
    std::mutex write_mu_;
    std::mutex close_mu_;
};

class TcpListener {
public:
    /// Binds and listens; port 0 picks an ephemeral port.
    TcpListener(const std::string& host, int port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    int port() const { return port_; }

    /// Blocks for the next connection; nullptr once closed.
    std::unique_ptr<TcpTransport> accept();
    void close();

private:
    int fd_ = -1;
    int port_ = 0;
};

} // namespace wspso

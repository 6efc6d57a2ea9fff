// SPDX-License-Identifier: Apache-2.0
#include "wspso/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>

#include "wspso/errors.hpp"

namespace wspso {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

[[noreturn]] void sys_fail(const std::string& what) {
    throw TransportError(what + ": " + std::strerror(errno));
}

} // namespace

bool StdioTransport::read_line(std::string& line) {
    if (!std::getline(std::cin, line)) return false;
    strip_cr(line);
    return true;
}

void StdioTransport::write_line(const std::string& line) {
    const std::lock_guard<std::mutex> lock(write_mu_);
    std::cout << line << '\n' << std::flush;
}

namespace {

struct MemoryChannel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> queue;
    bool closed = false;

    void push(const std::string& line) {
        {
            const std::lock_guard<std::mutex> lock(mu);
            if (closed) return;
            queue.push_back(line);
        }
        cv.notify_one();
    }
    bool pop(std::string& line) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return closed || !queue.empty(); });
        if (queue.empty()) return false;
        line = std::move(queue.front());
        queue.pop_front();
        return true;
    }
    void close() {
        {
            const std::lock_guard<std::mutex> lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class MemoryEndpoint final : public LineTransport {
public:
    MemoryEndpoint(std::shared_ptr<MemoryChannel> in, std::shared_ptr<MemoryChannel> out)
        : in_(std::move(in)), out_(std::move(out)) {}
    ~MemoryEndpoint() override { close(); }

    bool read_line(std::string& line) override { return in_->pop(line); }
    void write_line(const std::string& line) override { out_->push(line); }
    void close() override {
        in_->close();
        out_->close();
    }

private:
    std::shared_ptr<MemoryChannel> in_;
    std::shared_ptr<MemoryChannel> out_;
};

} // namespace

std::pair<std::unique_ptr<LineTransport>, std::unique_ptr<LineTransport>>
memory_transport_pair() {
    auto a_to_b = std::make_shared<MemoryChannel>();
    auto b_to_a = std::make_shared<MemoryChannel>();
    return {std::make_unique<MemoryEndpoint>(b_to_a, a_to_b),
            std::make_unique<MemoryEndpoint>(a_to_b, b_to_a)};
}

TcpTransport::~TcpTransport() { close(); }

std::unique_ptr<TcpTransport> TcpTransport::connect(const std::string& host, int port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sys_fail("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw TransportError("bad address '" + host + "'");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const int err = errno;
        ::close(fd);
        throw TransportError("connect to " + host + ":" + std::to_string(port) + ": " +
                             std::strerror(err));
    }
    return std::make_unique<TcpTransport>(fd);
}

bool TcpTransport::read_line(std::string& line) {
    for (;;) {
        const std::size_t nl = rbuf_.find('\n');
        if (nl != std::string::npos) {
            line = rbuf_.substr(0, nl);
            rbuf_.erase(0, nl + 1);
            strip_cr(line);
            return true;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) {
            if (rbuf_.empty()) return false;
            line = std::move(rbuf_);
            rbuf_.clear();
            strip_cr(line);
            return true;
        }
        rbuf_.append(chunk, static_cast<std::size_t>(n));
    }
}

void TcpTransport::write_line(const std::string& line) {
    const std::lock_guard<std::mutex> lock(write_mu_);
    std::string out = line;
    out.push_back('\n');
    std::size_t sent = 0;
    while (sent < out.size()) {
        const ssize_t n = ::send(fd_, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
        if (n < 0) sys_fail("send");
        sent += static_cast<std::size_t>(n);
    }
}

void TcpTransport::close() {
    const std::lock_guard<std::mutex> lock(close_mu_);
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

TcpListener::TcpListener(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) sys_fail("socket");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        fd_ = -1;
        throw TransportError("bad address '" + host + "'");
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 8) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        throw TransportError("bind/listen on " + host + ":" + std::to_string(port) + ": " +
                             std::strerror(err));
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0)
        port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<TcpTransport> TcpListener::accept() {
    if (fd_ < 0) return nullptr;
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) return nullptr;
    return std::make_unique<TcpTransport>(client);
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

} // namespace wspso

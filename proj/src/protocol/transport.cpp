#include "hehdc/protocol/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "hehdc/errors.hpp"

namespace hehdc::protocol {

namespace {

// Frames larger than this are treated as stream corruption.
constexpr std::uint32_t kMaxFrameBytes = 1u << 30;

}  // namespace

std::size_t frame_wire_size(const Frame& f) { return 4 + 1 + f.payload.size(); }

// ---------------------------------------------------------------- loopback

namespace {

struct LoopbackChannel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Frame> queue;
    bool closed = false;

    void push(Frame f) {
        {
            std::lock_guard<std::mutex> lock(mu);
            if (closed) throw ProtocolError("send on closed loopback");
            queue.push_back(std::move(f));
        }
        cv.notify_one();
    }

    std::optional<Frame> pop() {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return !queue.empty() || closed; });
        if (queue.empty()) return std::nullopt;
        Frame f = std::move(queue.front());
        queue.pop_front();
        return f;
    }

    void close() {
        {
            std::lock_guard<std::mutex> lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class LoopbackTransport final : public Transport {
public:
    LoopbackTransport(std::shared_ptr<LoopbackChannel> out, std::shared_ptr<LoopbackChannel> in)
        : out_(std::move(out)), in_(std::move(in)) {}
    ~LoopbackTransport() override { close(); }

    void send_frame(const Frame& f) override { out_->push(f); }
    std::optional<Frame> recv_frame() override { return in_->pop(); }
    void close() override {
        out_->close();
        in_->close();
    }

private:
    std::shared_ptr<LoopbackChannel> out_;
    std::shared_ptr<LoopbackChannel> in_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback() {
    auto a2b = std::make_shared<LoopbackChannel>();
    auto b2a = std::make_shared<LoopbackChannel>();
    return {std::make_unique<LoopbackTransport>(a2b, b2a),
            std::make_unique<LoopbackTransport>(b2a, a2b)};
}

// --------------------------------------------------------------------- tcp

namespace {

class TcpTransport final : public Transport {
public:
    explicit TcpTransport(int fd) : fd_(fd) {}
    ~TcpTransport() override { close(); }

    void send_frame(const Frame& f) override {
        if (f.payload.size() >= kMaxFrameBytes) throw ProtocolError("frame too large to send");
        const std::uint32_t len = static_cast<std::uint32_t>(1 + f.payload.size());
        std::uint8_t head[5];
        head[0] = static_cast<std::uint8_t>(len);
        head[1] = static_cast<std::uint8_t>(len >> 8);
        head[2] = static_cast<std::uint8_t>(len >> 16);
        head[3] = static_cast<std::uint8_t>(len >> 24);
        head[4] = static_cast<std::uint8_t>(f.type);
        write_all(head, sizeof head);
        write_all(f.payload.data(), f.payload.size());
    }

    std::optional<Frame> recv_frame() override {
        std::uint8_t head[4];
        const std::size_t got = read_some(head, 4);
        if (got == 0) return std::nullopt;  // clean close at a frame boundary
        if (got < 4) throw ProtocolError("connection closed inside a frame header");
        const std::uint32_t len = std::uint32_t(head[0]) | std::uint32_t(head[1]) << 8 |
                                  std::uint32_t(head[2]) << 16 | std::uint32_t(head[3]) << 24;
        if (len == 0 || len > kMaxFrameBytes) throw ProtocolError("bad frame length");
        Frame f;
        std::uint8_t type = 0;
        if (read_some(&type, 1) != 1) throw ProtocolError("connection closed inside a frame");
        f.type = static_cast<FrameType>(type);
        f.payload.resize(len - 1);
        if (read_some(f.payload.data(), f.payload.size()) != f.payload.size())
            throw ProtocolError("connection closed inside a frame");
        return f;
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    void write_all(const std::uint8_t* p, std::size_t len) {
        while (len > 0) {
            const ssize_t n = ::send(fd_, p, len, MSG_NOSIGNAL);
            if (n <= 0) throw ProtocolError("socket write failed");
            p += n;
            len -= static_cast<std::size_t>(n);
        }
    }

    // Reads exactly `len` bytes unless the peer closes first; returns the
    // count actually read.
    std::size_t read_some(std::uint8_t* p, std::size_t len) {
        std::size_t total = 0;
        while (total < len) {
            const ssize_t n = ::recv(fd_, p + total, len - total, 0);
            if (n == 0) break;
            if (n < 0) throw ProtocolError("socket read failed");
            total += static_cast<std::size_t>(n);
        }
        return total;
    }

    int fd_ = -1;
};

int resolve_and_connect(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr)
        throw ProtocolError("cannot resolve " + host);
    int fd = -1;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw ProtocolError("cannot connect to " + host + ":" + service);
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

}  // namespace

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port) {
    return std::make_unique<TcpTransport>(resolve_and_connect(host, port));
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw ProtocolError("cannot create listening socket");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "0.0.0.0") {
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw ProtocolError("listen host must be an IPv4 address: " + host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(fd_, 8) != 0) {
        ::close(fd_);
        throw ProtocolError("cannot listen on " + host + ":" + std::to_string(port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept() {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) throw ProtocolError("accept failed");
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<TcpTransport>(fd);
}

}  // namespace hehdc::protocol

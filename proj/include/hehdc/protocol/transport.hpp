#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hehdc::protocol {

enum class FrameType : std::uint8_t {
    SessionSetup = 0,
    Query = 1,
    Scores = 2,
    Error = 3,
};

struct Frame {
    FrameType type = FrameType::Error;
    std::vector<std::uint8_t> payload;
};

// Bytes the frame occupies on the wire: u32 length prefix, u8 type, payload.
std::size_t frame_wire_size(const Frame& f);

// Bidirectional, ordered, blocking frame stream. recv_frame returns nullopt
// on a clean close and throws ProtocolError on truncated or oversized
// frames.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send_frame(const Frame& f) = 0;
    virtual std::optional<Frame> recv_frame() = 0;
    virtual void close() = 0;
};

// In-process pair of connected endpoints; frames written to one side are
// read from the other. Safe to drive from two threads.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback();

// Client side of a TCP connection.
std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port);

// Listening socket; accept() yields one Transport per connection.
class TcpListener {
public:
    // Binds to host:port; port 0 picks a free port, readable via port().
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<Transport> accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace hehdc::protocol

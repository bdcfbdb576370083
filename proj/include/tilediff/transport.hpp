#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "tilediff/protocol.hpp"

namespace tilediff {

// Stream endpoint addresses: "tcp://HOST:PORT" or "unix://PATH".
struct Endpoint {
    enum class Kind { tcp, unix_socket };
    Kind kind = Kind::tcp;
    std::string host; // tcp only
    int port = 0;     // tcp only
    std::string path; // unix only

    std::string str() const;
};

Endpoint parse_endpoint(const std::string& address);

/// Blocking frame stream over a connected socket. Every call carries its own
/// timeout; expiry raises ProtocolError(timeout), a closed or failing socket
/// ProtocolError(connection).
class Connection {
public:
    Connection() = default;
    explicit Connection(int fd) : fd_(fd) {}
    ~Connection();

    Connection(Connection&& other) noexcept;
    Connection& operator=(Connection&& other) noexcept;
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    static Connection connect(const std::string& address, std::chrono::milliseconds timeout);

    bool is_open() const noexcept { return fd_ >= 0; }
    void close() noexcept;

    void send_frame(const pxb1::Frame& frame, std::chrono::milliseconds timeout);
    pxb1::Frame receive_frame(std::chrono::milliseconds timeout);

    // Raw access for tests that need to put malformed bytes on the wire.
    void send_bytes(std::span<const std::uint8_t> bytes, std::chrono::milliseconds timeout);

private:
    void read_exact(std::uint8_t* dst, std::size_t n, std::chrono::steady_clock::time_point deadline);

    int fd_ = -1;
};

class Listener {
public:
    // tcp port 0 picks a free port; address() reports the bound one.
    explicit Listener(const std::string& address);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    const std::string& address() const noexcept { return address_; }

    // std::nullopt on timeout.
    std::optional<Connection> accept(std::chrono::milliseconds timeout);

private:
    int fd_ = -1;
    std::string address_;
    std::string unlink_path_;
};

} // namespace tilediff

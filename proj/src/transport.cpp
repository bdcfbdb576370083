#include "tilediff/transport.hpp"

#include <cerrno>
#include <cstring>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

namespace tilediff {

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void fail(ProtocolFailure kind, const std::string& what) { throw ProtocolError(kind, what); }

std::string errno_text(int err) { return std::strerror(err); }

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 1 << 30));
}

// Waits for `events` on fd; throws timeout when the deadline passes first.
void wait_for(int fd, short events, Clock::time_point deadline, const char* what) {
    for (;;) {
        pollfd p{fd, events, 0};
        const int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc > 0) return;
        if (rc == 0) fail(ProtocolFailure::timeout, std::string(what) + " timed out");
        if (errno != EINTR) fail(ProtocolFailure::connection, std::string(what) + ": " + errno_text(errno));
    }
}

void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    if (flags < 0 || ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0) {
        fail(ProtocolFailure::connection, "fcntl: " + errno_text(errno));
    }
}

sockaddr_un unix_address(const std::string& path) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (path.size() >= sizeof(addr.sun_path)) fail(ProtocolFailure::connection, "unix socket path too long: " + path);
    std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
    return addr;
}

class FdGuard {
public:
    explicit FdGuard(int fd) : fd_(fd) {}
    ~FdGuard() {
        if (fd_ >= 0) ::close(fd_);
    }
    int release() {
        const int fd = fd_;
        fd_ = -1;
        return fd;
    }
    int get() const { return fd_; }

private:
    int fd_;
};

// Non-blocking connect bounded by the deadline.
void connect_with_deadline(int fd, const sockaddr* addr, socklen_t len, Clock::time_point deadline,
                           const std::string& where) {
    set_nonblocking(fd);
    if (::connect(fd, addr, len) == 0) return;
    if (errno != EINPROGRESS && errno != EAGAIN) {
        fail(ProtocolFailure::connection, "connect " + where + ": " + errno_text(errno));
    }
    wait_for(fd, POLLOUT, deadline, ("connect " + where).c_str());
    int err = 0;
    socklen_t err_len = sizeof(err);
    ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &err_len);
    if (err != 0) fail(ProtocolFailure::connection, "connect " + where + ": " + errno_text(err));
}

} // namespace

std::string Endpoint::str() const {
    return kind == Kind::tcp ? "tcp://" + host + ":" + std::to_string(port) : "unix://" + path;
}

Endpoint parse_endpoint(const std::string& address) {
    Endpoint ep;
    if (address.rfind("unix://", 0) == 0) {
        ep.kind = Endpoint::Kind::unix_socket;
        ep.path = address.substr(7);
        if (ep.path.empty()) throw ConfigError("unix address needs a path: '" + address + "'");
        return ep;
    }
    if (address.rfind("tcp://", 0) == 0) {
        const std::string rest = address.substr(6);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0) throw ConfigError("tcp address needs HOST:PORT: '" + address + "'");
        ep.host = rest.substr(0, colon);
        try {
            std::size_t used = 0;
            ep.port = std::stoi(rest.substr(colon + 1), &used);
            if (used != rest.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("bad tcp port in '" + address + "'");
        }
        if (ep.port < 0 || ep.port > 65535) throw ConfigError("tcp port out of range in '" + address + "'");
        return ep;
    }
    throw ConfigError("address must start with tcp:// or unix://, got '" + address + "'");
}

Connection::~Connection() { close(); }

Connection::Connection(Connection&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Connection& Connection::operator=(Connection&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Connection::close() noexcept {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Connection Connection::connect(const std::string& address, std::chrono::milliseconds timeout) {
    const Endpoint ep = parse_endpoint(address);
    const auto deadline = Clock::now() + timeout;
    if (ep.kind == Endpoint::Kind::unix_socket) {
        FdGuard fd(::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0));
        if (fd.get() < 0) fail(ProtocolFailure::connection, "socket: " + errno_text(errno));
        const auto addr = unix_address(ep.path);
        connect_with_deadline(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr), deadline, address);
        return Connection(fd.release());
    }

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string port = std::to_string(ep.port);
    if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
        fail(ProtocolFailure::connection, "resolve " + ep.host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses";
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
        FdGuard fd(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (fd.get() < 0) continue;
        try {
            connect_with_deadline(fd.get(), ai->ai_addr, ai->ai_addrlen, deadline, address);
        } catch (const ProtocolError& e) {
            last_error = e.what();
            if (e.failure() == ProtocolFailure::timeout) {
                ::freeaddrinfo(found);
                throw;
            }
            continue;
        }
        int one = 1;
        ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        ::freeaddrinfo(found);
        return Connection(fd.release());
    }
    ::freeaddrinfo(found);
    fail(ProtocolFailure::connection, last_error);
}

void Connection::send_bytes(std::span<const std::uint8_t> bytes, std::chrono::milliseconds timeout) {
    if (fd_ < 0) fail(ProtocolFailure::connection, "connection is closed");
    const auto deadline = Clock::now() + timeout;
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n > 0) {
            sent += static_cast<std::size_t>(n);
        } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            wait_for(fd_, POLLOUT, deadline, "send");
        } else if (n < 0 && errno == EINTR) {
            continue;
        } else {
            fail(ProtocolFailure::connection, "send: " + errno_text(errno));
        }
    }
}

void Connection::send_frame(const pxb1::Frame& frame, std::chrono::milliseconds timeout) {
    send_bytes(pxb1::encode_frame(frame), timeout);
}

void Connection::read_exact(std::uint8_t* dst, std::size_t n, Clock::time_point deadline) {
    std::size_t got = 0;
    while (got < n) {
        const ssize_t r = ::recv(fd_, dst + got, n - got, 0);
        if (r > 0) {
            got += static_cast<std::size_t>(r);
        } else if (r == 0) {
            fail(ProtocolFailure::connection, "peer closed the connection");
        } else if (errno == EAGAIN || errno == EWOULDBLOCK) {
            wait_for(fd_, POLLIN, deadline, "receive");
        } else if (errno != EINTR) {
            fail(ProtocolFailure::connection, "recv: " + errno_text(errno));
        }
    }
}

pxb1::Frame Connection::receive_frame(std::chrono::milliseconds timeout) {
    if (fd_ < 0) fail(ProtocolFailure::connection, "connection is closed");
    const auto deadline = Clock::now() + timeout;
    std::uint8_t header[pxb1::kHeaderSize];
    read_exact(header, sizeof(header), deadline);
    const auto h = pxb1::decode_header(header);
    pxb1::Frame frame{h.type, std::vector<std::uint8_t>(h.payload_size)};
    read_exact(frame.payload.data(), frame.payload.size(), deadline);
    return frame;
}

Listener::Listener(const std::string& address) {
    const Endpoint ep = parse_endpoint(address);
    if (ep.kind == Endpoint::Kind::unix_socket) {
        FdGuard fd(::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0));
        if (fd.get() < 0) fail(ProtocolFailure::connection, "socket: " + errno_text(errno));
        const auto addr = unix_address(ep.path);
        ::unlink(ep.path.c_str());
        if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
            fail(ProtocolFailure::connection, "bind " + address + ": " + errno_text(errno));
        }
        if (::listen(fd.get(), 8) < 0) fail(ProtocolFailure::connection, "listen: " + errno_text(errno));
        fd_ = fd.release();
        address_ = address;
        unlink_path_ = ep.path;
        return;
    }

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(ep.port));
    if (ep.host == "localhost") {
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    } else if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
        fail(ProtocolFailure::connection, "listener needs an IPv4 literal, got " + ep.host);
    }
    FdGuard fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (fd.get() < 0) fail(ProtocolFailure::connection, "socket: " + errno_text(errno));
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
        fail(ProtocolFailure::connection, "bind " + address + ": " + errno_text(errno));
    }
    if (::listen(fd.get(), 8) < 0) fail(ProtocolFailure::connection, "listen: " + errno_text(errno));
    socklen_t len = sizeof(addr);
    ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    fd_ = fd.release();
    address_ = "tcp://" + ep.host + ":" + std::to_string(ntohs(addr.sin_port));
}

Listener::~Listener() {
    if (fd_ >= 0) ::close(fd_);
    if (!unlink_path_.empty()) ::unlink(unlink_path_.c_str());
}

std::optional<Connection> Listener::accept(std::chrono::milliseconds timeout) {
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) return std::nullopt;
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) return std::nullopt;
    set_nonblocking(fd);
    return Connection(fd);
}

} // namespace tilediff

#pragma once

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tilediff/protocol.hpp"
#include "tilediff/transport.hpp"

namespace tilediff::testing {

// In-process PXB1 server for bridge tests. Answers HELLO with `ack` and
// DENOISE_REQ according to `behavior`; records every requested timestep.
class MockSidecar {
public:
    enum class Behavior {
        zeros,          // DENOISE_RSP of zeros
        remote_error,   // ERROR frame (internal) for every request
        stall,          // never answers requests
        bad_magic,      // answers HELLO with a corrupt header
        reject_version, // ERROR unsupported_version on HELLO
        wrong_shape,    // DENOISE_RSP with one extra column
    };

    struct Options {
        pxb1::HelloAck ack;
        Behavior behavior = Behavior::zeros;
        std::string address = "tcp://127.0.0.1:0";
    };

    explicit MockSidecar(Options options);
    ~MockSidecar();
    MockSidecar(const MockSidecar&) = delete;
    MockSidecar& operator=(const MockSidecar&) = delete;

    const std::string& address() const { return listener_.address(); }
    std::vector<std::uint32_t> requested_timesteps() const;
    std::vector<std::string> prompts() const;
    std::uint32_t last_hello_version() const { return hello_version_.load(); }

private:
    void run();
    void serve(Connection& conn);

    Options options_;
    Listener listener_;
    std::atomic<bool> stop_{false};
    std::atomic<std::uint32_t> hello_version_{0};
    mutable std::mutex mutex_;
    std::vector<std::uint32_t> timesteps_;
    std::vector<std::string> prompts_;
    std::thread thread_;
};

// Default capabilities of a four-step latent model.
pxb1::HelloAck four_step_ack(std::uint32_t min_timestep = 0, std::uint32_t patch = 0);

} // namespace tilediff::testing

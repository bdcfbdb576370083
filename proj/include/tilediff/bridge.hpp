#pragma once

#include <chrono>
#include <mutex>
#include <string>

#include "tilediff/denoiser.hpp"
#include "tilediff/transport.hpp"

namespace tilediff {

struct BridgeOptions {
    std::string address;
    std::chrono::milliseconds timeout{5000};
    std::string client_name = "tilediff";
};

/// Denoiser served by an external process over PXB1. Connects and performs
/// the HELLO exchange in the constructor. One request is in flight at a time;
/// the connection is dropped after any transport or framing failure and later
/// calls fail with ProtocolError(connection).
class BridgeDenoiser final : public Denoiser {
public:
    explicit BridgeDenoiser(BridgeOptions options);

    const Capabilities& capabilities() const override { return caps_; }
    const BridgeOptions& options() const noexcept { return options_; }

protected:
    Grid predict_impl(const Grid& z, int t, const GuidanceContext& ctx) override;

private:
    void handshake();
    // ERROR frames become ProtocolError(remote_failure) or version_mismatch.
    [[noreturn]] void raise_remote(const pxb1::Frame& frame) const;

    BridgeOptions options_;
    Connection conn_;
    Capabilities caps_;
    std::mutex mutex_;
};

} // namespace tilediff

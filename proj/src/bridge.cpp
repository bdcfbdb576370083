#include "tilediff/bridge.hpp"

#include <limits>

namespace tilediff {

BridgeDenoiser::BridgeDenoiser(BridgeOptions options) : options_(std::move(options)) {
    conn_ = Connection::connect(options_.address, options_.timeout);
    try {
        handshake();
    } catch (...) {
        conn_.close();
        throw;
    }
}

void BridgeDenoiser::raise_remote(const pxb1::Frame& frame) const {
    const auto err = pxb1::decode_error(frame);
    if (err.code == static_cast<std::uint32_t>(pxb1::ErrorCode::unsupported_version)) {
        throw ProtocolError(ProtocolFailure::version_mismatch, err.message);
    }
    throw ProtocolError(ProtocolFailure::remote_failure, "code " + std::to_string(err.code) + ": " + err.message);
}

void BridgeDenoiser::handshake() {
    conn_.send_frame(pxb1::encode(pxb1::Hello{pxb1::kVersion, options_.client_name}), options_.timeout);
    const auto reply = conn_.receive_frame(options_.timeout);
    if (reply.type == pxb1::FrameType::error) raise_remote(reply);
    const auto ack = pxb1::decode_hello_ack(reply);

    constexpr auto kMaxT = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
    caps_.model_name = ack.model;
    for (auto t : ack.timesteps) {
        if (t > kMaxT) throw ProtocolError(ProtocolFailure::malformed_frame, "advertised timestep out of range");
        caps_.accepted_timesteps.push_back(static_cast<int>(t));
    }
    if (ack.min_timestep > kMaxT) throw ProtocolError(ProtocolFailure::malformed_frame, "min_timestep out of range");
    caps_.min_timestep = static_cast<int>(ack.min_timestep);
    caps_.channels = ack.channels;
    caps_.patch_height = ack.patch_height;
    caps_.patch_width = ack.patch_width;
    caps_.concurrent_safe = false;
}

Grid BridgeDenoiser::predict_impl(const Grid& z, int t, const GuidanceContext& ctx) {
    std::lock_guard lock(mutex_);
    if (!conn_.is_open()) throw ProtocolError(ProtocolFailure::connection, "bridge connection was closed");
    pxb1::DenoiseRequest req{static_cast<std::uint32_t>(t), ctx.guidance_scale, ctx.prompt, z};
    try {
        conn_.send_frame(pxb1::encode(req), options_.timeout);
        const auto reply = conn_.receive_frame(options_.timeout);
        // The stream stays in sync after an ERROR frame, so keep the connection.
        if (reply.type == pxb1::FrameType::error) raise_remote(reply);
        auto rsp = pxb1::decode_denoise_response(reply);
        if (rsp.prediction.shape() != z.shape()) {
            throw ProtocolError(ProtocolFailure::malformed_frame, "response shape " +
                                                                      to_string(rsp.prediction.shape()) +
                                                                      " does not match request " + to_string(z.shape()));
        }
        return std::move(rsp.prediction);
    } catch (const ProtocolError& e) {
        if (e.failure() != ProtocolFailure::remote_failure) conn_.close();
        throw;
    }
}

} // namespace tilediff

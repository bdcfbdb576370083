#include "mock_sidecar.hpp"

#include <algorithm>
#include <chrono>

namespace tilediff::testing {

using namespace std::chrono_literals;

pxb1::HelloAck four_step_ack(std::uint32_t min_timestep, std::uint32_t patch) {
    return {"mock-four-step", {999, 749, 499, 249}, min_timestep, 4, patch, patch};
}

MockSidecar::MockSidecar(Options options) : options_(std::move(options)), listener_(options_.address) {
    thread_ = std::thread([this] { run(); });
}

MockSidecar::~MockSidecar() {
    stop_ = true;
    thread_.join();
}

std::vector<std::uint32_t> MockSidecar::requested_timesteps() const {
    std::lock_guard lock(mutex_);
    return timesteps_;
}

std::vector<std::string> MockSidecar::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

void MockSidecar::run() {
    while (!stop_) {
        auto conn = listener_.accept(20ms);
        if (!conn) continue;
        try {
            serve(*conn);
        } catch (const Error&) {
            // Client went away or sent garbage; wait for the next one.
        }
    }
}

void MockSidecar::serve(Connection& conn) {
    auto next_frame = [&]() -> std::optional<pxb1::Frame> {
        while (!stop_) {
            try {
                return conn.receive_frame(20ms);
            } catch (const ProtocolError& e) {
                if (e.failure() != ProtocolFailure::timeout) throw;
            }
        }
        return std::nullopt;
    };

    auto hello_frame = next_frame();
    if (!hello_frame) return;
    const auto hello = pxb1::decode_hello(*hello_frame);
    hello_version_ = hello.version;
    if (options_.behavior == Behavior::reject_version || hello.version != pxb1::kVersion) {
        conn.send_frame(pxb1::encode(pxb1::ErrorMessage{
                            static_cast<std::uint32_t>(pxb1::ErrorCode::unsupported_version), "version not supported"}),
                        1s);
        return;
    }
    if (options_.behavior == Behavior::bad_magic) {
        auto bytes = pxb1::encode_frame(pxb1::encode(options_.ack));
        bytes[0] = 'Q';
        conn.send_bytes(bytes, 1s);
        return;
    }
    conn.send_frame(pxb1::encode(options_.ack), 1s);

    while (auto frame = next_frame()) {
        const auto req = pxb1::decode_denoise_request(*frame);
        {
            std::lock_guard lock(mutex_);
            timesteps_.push_back(req.timestep);
            prompts_.push_back(req.prompt);
        }
        const auto& ts = options_.ack.timesteps;
        const bool accepted = req.timestep >= options_.ack.min_timestep &&
                              (ts.empty() || std::find(ts.begin(), ts.end(), req.timestep) != ts.end());
        if (!accepted) {
            conn.send_frame(pxb1::encode(pxb1::ErrorMessage{
                                static_cast<std::uint32_t>(pxb1::ErrorCode::rejected_timestep), "timestep rejected"}),
                            1s);
            continue;
        }
        switch (options_.behavior) {
        case Behavior::remote_error:
            conn.send_frame(pxb1::encode(pxb1::ErrorMessage{static_cast<std::uint32_t>(pxb1::ErrorCode::internal),
                                                            "model exploded"}),
                            1s);
            break;
        case Behavior::stall:
            while (!stop_) std::this_thread::sleep_for(5ms);
            return;
        case Behavior::wrong_shape: {
            const auto& s = req.latent.shape();
            conn.send_frame(pxb1::encode(pxb1::DenoiseResponse{Grid(s.channels, s.height, s.width + 1)}), 1s);
            break;
        }
        default:
            conn.send_frame(pxb1::encode(pxb1::DenoiseResponse{Grid(req.latent.shape())}), 1s);
            break;
        }
    }
}

} // namespace tilediff::testing

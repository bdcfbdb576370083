#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tilediff/grid.hpp"

// PXB1 denoiser wire protocol. Every frame is
//   "PXB1" | u8 type | u64 payload length | payload
// with all integers and floats little-endian.
namespace tilediff::pxb1 {

inline constexpr std::array<std::uint8_t, 4> kMagic{'P', 'X', 'B', '1'};
inline constexpr std::size_t kHeaderSize = 13;
inline constexpr std::uint32_t kVersion = 1;
// Frames above this size are treated as corrupt rather than allocated.
inline constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 31;

enum class FrameType : std::uint8_t {
    hello = 1,
    hello_ack = 2,
    denoise_request = 3,
    denoise_response = 4,
    error = 5,
};

// Codes carried by ERROR frames.
enum class ErrorCode : std::uint32_t {
    bad_request = 1,
    unsupported_version = 2,
    rejected_timestep = 3,
    internal = 4,
};

struct Frame {
    FrameType type = FrameType::error;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

struct FrameHeader {
    FrameType type;
    std::uint64_t payload_size;
};

// Validates magic, type and size limit; throws ProtocolError(malformed_frame).
FrameHeader decode_header(std::span<const std::uint8_t> header);

// Decodes exactly one complete frame; trailing bytes are malformed.
Frame decode_frame(std::span<const std::uint8_t> bytes);

struct Hello {
    std::uint32_t version = kVersion;
    std::string client;

    friend bool operator==(const Hello&, const Hello&) = default;
};

struct HelloAck {
    std::string model;
    std::vector<std::uint32_t> timesteps; // empty: all accepted
    std::uint32_t min_timestep = 0;
    std::uint32_t channels = 0;
    std::uint32_t patch_height = 0;
    std::uint32_t patch_width = 0;

    friend bool operator==(const HelloAck&, const HelloAck&) = default;
};

struct DenoiseRequest {
    std::uint32_t timestep = 0;
    float guidance = 0.0f;
    std::string prompt;
    Grid latent;

    friend bool operator==(const DenoiseRequest&, const DenoiseRequest&) = default;
};

struct DenoiseResponse {
    Grid prediction;

    friend bool operator==(const DenoiseResponse&, const DenoiseResponse&) = default;
};

struct ErrorMessage {
    std::uint32_t code = 0;
    std::string message;

    friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

Frame encode(const Hello& m);
Frame encode(const HelloAck& m);
Frame encode(const DenoiseRequest& m);
Frame encode(const DenoiseResponse& m);
Frame encode(const ErrorMessage& m);

// Each decoder checks the frame type and consumes the payload exactly.
Hello decode_hello(const Frame& f);
HelloAck decode_hello_ack(const Frame& f);
DenoiseRequest decode_denoise_request(const Frame& f);
DenoiseResponse decode_denoise_response(const Frame& f);
ErrorMessage decode_error(const Frame& f);

std::string to_string(FrameType type);

} // namespace tilediff::pxb1

#include "tilediff/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "tilediff/grid_io.hpp"

namespace tilediff::pxb1 {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw ProtocolError(ProtocolFailure::malformed_frame, what); }

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

    std::uint32_t u32() {
        need(4);
        const auto v = le::get_u32(bytes_, pos_);
        pos_ += 4;
        return v;
    }

    float f32() {
        need(4);
        const auto v = le::get_f32(bytes_, pos_);
        pos_ += 4;
        return v;
    }

    std::string text() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(bytes_.begin() + static_cast<long>(pos_), bytes_.begin() + static_cast<long>(pos_ + n));
        pos_ += n;
        return s;
    }

    Grid grid(std::uint32_t c, std::uint32_t h, std::uint32_t w) {
        if (c == 0 || h == 0 || w == 0) malformed(std::string(what_) + ": zero grid dimension");
        const std::uint64_t count = std::uint64_t{c} * h * w;
        if (count > remaining() / 4) malformed(std::string(what_) + ": grid data truncated");
        std::vector<float> data(count);
        for (auto& v : data) v = f32();
        return Grid(Shape{c, h, w}, std::move(data));
    }

    void finish() const {
        if (pos_ != bytes_.size()) malformed(std::string(what_) + ": " + std::to_string(bytes_.size() - pos_) +
                                             " trailing payload bytes");
    }

private:
    std::size_t remaining() const { return bytes_.size() - pos_; }

    void need(std::size_t n) const {
        if (remaining() < n) malformed(std::string(what_) + ": payload truncated");
    }

    std::span<const std::uint8_t> bytes_;
    const char* what_;
    std::size_t pos_ = 0;
};

void put_text(std::vector<std::uint8_t>& out, const std::string& s) {
    le::put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void put_dims(std::vector<std::uint8_t>& out, const Grid& g) {
    le::put_u32(out, static_cast<std::uint32_t>(g.channels()));
    le::put_u32(out, static_cast<std::uint32_t>(g.height()));
    le::put_u32(out, static_cast<std::uint32_t>(g.width()));
}

void put_values(std::vector<std::uint8_t>& out, const Grid& g) {
    for (float v : g.values()) le::put_f32(out, v);
}

void expect(const Frame& f, FrameType type) {
    if (f.type != type) malformed("expected " + to_string(type) + " frame, got " + to_string(f.type));
}

bool known_type(std::uint8_t t) { return t >= 1 && t <= 5; }

} // namespace

std::string to_string(FrameType type) {
    switch (type) {
    case FrameType::hello: return "HELLO";
    case FrameType::hello_ack: return "HELLO_ACK";
    case FrameType::denoise_request: return "DENOISE_REQ";
    case FrameType::denoise_response: return "DENOISE_RSP";
    case FrameType::error: return "ERROR";
    }
    return "type " + std::to_string(static_cast<int>(type));
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.reserve(kHeaderSize + frame.payload.size());
    out.push_back(static_cast<std::uint8_t>(frame.type));
    le::put_u64(out, frame.payload.size());
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

FrameHeader decode_header(std::span<const std::uint8_t> header) {
    if (header.size() < kHeaderSize) malformed("frame header truncated");
    if (!std::equal(kMagic.begin(), kMagic.end(), header.begin())) malformed("bad magic");
    if (!known_type(header[4])) malformed("unknown frame type " + std::to_string(header[4]));
    const std::uint64_t size = le::get_u64(header, 5);
    if (size > kMaxPayload) malformed("payload length " + std::to_string(size) + " exceeds limit");
    return {static_cast<FrameType>(header[4]), size};
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    const auto h = decode_header(bytes);
    if (bytes.size() - kHeaderSize != h.payload_size) {
        malformed("frame holds " + std::to_string(bytes.size() - kHeaderSize) + " payload bytes, header says " +
                  std::to_string(h.payload_size));
    }
    return {h.type, std::vector<std::uint8_t>(bytes.begin() + kHeaderSize, bytes.end())};
}

Frame encode(const Hello& m) {
    Frame f{FrameType::hello, {}};
    le::put_u32(f.payload, m.version);
    put_text(f.payload, m.client);
    return f;
}

Frame encode(const HelloAck& m) {
    Frame f{FrameType::hello_ack, {}};
    put_text(f.payload, m.model);
    le::put_u32(f.payload, static_cast<std::uint32_t>(m.timesteps.size()));
    for (auto t : m.timesteps) le::put_u32(f.payload, t);
    le::put_u32(f.payload, m.min_timestep);
    le::put_u32(f.payload, m.channels);
    le::put_u32(f.payload, m.patch_height);
    le::put_u32(f.payload, m.patch_width);
    return f;
}

Frame encode(const DenoiseRequest& m) {
    Frame f{FrameType::denoise_request, {}};
    put_dims(f.payload, m.latent);
    le::put_u32(f.payload, m.timestep);
    le::put_f32(f.payload, m.guidance);
    put_text(f.payload, m.prompt);
    put_values(f.payload, m.latent);
    return f;
}

Frame encode(const DenoiseResponse& m) {
    Frame f{FrameType::denoise_response, {}};
    put_dims(f.payload, m.prediction);
    put_values(f.payload, m.prediction);
    return f;
}

Frame encode(const ErrorMessage& m) {
    Frame f{FrameType::error, {}};
    le::put_u32(f.payload, m.code);
    put_text(f.payload, m.message);
    return f;
}

Hello decode_hello(const Frame& f) {
    expect(f, FrameType::hello);
    Reader r(f.payload, "HELLO");
    Hello m;
    m.version = r.u32();
    m.client = r.text();
    r.finish();
    return m;
}

HelloAck decode_hello_ack(const Frame& f) {
    expect(f, FrameType::hello_ack);
    Reader r(f.payload, "HELLO_ACK");
    HelloAck m;
    m.model = r.text();
    const std::uint32_t n = r.u32();
    if (n > f.payload.size() / 4) malformed("HELLO_ACK: timestep count exceeds payload");
    m.timesteps.resize(n);
    for (auto& t : m.timesteps) t = r.u32();
    m.min_timestep = r.u32();
    m.channels = r.u32();
    m.patch_height = r.u32();
    m.patch_width = r.u32();
    r.finish();
    return m;
}

DenoiseRequest decode_denoise_request(const Frame& f) {
    expect(f, FrameType::denoise_request);
    Reader r(f.payload, "DENOISE_REQ");
    DenoiseRequest m;
    const std::uint32_t c = r.u32();
    const std::uint32_t h = r.u32();
    const std::uint32_t w = r.u32();
    m.timestep = r.u32();
    m.guidance = r.f32();
    m.prompt = r.text();
    m.latent = r.grid(c, h, w);
    r.finish();
    return m;
}

DenoiseResponse decode_denoise_response(const Frame& f) {
    expect(f, FrameType::denoise_response);
    Reader r(f.payload, "DENOISE_RSP");
    const std::uint32_t c = r.u32();
    const std::uint32_t h = r.u32();
    const std::uint32_t w = r.u32();
    DenoiseResponse m{r.grid(c, h, w)};
    r.finish();
    return m;
}

ErrorMessage decode_error(const Frame& f) {
    expect(f, FrameType::error);
    Reader r(f.payload, "ERROR");
    ErrorMessage m;
    m.code = r.u32();
    m.message = r.text();
    r.finish();
    return m;
}

} // namespace tilediff::pxb1

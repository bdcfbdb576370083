#include "tilediff/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace tilediff {

namespace le {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
    return v;
}

float get_f32(std::span<const std::uint8_t> in, std::size_t offset) {
    return std::bit_cast<float>(get_u32(in, offset));
}

} // namespace le

namespace {

constexpr char kRgfMagic[4] = {'R', 'G', 'F', '1'};
constexpr std::size_t kRgfHeader = 16;

std::uint8_t to_byte(float v) {
    const double clamped = std::clamp(std::isfinite(v) ? static_cast<double>(v) : 0.0, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

// Reads the next whitespace-separated PNM header token, skipping comments.
std::string next_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(bytes[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    std::string token;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
        token.push_back(static_cast<char>(bytes[pos++]));
    }
    return token;
}

std::size_t parse_header_number(const std::string& token, const std::filesystem::path& path) {
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw IoError(path.string() + ": malformed PNM header");
    }
    return std::stoul(token);
}

} // namespace

std::vector<std::uint8_t> encode_rgf(const Grid& g) {
    std::vector<std::uint8_t> out;
    out.reserve(kRgfHeader + 4 * g.size());
    out.insert(out.end(), std::begin(kRgfMagic), std::end(kRgfMagic));
    le::put_u32(out, static_cast<std::uint32_t>(g.channels()));
    le::put_u32(out, static_cast<std::uint32_t>(g.height()));
    le::put_u32(out, static_cast<std::uint32_t>(g.width()));
    for (float v : g.values()) le::put_f32(out, v);
    return out;
}

Grid decode_rgf(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kRgfHeader || std::memcmp(bytes.data(), kRgfMagic, 4) != 0) {
        throw IoError("not an RGF1 grid (bad magic or truncated header)");
    }
    const Shape shape{le::get_u32(bytes, 4), le::get_u32(bytes, 8), le::get_u32(bytes, 12)};
    if (shape.size() == 0) throw IoError("RGF1 grid with zero dimension " + to_string(shape));
    if (bytes.size() != kRgfHeader + 4 * shape.size()) {
        throw IoError("RGF1 payload length " + std::to_string(bytes.size() - kRgfHeader) +
                      " does not match shape " + to_string(shape));
    }
    std::vector<float> data(shape.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = le::get_f32(bytes, kRgfHeader + 4 * i);
    return Grid(shape, std::move(data));
}

void write_rgf(const std::filesystem::path& path, const Grid& g) { write_file_atomic(path, encode_rgf(g)); }

Grid read_rgf(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_rgf(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_pnm(const std::filesystem::path& path, const Grid& g) {
    const bool color = g.channels() >= 3;
    std::ostringstream header;
    header << (color ? "P6" : "P5") << "\n" << g.width() << " " << g.height() << "\n255\n";
    const std::string head = header.str();
    std::vector<std::uint8_t> bytes(head.begin(), head.end());
    const std::size_t bands = color ? 3 : 1;
    bytes.reserve(bytes.size() + bands * g.height() * g.width());
    for (std::size_t y = 0; y < g.height(); ++y) {
        for (std::size_t x = 0; x < g.width(); ++x) {
            for (std::size_t c = 0; c < bands; ++c) bytes.push_back(to_byte(g.at(c, y, x)));
        }
    }
    write_file_atomic(path, bytes);
}

Grid read_pnm(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    std::size_t pos = 0;
    const std::string magic = next_token(bytes, pos);
    if (magic != "P5" && magic != "P6") throw IoError(path.string() + ": unsupported PNM type '" + magic + "'");
    const std::size_t width = parse_header_number(next_token(bytes, pos), path);
    const std::size_t height = parse_header_number(next_token(bytes, pos), path);
    const std::size_t maxval = parse_header_number(next_token(bytes, pos), path);
    if (maxval != 255) throw IoError(path.string() + ": only 8-bit PNM is supported");
    if (width == 0 || height == 0) throw IoError(path.string() + ": empty image");
    ++pos; // single whitespace byte after maxval
    const std::size_t bands = magic == "P6" ? 3 : 1;
    if (bytes.size() < pos + bands * width * height) throw IoError(path.string() + ": truncated PNM data");
    Grid g(bands, height, width);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < bands; ++c) {
                g.at(c, y, x) = static_cast<float>(bytes[pos++]) / 255.0f;
            }
        }
    }
    return g;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace tilediff

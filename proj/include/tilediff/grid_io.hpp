#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tilediff/grid.hpp"

namespace tilediff {

// RGF1 raw grid format:
//   "RGF1" | u32 channels | u32 height | u32 width | f32[c*h*w]
// All fields little-endian, data row-major.
std::vector<std::uint8_t> encode_rgf(const Grid& g);
Grid decode_rgf(std::span<const std::uint8_t> bytes);

void write_rgf(const std::filesystem::path& path, const Grid& g);
Grid read_rgf(const std::filesystem::path& path);

// 8-bit binary PGM (1 channel) or PPM (3 channels). Values in [0,1] map to
// 0..255, anything outside is clamped. Grids with more than three channels are
// written from their first three.
void write_pnm(const std::filesystem::path& path, const Grid& g);
Grid read_pnm(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames over `path`, so readers never
// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Little-endian primitives shared with the wire protocol.
namespace le {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t offset);
float get_f32(std::span<const std::uint8_t> in, std::size_t offset);

} // namespace le

} // namespace tilediff

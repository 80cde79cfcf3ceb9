#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace egospeed::detail {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline std::uint32_t load_u32_le(const std::uint8_t* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint32_t load_u32_be(const std::uint8_t* p) noexcept {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline float load_f32_le(const std::uint8_t* p) noexcept {
  return std::bit_cast<float>(load_u32_le(p));
}

inline float load_f32_be(const std::uint8_t* p) noexcept {
  return std::bit_cast<float>(load_u32_be(p));
}

inline void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xffu));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xffu));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xffu));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xffu));
}

inline void append_f32_le(std::vector<std::uint8_t>& out, float v) {
  append_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

// 16-bit PNG pixels in native order, interleaved channels.
struct Png16 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint16_t> pixels;
};

Png16 read_png16(const std::filesystem::path& path);
void write_png16(const std::filesystem::path& path, const Png16& image);

}  // namespace egospeed::detail

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "binary_io.hpp"
#include "egospeed/error.hpp"
#include "egospeed/ingest.hpp"

namespace egospeed {
namespace {

constexpr std::size_t kFloHeaderBytes = 12;
constexpr double kFloInvalidThreshold = 1e9;
constexpr double kKittiFlowOffset = 32768.0;
constexpr double kKittiFlowScale = 64.0;
constexpr double kPng16Scale = 256.0;

std::size_t pixel_count(std::uint32_t width, std::uint32_t height, const std::filesystem::path& path) {
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16)) {
    throw Error(ErrorCode::kBadHeader, path.string() + ": implausible extent " +
                                           std::to_string(width) + "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * height;
}

std::uint16_t to_u16(double value) {
  return static_cast<std::uint16_t>(std::clamp(std::round(value), 0.0, 65535.0));
}

// Parses the three whitespace-separated PFM header tokens. Returns the byte
// offset of the raster.
std::size_t parse_pfm_header(std::span<const std::uint8_t> bytes, const std::filesystem::path& path,
                             std::string tokens[3]) {
  std::size_t pos = 0;
  auto next_token = [&](std::string& out) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) out.push_back(static_cast<char>(bytes[pos++]));
  };
  std::string magic;
  next_token(magic);
  if (magic != "Pf") {
    throw Error(ErrorCode::kBadHeader, path.string() + ": expected grayscale PFM magic 'Pf'");
  }
  for (int i = 0; i < 3; ++i) next_token(tokens[i]);
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": PFM header incomplete");
  }
  return pos + 1;  // single whitespace byte terminates the header
}

long parse_long(const std::string& token, const std::filesystem::path& path) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || *end != '\0') {
    throw Error(ErrorCode::kBadHeader, path.string() + ": bad header field '" + token + "'");
  }
  return v;
}

ScalarField read_pfm(const std::filesystem::path& path, double scale) {
  const auto bytes = detail::read_file_bytes(path);
  std::string tokens[3];
  const std::size_t offset = parse_pfm_header(bytes, path, tokens);
  const long width = parse_long(tokens[0], path);
  const long height = parse_long(tokens[1], path);
  char* end = nullptr;
  const double endian_scale = std::strtod(tokens[2].c_str(), &end);
  if (tokens[2].empty() || *end != '\0' || endian_scale == 0.0 || width <= 0 || height <= 0) {
    throw Error(ErrorCode::kBadHeader, path.string() + ": bad PFM header");
  }
  const bool little = endian_scale < 0.0;
  const std::size_t n = pixel_count(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height), path);
  if (bytes.size() < offset + 4 * n) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": PFM raster shorter than header says");
  }
  std::vector<double> values(n);
  const int w = static_cast<int>(width);
  const int h = static_cast<int>(height);
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;  // bottom-to-top
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* p = bytes.data() + offset + 4 * (static_cast<std::size_t>(row) * w + x);
      const float f = little ? detail::load_f32_le(p) : detail::load_f32_be(p);
      values[static_cast<std::size_t>(y) * w + x] = static_cast<double>(f) * scale;
    }
  }
  return ScalarField(w, h, std::move(values));
}

ScalarField read_png16_scalar(const std::filesystem::path& path, double scale) {
  const auto image = detail::read_png16(path);
  if (image.channels != 1) {
    throw Error(ErrorCode::kWrongChannelCount,
                path.string() + ": expected 1 channel, got " + std::to_string(image.channels));
  }
  std::vector<double> values(image.pixels.size());
  Mask valid(image.pixels.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(image.pixels[i]) / kPng16Scale * scale;
    valid[i] = image.pixels[i] != 0;
  }
  return ScalarField(image.width, image.height, std::move(values), std::move(valid));
}

ScalarField read_float_raw(const std::filesystem::path& path, double scale) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() < 8) throw Error(ErrorCode::kTruncatedFile, path.string() + ": header truncated");
  const std::uint32_t width = detail::load_u32_le(bytes.data());
  const std::uint32_t height = detail::load_u32_le(bytes.data() + 4);
  const std::size_t n = pixel_count(width, height, path);
  if (bytes.size() < 8 + 4 * n) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": raster truncated");
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = static_cast<double>(detail::load_f32_le(bytes.data() + 8 + 4 * i)) * scale;
  }
  return ScalarField(static_cast<int>(width), static_cast<int>(height), std::move(values));
}

}  // namespace

FlowField read_flo(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() < 4) throw Error(ErrorCode::kTruncatedFile, path.string() + ": no magic");
  if (detail::load_f32_le(bytes.data()) != kFloMagic) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": not a .flo file");
  }
  if (bytes.size() < kFloHeaderBytes) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": header truncated");
  }
  const std::uint32_t width = detail::load_u32_le(bytes.data() + 4);
  const std::uint32_t height = detail::load_u32_le(bytes.data() + 8);
  const std::size_t n = pixel_count(width, height, path);
  if (bytes.size() < kFloHeaderBytes + 8 * n) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": flow raster truncated");
  }
  std::vector<double> u(n), v(n);
  Mask valid(n, 1);
  const std::uint8_t* p = bytes.data() + kFloHeaderBytes;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    u[i] = detail::load_f32_le(p);
    v[i] = detail::load_f32_le(p + 4);
    if (std::abs(u[i]) > kFloInvalidThreshold || std::abs(v[i]) > kFloInvalidThreshold) valid[i] = 0;
  }
  return FlowField(static_cast<int>(width), static_cast<int>(height), std::move(u), std::move(v),
                   std::move(valid));
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  std::vector<std::uint8_t> out;
  out.reserve(kFloHeaderBytes + 8 * flow.size());
  detail::append_f32_le(out, kFloMagic);
  detail::append_u32_le(out, static_cast<std::uint32_t>(flow.width()));
  detail::append_u32_le(out, static_cast<std::uint32_t>(flow.height()));
  const auto u = flow.u();
  const auto v = flow.v();
  const auto valid = flow.mask();
  for (std::size_t i = 0; i < flow.size(); ++i) {
    detail::append_f32_le(out, valid[i] ? static_cast<float>(u[i]) : kFloInvalid);
    detail::append_f32_le(out, valid[i] ? static_cast<float>(v[i]) : kFloInvalid);
  }
  detail::write_file_bytes(path, out);
}

FlowField read_kitti_flow_png(const std::filesystem::path& path) {
  const auto image = detail::read_png16(path);
  if (image.channels != 3) {
    throw Error(ErrorCode::kWrongChannelCount,
                path.string() + ": expected 3 channels, got " + std::to_string(image.channels));
  }
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<double> u(n), v(n);
  Mask valid(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (static_cast<double>(image.pixels[3 * i]) - kKittiFlowOffset) / kKittiFlowScale;
    v[i] = (static_cast<double>(image.pixels[3 * i + 1]) - kKittiFlowOffset) / kKittiFlowScale;
    valid[i] = image.pixels[3 * i + 2] > 0;
  }
  return FlowField(image.width, image.height, std::move(u), std::move(v), std::move(valid));
}

void write_kitti_flow_png(const FlowField& flow, const std::filesystem::path& path) {
  detail::Png16 image{flow.width(), flow.height(), 3, std::vector<std::uint16_t>(3 * flow.size())};
  const auto u = flow.u();
  const auto v = flow.v();
  const auto valid = flow.mask();
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (!valid[i]) continue;  // all-zero pixel encodes "invalid"
    image.pixels[3 * i] = to_u16(u[i] * kKittiFlowScale + kKittiFlowOffset);
    image.pixels[3 * i + 1] = to_u16(v[i] * kKittiFlowScale + kKittiFlowOffset);
    image.pixels[3 * i + 2] = 1;
  }
  detail::write_png16(path, image);
}

FlowField read_flow(const std::filesystem::path& path, FlowFormat format) {
  return format == FlowFormat::kFlo ? read_flo(path) : read_kitti_flow_png(path);
}

ScalarField read_scalar_map(const std::filesystem::path& path, DispFormat format, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "map scale must be positive");
  switch (format) {
    case DispFormat::kPfm: return read_pfm(path, scale);
    case DispFormat::kPng16: return read_png16_scalar(path, scale);
    case DispFormat::kFloatRaw: return read_float_raw(path, scale);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown disparity format");
}

DisparityMap read_disparity(const std::filesystem::path& path, DispFormat format,
                            double disp_scale) {
  const ScalarField raw = read_scalar_map(path, format, disp_scale);
  return DisparityMap(raw.width(), raw.height(),
                      std::vector<double>(raw.values().begin(), raw.values().end()),
                      Mask(raw.mask().begin(), raw.mask().end()));
}

void write_pfm(const ScalarField& field, const std::filesystem::path& path, double scale) {
  const std::string header =
      "Pf\n" + std::to_string(field.width()) + " " + std::to_string(field.height()) + "\n-1\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 4 * field.size());
  for (int y = field.height() - 1; y >= 0; --y) {
    for (int x = 0; x < field.width(); ++x) {
      // PFM has no mask; invalid pixels become -1 and decode as invalid disparity.
      detail::append_f32_le(out, field.valid_at(x, y) ? static_cast<float>(field.at(x, y) / scale) : -1.0f);
    }
  }
  detail::write_file_bytes(path, out);
}

void write_png16(const ScalarField& field, const std::filesystem::path& path, double disp_scale) {
  detail::Png16 image{field.width(), field.height(), 1, std::vector<std::uint16_t>(field.size())};
  const auto values = field.values();
  const auto valid = field.mask();
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (valid[i]) image.pixels[i] = to_u16(values[i] / disp_scale * kPng16Scale);
  }
  detail::write_png16(path, image);
}

void write_float_raw(const ScalarField& field, const std::filesystem::path& path, double scale) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + 4 * field.size());
  detail::append_u32_le(out, static_cast<std::uint32_t>(field.width()));
  detail::append_u32_le(out, static_cast<std::uint32_t>(field.height()));
  const auto values = field.values();
  const auto valid = field.mask();
  for (std::size_t i = 0; i < field.size(); ++i) {
    detail::append_f32_le(out, valid[i] ? static_cast<float>(values[i] / scale) : -1.0f);
  }
  detail::write_file_bytes(path, out);
}

void write_disparity(const DisparityMap& disparity, const std::filesystem::path& path,
                     DispFormat format, double disp_scale) {
  const ScalarField field = disparity.as_scalar();
  switch (format) {
    case DispFormat::kPfm: write_pfm(field, path, disp_scale); return;
    case DispFormat::kPng16: write_png16(field, path, disp_scale); return;
    case DispFormat::kFloatRaw: write_float_raw(field, path, disp_scale); return;
  }
}

}  // namespace egospeed

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "egospeed/error.hpp"
#include "egospeed/ingest.hpp"

namespace egospeed {
namespace {

constexpr std::size_t kOxtsNorthIndex = 6;
constexpr std::size_t kOxtsEastIndex = 7;

bool is_all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir,
                                                    std::string_view extension) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return files;
}

double parse_oxts_speed(std::string_view line, OxtsSpeed which) {
  std::istringstream in{std::string(line)};
  std::vector<double> fields;
  std::string token;
  while (in >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (*end != '\0') throw Error(ErrorCode::kNonNumericField, "oxts field '" + token + "'");
    fields.push_back(v);
  }
  if (fields.size() < kOxtsFieldCount) {
    throw Error(ErrorCode::kTooFewFields,
                "oxts record has " + std::to_string(fields.size()) + " fields, need " +
                    std::to_string(kOxtsFieldCount));
  }
  if (which == OxtsSpeed::kForward) return fields[kOxtsForwardIndex];
  return std::hypot(fields[kOxtsNorthIndex], fields[kOxtsEastIndex]);
}

std::vector<double> read_oxts_speed(const std::filesystem::path& dir, OxtsSpeed which) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kMissingFrameFile, "oxts directory missing: " + dir.string());
  }
  const auto files = list_frame_files(dir, ".txt");
  if (files.empty()) throw Error(ErrorCode::kMissingFrameFile, "no oxts frames in " + dir.string());

  // Numbered frame files must be contiguous.
  const bool numbered = std::all_of(files.begin(), files.end(), [](const auto& p) {
    return is_all_digits(p.stem().string());
  });
  if (numbered) {
    long expected = std::stol(files.front().stem().string());
    for (const auto& f : files) {
      const long got = std::stol(f.stem().string());
      if (got != expected) {
        throw Error(ErrorCode::kMissingFrameFile,
                    "oxts frame " + std::to_string(expected) + " missing in " + dir.string());
      }
      ++expected;
    }
  }

  std::vector<double> speeds;
  speeds.reserve(files.size());
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + f.string());
    std::string line;
    std::getline(in, line);
    try {
      speeds.push_back(parse_oxts_speed(line, which));
    } catch (const Error& e) {
      throw Error(e.code(), f.string() + ": " + e.what());
    }
  }
  return speeds;
}

void write_oxts_frame(const std::filesystem::path& path, double forward_speed) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < kOxtsFieldCount; ++i) {
    double value = 0.0;
    if (i == kOxtsNorthIndex || i == kOxtsForwardIndex) value = forward_speed;
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << (i ? " " : "") << buf;
  }
  out << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace egospeed

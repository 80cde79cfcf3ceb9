#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "egospeed/error.hpp"
#include "egospeed/ingest.hpp"

namespace egospeed {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(int line_no, const std::string& message) {
  throw Error(ErrorCode::kBadManifest, "line " + std::to_string(line_no) + ": " + message);
}

CropRect parse_rect(std::string_view value, int line_no) {
  CropRect rect;
  int* targets[] = {&rect.x, &rect.y, &rect.w, &rect.h};
  std::string text(value);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  for (int* t : targets) {
    if (!(in >> *t)) fail(line_no, "crop needs x,y,w,h");
  }
  std::string rest;
  if (in >> rest) fail(line_no, "trailing data after crop rectangle");
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0) fail(line_no, "degenerate crop");
  return rect;
}

void require_directory(const std::filesystem::path& dir, const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kBadManifest, what + " does not exist: " + dir.string());
  }
}

}  // namespace

const ManifestEntry& DatasetManifest::entry(const std::string& id) const {
  const auto it = std::find_if(recordings.begin(), recordings.end(),
                               [&](const ManifestEntry& e) { return e.id == id; });
  if (it == recordings.end()) throw Error(ErrorCode::kUnknownId, "no recording '" + id + "'");
  return *it;
}

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  DatasetManifest manifest;
  manifest.root = base_dir;
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      ManifestEntry e;
      e.id = std::string(trim(line.substr(1, line.size() - 2)));
      if (e.id.empty()) fail(line_no, "empty recording id");
      entries.push_back(std::move(e));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    if (!entries.empty()) {
      auto& e = entries.back();
      if (key == "flow_dir") e.flow_dir = value;
      else if (key == "disp_dir") e.disp_dir = value;
      else if (key == "oxts_dir") e.oxts_dir = value;
      else fail(line_no, "unknown recording key '" + key + "'");
      continue;
    }
    if (key == "root") {
      manifest.root = std::filesystem::path(value).is_absolute() ? std::filesystem::path(value)
                                                                 : base_dir / value;
    } else if (key == "flow_format") {
      const auto f = parse_flow_format(value);
      if (!f) fail(line_no, "unknown flow_format '" + value + "'");
      manifest.flow_format = *f;
    } else if (key == "disp_format") {
      const auto f = parse_disp_format(value);
      if (!f) fail(line_no, "unknown disp_format '" + value + "'");
      manifest.disp_format = *f;
    } else if (key == "disp_scale") {
      char* end = nullptr;
      manifest.disp_scale = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0' || !(manifest.disp_scale > 0.0)) {
        fail(line_no, "disp_scale must be a positive number");
      }
    } else if (key == "oxts_speed") {
      if (value == "forward") manifest.oxts_speed = OxtsSpeed::kForward;
      else if (value == "horizontal_norm") manifest.oxts_speed = OxtsSpeed::kHorizontalNorm;
      else fail(line_no, "unknown oxts_speed '" + value + "'");
    } else if (key.rfind("crop.", 0) == 0 && key.size() > 5) {
      manifest.crops[key.substr(5)] = parse_rect(value, line_no);
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  require_directory(manifest.root, "manifest root");
  for (auto& e : entries) {
    if (e.flow_dir.empty() || e.disp_dir.empty()) {
      throw Error(ErrorCode::kBadManifest, "recording " + e.id + " needs flow_dir and disp_dir");
    }
    e.flow_dir = manifest.root / e.flow_dir;
    e.disp_dir = manifest.root / e.disp_dir;
    require_directory(e.flow_dir, "flow_dir of " + e.id);
    require_directory(e.disp_dir, "disp_dir of " + e.id);
    if (!e.oxts_dir.empty()) {
      e.oxts_dir = manifest.root / e.oxts_dir;
      require_directory(e.oxts_dir, "oxts_dir of " + e.id);
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].id == entries[i - 1].id) {
      throw Error(ErrorCode::kBadManifest, "duplicate recording id " + entries[i].id);
    }
  }
  manifest.recordings = std::move(entries);
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kBadManifest, "cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  const auto rel = [&](const std::filesystem::path& p) {
    return p.lexically_relative(manifest.root).generic_string();
  };
  const std::filesystem::path manifest_dir = path.parent_path().empty() ? "." : path.parent_path();
  const auto root_rel = manifest.root.lexically_relative(manifest_dir);
  out << "root = " << (root_rel.empty() ? manifest.root : root_rel).generic_string() << '\n';
  out << "flow_format = " << to_string(manifest.flow_format) << '\n';
  out << "disp_format = " << to_string(manifest.disp_format) << '\n';
  char scale[64];
  std::snprintf(scale, sizeof(scale), "%.17g", manifest.disp_scale);
  out << "disp_scale = " << scale << '\n';
  out << "oxts_speed = "
      << (manifest.oxts_speed == OxtsSpeed::kForward ? "forward" : "horizontal_norm") << '\n';
  for (const auto& [name, r] : manifest.crops) {
    out << "crop." << name << " = " << r.x << ',' << r.y << ',' << r.w << ',' << r.h << '\n';
  }
  for (const auto& e : manifest.recordings) {
    out << "\n[" << e.id << "]\n";
    out << "flow_dir = " << rel(e.flow_dir) << '\n';
    out << "disp_dir = " << rel(e.disp_dir) << '\n';
    if (!e.oxts_dir.empty()) out << "oxts_dir = " << rel(e.oxts_dir) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string_view file_extension(FlowFormat format) noexcept {
  return format == FlowFormat::kFlo ? ".flo" : ".png";
}

std::string_view file_extension(DispFormat format) noexcept {
  switch (format) {
    case DispFormat::kPfm: return ".pfm";
    case DispFormat::kPng16: return ".png";
    case DispFormat::kFloatRaw: return ".raw";
  }
  return "";
}

Recording load_recording(const DatasetManifest& manifest, const std::string& id) {
  const ManifestEntry& e = manifest.entry(id);
  Recording rec;
  rec.id = e.id;
  rec.flow_format = manifest.flow_format;
  rec.disp_format = manifest.disp_format;
  rec.disp_scale = manifest.disp_scale;
  rec.flow_paths = list_frame_files(e.flow_dir, file_extension(manifest.flow_format));
  rec.disp_paths = list_frame_files(e.disp_dir, file_extension(manifest.disp_format));
  rec.frame_count = static_cast<int>(rec.disp_paths.size());
  if (!e.oxts_dir.empty()) rec.ground_truth = read_oxts_speed(e.oxts_dir, manifest.oxts_speed);
  rec.validate();
  return rec;
}

const std::vector<std::string>& kitti_reference_drives() {
  static const std::vector<std::string> drives = {
      "2011_09_26_drive_0001", "2011_09_26_drive_0002", "2011_09_26_drive_0005",
      "2011_09_26_drive_0009", "2011_09_26_drive_0014", "2011_09_26_drive_0019",
      "2011_09_26_drive_0027", "2011_09_26_drive_0048", "2011_09_26_drive_0056",
      "2011_09_26_drive_0059", "2011_09_26_drive_0084", "2011_09_26_drive_0091",
      "2011_09_26_drive_0095", "2011_09_26_drive_0096", "2011_09_26_drive_0104"};
  return drives;
}

}  // namespace egospeed

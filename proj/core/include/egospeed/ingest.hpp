#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "egospeed/types.hpp"

namespace egospeed {

// Middlebury .flo: float magic 202021.25, LE u32 width, LE u32 height, then
// interleaved LE float (u, v) rows. |u| or |v| above 1e9 marks an invalid pixel.
inline constexpr float kFloMagic = 202021.25f;
inline constexpr float kFloInvalid = 1e10f;

FlowField read_flo(const std::filesystem::path& path);
// Invalid pixels are written as (1e10, 1e10).
void write_flo(const FlowField& flow, const std::filesystem::path& path);

// KITTI 2015 flow PNG: 16-bit RGB, u = (R - 2^15) / 64, v = (G - 2^15) / 64, valid = B > 0.
FlowField read_kitti_flow_png(const std::filesystem::path& path);
// Values are rounded to the 1/64 grid and clamped to the 16-bit range.
void write_kitti_flow_png(const FlowField& flow, const std::filesystem::path& path);

FlowField read_flow(const std::filesystem::path& path, FlowFormat format);

// PNG16: value / 256 * disp_scale, 0 is invalid. PFM: "Pf" grayscale,
// negative scale means little-endian, rows stored bottom-to-top. FLOAT_RAW:
// LE u32 width, LE u32 height, then LE floats row-major. Negative values
// decode as invalid pixels.
DisparityMap read_disparity(const std::filesystem::path& path, DispFormat format,
                            double disp_scale = 1.0);

// Writers divide by `scale` so that reading back with the same scale restores
// the values; invalid pixels are written as 0 (PNG16) or -1 (PFM, FLOAT_RAW).
void write_pfm(const ScalarField& field, const std::filesystem::path& path, double scale = 1.0);
void write_png16(const ScalarField& field, const std::filesystem::path& path, double scale = 1.0);
void write_float_raw(const ScalarField& field, const std::filesystem::path& path,
                     double scale = 1.0);
void write_disparity(const DisparityMap& disparity, const std::filesystem::path& path,
                     DispFormat format, double disp_scale = 1.0);

// Scalar map readers shared by disparity and depth inputs (no sign check).
ScalarField read_scalar_map(const std::filesystem::path& path, DispFormat format,
                            double scale = 1.0);

// KITTI oxts: one whitespace-separated text file per frame, >= 30 fields.
enum class OxtsSpeed {
  kForward,        // field 8, vf
  kHorizontalNorm  // sqrt(vn^2 + ve^2), fields 6 and 7
};

inline constexpr std::size_t kOxtsFieldCount = 30;
inline constexpr std::size_t kOxtsForwardIndex = 8;

double parse_oxts_speed(std::string_view line, OxtsSpeed which = OxtsSpeed::kForward);
// Frame files are the *.txt entries of `dir`, in filename order.
std::vector<double> read_oxts_speed(const std::filesystem::path& dir,
                                    OxtsSpeed which = OxtsSpeed::kForward);
// Writes a synthetic oxts record with vf = forward speed, vn = forward, ve = 0.
void write_oxts_frame(const std::filesystem::path& path, double forward_speed);

// Directory listing filtered by extension (with the dot), sorted by filename.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir,
                                                    std::string_view extension);

std::string_view file_extension(FlowFormat format) noexcept;
std::string_view file_extension(DispFormat format) noexcept;

struct ManifestEntry {
  std::string id;
  std::filesystem::path flow_dir;
  std::filesystem::path disp_dir;
  std::filesystem::path oxts_dir;  // empty: no ground truth
};

// Key-value manifest:
//
//   # comment
//   root = data            (relative to the manifest file)
//   flow_format = flo      (flo | kitti_png)
//   disp_format = pfm      (pfm | png16 | float_raw)
//   disp_scale = 1.0
//   oxts_speed = forward   (forward | horizontal_norm)
//   crop.cropG = 700,100,400,240
//
//   [2011_09_26_drive_0001]
//   flow_dir = 0001/flow   (relative to root)
//   disp_dir = 0001/disp
//   oxts_dir = 0001/oxts/data
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> recordings;  // sorted by id
  FlowFormat flow_format = FlowFormat::kFlo;
  DispFormat disp_format = DispFormat::kPfm;
  double disp_scale = 1.0;
  OxtsSpeed oxts_speed = OxtsSpeed::kForward;
  std::map<std::string, CropRect> crops;  // named crop overrides

  const ManifestEntry& entry(const std::string& id) const;
};

// `base_dir` resolves a relative root; directory existence is checked.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

Recording load_recording(const DatasetManifest& manifest, const std::string& id);

// The 15 drives of the reference evaluation set.
const std::vector<std::string>& kitti_reference_drives();

}  // namespace egospeed

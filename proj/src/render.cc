#include "terrain/render.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "terrain/reconstruction.h"

namespace terrain {
namespace {

std::uint8_t to_byte(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
}

double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

}  // namespace

Gray16Image encode_disparity(const DisparityMap& disparity) {
  Gray16Image out(disparity.width(), disparity.height(), 0);
  for (std::size_t i = 0; i < disparity.size(); ++i) {
    const double d = disparity.data()[i];
    if (!is_valid_disparity(d) || d < 0.0) continue;
    out.data()[i] = static_cast<std::uint16_t>(std::min(std::lround(d) + 1, 65535L));
  }
  return out;
}

DisparityMap decode_disparity(const Gray16Image& encoded) {
  DisparityMap out(encoded.width(), encoded.height(), kInvalidDisparity);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const auto value = encoded.data()[i];
    if (value > 0) out.data()[i] = static_cast<double>(value - 1);
  }
  return out;
}

GrayImage disparity_visualization(const DisparityMap& disparity, int max_disparity) {
  GrayImage out(disparity.width(), disparity.height(), 0);
  const double scale = 255.0 / std::max(max_disparity, 1);
  for (std::size_t i = 0; i < disparity.size(); ++i) {
    const double d = disparity.data()[i];
    if (is_valid_disparity(d)) out.data()[i] = to_byte(d * scale);
  }
  return out;
}

RgbImage normal_map_image(const NormalMap& normals) {
  RgbImage out(normals.width(), normals.height(), Rgb{0, 0, 0});
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const auto& n = normals.data()[i];
    if (!is_valid(n)) continue;
    out.data()[i] = {to_byte((n.x() + 1.0) / 2.0 * 255.0), to_byte((n.y() + 1.0) / 2.0 * 255.0),
                     to_byte((n.z() + 1.0) / 2.0 * 255.0)};
  }
  return out;
}

Rgb segment_color(int segment_id) {
  // splitmix-style scramble of the id.
  std::uint64_t x = static_cast<std::uint64_t>(segment_id) + 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return {static_cast<std::uint8_t>(64 + (x & 0xbf)), static_cast<std::uint8_t>(64 + ((x >> 8) & 0xbf)),
          static_cast<std::uint8_t>(64 + ((x >> 16) & 0xbf))};
}

RgbImage label_image(const SegmentLabels& labels) {
  RgbImage out(labels.labels.width(), labels.labels.height(), Rgb{0, 0, 0});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int id = labels.labels.data()[i];
    if (id != kUnlabeled) out.data()[i] = segment_color(id);
  }
  return out;
}

std::string segment_sizes_text(const SegmentLabels& labels) {
  std::string out = "segment_id pixel_count\n";
  for (const auto& [id, count] : segment_sizes(labels)) out += fmt::format("{} {}\n", id, count);
  return out;
}

Rgb class_color(TraversabilityClass c) {
  switch (c) {
    case TraversabilityClass::Traversable: return {0, 255, 0};
    case TraversabilityClass::SemiTraversable: return {0, 0, 255};
    case TraversabilityClass::NonTraversable: return {255, 0, 0};
    case TraversabilityClass::Unknown: return {0, 0, 0};
    case TraversabilityClass::Undecided: break;
  }
  return {0, 0, 0};
}

RgbImage class_overlay(const ClassMap& classes, const GrayImage& left) {
  if (!classes.same_shape(left)) throw std::invalid_argument("class_overlay: size mismatch");
  RgbImage out(classes.width(), classes.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = classes.data()[i];
    const auto gray = left.data()[i];
    out.data()[i] = c == TraversabilityClass::Undecided ? Rgb{gray, gray, gray} : class_color(c);
  }
  return out;
}

std::string ply_text(const OrganizedPointCloud& cloud, const ClassMap& classes,
                     const GrayImage& left) {
  if (!cloud.same_shape(classes) || !cloud.same_shape(left)) {
    throw std::invalid_argument("ply_text: size mismatch");
  }
  const std::size_t count = valid_point_count(cloud);
  std::string out = fmt::format(
      "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\n"
      "property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
      "end_header\n",
      count);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.data()[i];
    if (!is_valid(p)) continue;
    const auto c = classes.data()[i];
    const Rgb rgb = c == TraversabilityClass::Undecided
                        ? Rgb{left.data()[i], left.data()[i], left.data()[i]}
                        : class_color(c);
    out += fmt::format("{:.6f} {:.6f} {:.6f} {} {} {}\n", p.x(), p.y(), p.z(), rgb[0], rgb[1], rgb[2]);
  }
  return out;
}

std::string segment_report_text(const TerrainClassification& result) {
  std::string out = fmt::format("{:>6} {:>8} {:>28} {:>10} {:>30} {:>9} {:>9} {}\n", "id", "inliers",
                                "normal", "D", "centroid", "slope_deg", "step_m", "class");
  for (const auto& s : result.segments) {
    std::string normal = "-", offset = "-", centroid = "-", slope = "-", step = "-";
    if (s.plane) {
      const auto& p = *s.plane;
      normal = fmt::format("{:.4f},{:.4f},{:.4f}", p.normal.x(), p.normal.y(), p.normal.z());
      offset = fmt::format("{:.4f}", p.offset);
      centroid = fmt::format("{:.4f},{:.4f},{:.4f}", p.centroid.x(), p.centroid.y(), p.centroid.z());
      slope = fmt::format("{:.2f}", degrees(s.slope));
    }
    if (!std::isnan(s.step_distance)) step = fmt::format("{:.4f}", s.step_distance);
    out += fmt::format("{:>6} {:>8} {:>28} {:>10} {:>30} {:>9} {:>9} {}\n", s.segment_id,
                       s.inlier_count, normal, offset, centroid, slope, step, to_string(s.final_class));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError(fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw ImageIoError(fmt::format("failed writing '{}'", path));
}

}  // namespace terrain

#pragma once

#include <string>

#include "terrain/grid.h"
#include "terrain/image_io.h"
#include "terrain/segmentation.h"
#include "terrain/ssta.h"

namespace terrain {

/// 16-bit disparity dump: INVALID -> 0, valid d -> round(d) + 1.
Gray16Image encode_disparity(const DisparityMap& disparity);
DisparityMap decode_disparity(const Gray16Image& encoded);

/// 8-bit view scaled by 255 / max_disparity (near = bright); INVALID is 0.
GrayImage disparity_visualization(const DisparityMap& disparity, int max_disparity);

/// Channel = round((n + 1) / 2 * 255) per axis; INVALID is black.
RgbImage normal_map_image(const NormalMap& normals);

/// Pseudo-random colour keyed by segment id; never black.
Rgb segment_color(int segment_id);
RgbImage label_image(const SegmentLabels& labels);
/// "segment_id pixel_count" lines.
std::string segment_sizes_text(const SegmentLabels& labels);

/// Green, blue, red, black for the four coloured classes; Undecided has no
/// colour of its own.
Rgb class_color(TraversabilityClass c);
/// Class colours over the left image; Undecided pixels keep their gray value.
RgbImage class_overlay(const ClassMap& classes, const GrayImage& left);

/// ASCII PLY, one vertex per valid point in grid order, coloured by class.
std::string ply_text(const OrganizedPointCloud& cloud, const ClassMap& classes,
                     const GrayImage& left);

/// Fixed-width table, one row per segment.
std::string segment_report_text(const TerrainClassification& result);

void write_text(const std::string& path, const std::string& text);

}  // namespace terrain

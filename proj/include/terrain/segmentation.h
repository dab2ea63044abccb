#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "terrain/grid.h"

namespace terrain {

inline constexpr int kUnlabeled = -1;

/// Superpixel surfaces. Ids are dense in [0, segment_count) and numbered in
/// row-major order of first occurrence.
struct SegmentLabels {
  Grid<int> labels;
  int segment_count = 0;
};

/// Decides whether two 4-adjacent pixels (point, normal) belong together.
using NeighbourComparator = std::function<bool(const Eigen::Vector3d& p1, const Eigen::Vector3d& n1,
                                               const Eigen::Vector3d& p2, const Eigen::Vector3d& n2)>;

/// Accepts neighbours whose normals satisfy dot(n1, n2) >= cos(alpha_r).
NeighbourComparator normal_angle_comparator(double alpha_r);

/// Plain connected components over 4-adjacency among pixels with a valid point
/// and a valid normal, joined wherever `same_surface` accepts the pair. Two
/// neighbours can share a component through a detour even if their own pair
/// is rejected.
SegmentLabels connected_components(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                   const NeighbourComparator& same_surface);

/// connected_components, then pixels sharing a component with a neighbour
/// they were not joined to are split off, and given back to a neighbouring
/// segment where all their neighbours in it are accepted. Every adjacent pair
/// inside a segment passes the comparator, and each segment lies inside one
/// plain component.
SegmentLabels segment_connected(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                const NeighbourComparator& same_surface);

/// segment_connected with normal_angle_comparator(alpha_r).
SegmentLabels segment_by_normals(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                 double alpha_r);

/// (segment id, pixel count) for every id in ascending order.
std::vector<std::pair<int, std::size_t>> segment_sizes(const SegmentLabels& labels);

}  // namespace terrain

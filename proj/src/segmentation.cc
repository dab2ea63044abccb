#include "terrain/segmentation.h"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

namespace terrain {
namespace {

/// Union-find whose roots are always the smallest member index.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

NeighbourComparator normal_angle_comparator(double alpha_r) {
  if (!(alpha_r > 0.0 && alpha_r < std::numbers::pi / 2.0)) {
    throw std::invalid_argument("alpha_r must satisfy 0 < alpha_r < pi/2");
  }
  const double threshold = std::cos(alpha_r);
  return [threshold](const Eigen::Vector3d&, const Eigen::Vector3d& n1, const Eigen::Vector3d&,
                     const Eigen::Vector3d& n2) { return n1.dot(n2) >= threshold; };
}

namespace {

SegmentLabels label_components(const OrganizedPointCloud& cloud, const NormalMap& normals,
                               const NeighbourComparator& same_surface, bool split_failing) {
  if (!cloud.same_shape(normals)) {
    throw std::invalid_argument("segmentation: cloud and normal map sizes differ");
  }
  const int w = cloud.width();
  const int h = cloud.height();
  auto eligible = [&](int u, int v) { return is_valid(cloud(u, v)) && is_valid(normals(u, v)); };

  // Accepted edges to the right (bit 0) and down (bit 1) of each pixel.
  Grid<std::uint8_t> edges(w, h, 0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!eligible(u, v)) continue;
      if (u + 1 < w && eligible(u + 1, v) &&
          same_surface(cloud(u, v), normals(u, v), cloud(u + 1, v), normals(u + 1, v))) {
        edges(u, v) |= 1;
      }
      if (v + 1 < h && eligible(u, v + 1) &&
          same_surface(cloud(u, v), normals(u, v), cloud(u, v + 1), normals(u, v + 1))) {
        edges(u, v) |= 2;
      }
    }
  }

  std::vector<std::uint8_t> isolated(cloud.size(), 0);
  auto components = [&] {
    DisjointSets sets(cloud.size());
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        const std::size_t i = cloud.index(u, v);
        if (isolated[i]) continue;
        if ((edges(u, v) & 1) && !isolated[i + 1]) sets.unite(i, i + 1);
        if ((edges(u, v) & 2) && !isolated[i + static_cast<std::size_t>(w)]) {
          sets.unite(i, i + static_cast<std::size_t>(w));
        }
      }
    }
    return sets;
  };

  // A component can join two neighbours through a detour even when their own
  // edge fails. One pixel of each such pair becomes a segment of its own.
  // Components only split afterwards, so one more pass leaves no failing pair
  // inside a segment; split-off pixels are then handed back where they fit.
  auto split_failing_pairs = [&](DisjointSets& sets) {
    std::vector<std::pair<std::size_t, std::size_t>> failing;
    std::vector<int> failures(cloud.size(), 0);
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        if (!eligible(u, v)) continue;
        const std::size_t i = cloud.index(u, v);
        if (u + 1 < w && eligible(u + 1, v) && !(edges(u, v) & 1) && sets.find(i) == sets.find(i + 1)) {
          failing.emplace_back(i, i + 1);
        }
        const std::size_t below = i + static_cast<std::size_t>(w);
        if (v + 1 < h && eligible(u, v + 1) && !(edges(u, v) & 2) && sets.find(i) == sets.find(below)) {
          failing.emplace_back(i, below);
        }
      }
    }
    if (!failing.empty()) {
      for (const auto& [a, b] : failing) {
        ++failures[a];
        ++failures[b];
      }
      for (const auto& [a, b] : failing) {
        if (isolated[a] || isolated[b]) continue;
        isolated[failures[a] > failures[b] ? a : b] = 1;
      }
      sets = components();

      // Give split-off pixels back to a neighbouring segment when every
      // neighbour they would share it with passes the comparator.
      auto accepted = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        const int u = static_cast<int>(a % static_cast<std::size_t>(w));
        const int v = static_cast<int>(a / static_cast<std::size_t>(w));
        return b == a + 1 ? (edges(u, v) & 1) != 0 : (edges(u, v) & 2) != 0;
      };
      for (bool changed = true; changed;) {
        changed = false;
        for (int v = 0; v < h; ++v) {
          for (int u = 0; u < w; ++u) {
            const std::size_t i = cloud.index(u, v);
            if (!isolated[i]) continue;
            std::size_t neighbours[4];
            int count = 0;
            if (u > 0) neighbours[count++] = i - 1;
            if (u + 1 < w) neighbours[count++] = i + 1;
            if (v > 0) neighbours[count++] = i - static_cast<std::size_t>(w);
            if (v + 1 < h) neighbours[count++] = i + static_cast<std::size_t>(w);
            std::size_t best = i;
            int best_links = 0;
            for (int k = 0; k < count; ++k) {
              const std::size_t n = neighbours[k];
              if (isolated[n] || !eligible(static_cast<int>(n % static_cast<std::size_t>(w)),
                                           static_cast<int>(n / static_cast<std::size_t>(w)))) {
                continue;
              }
              const std::size_t root = sets.find(n);
              int links = 0;
              bool ok = true;
              for (int j = 0; j < count; ++j) {
                const std::size_t m = neighbours[j];
                if (isolated[m] || sets.find(m) != root) continue;
                if (!accepted(i, m)) ok = false;
                ++links;
              }
              if (ok && (links > best_links || (links == best_links && root < best))) {
                best = root;
                best_links = links;
              }
            }
            if (best_links == 0) continue;
            sets.unite(i, best);
            isolated[i] = 0;
            changed = true;
          }
        }
      }
    }
  };

  DisjointSets sets = components();
  if (split_failing) split_failing_pairs(sets);

  SegmentLabels out{Grid<int>(w, h, kUnlabeled), 0};
  std::vector<int> dense(cloud.size(), kUnlabeled);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!eligible(u, v)) continue;
      const std::size_t root = sets.find(cloud.index(u, v));
      if (dense[root] == kUnlabeled) dense[root] = out.segment_count++;
      out.labels(u, v) = dense[root];
    }
  }
  return out;
}

}  // namespace

SegmentLabels connected_components(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                   const NeighbourComparator& same_surface) {
  return label_components(cloud, normals, same_surface, false);
}

SegmentLabels segment_connected(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                const NeighbourComparator& same_surface) {
  return label_components(cloud, normals, same_surface, true);
}

SegmentLabels segment_by_normals(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                 double alpha_r) {
  return segment_connected(cloud, normals, normal_angle_comparator(alpha_r));
}

std::vector<std::pair<int, std::size_t>> segment_sizes(const SegmentLabels& labels) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(labels.segment_count), 0);
  for (int id : labels.labels.data()) {
    if (id != kUnlabeled) ++counts[static_cast<std::size_t>(id)];
  }
  std::vector<std::pair<int, std::size_t>> out;
  out.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out.emplace_back(static_cast<int>(i), counts[i]);
  return out;
}

}  // namespace terrain

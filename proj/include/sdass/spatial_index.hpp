#pragma once

#include <utility>
#include <vector>

#include "sdass/point_cloud.hpp"

namespace sdass {

/// kd-tree over a PointCloud for exact radius and k-nearest queries.
///
/// Results are identical, as sets, to a brute-force linear scan. The indexed
/// cloud must outlive the index. Immutable after construction; safe for
/// concurrent queries.
class SpatialIndex {
public:
  explicit SpatialIndex(const PointCloud& cloud);

  /// Indices of points with distance <= radius from center, ascending.
  /// The boundary is inclusive. radius must be > 0.
  std::vector<std::int32_t> radius_neighbors(const Vector3& center,
                                             double radius) const;

  /// k nearest points as (index, distance), sorted by (distance, index).
  /// Returns fewer entries when the cloud holds fewer than k points.
  std::vector<std::pair<std::int32_t, double>> nearest(const Vector3& query,
                                                       int k) const;

  const PointCloud& cloud() const { return *cloud_; }

private:
  struct Node {
    // Leaves: [begin, end) into order_. Inner nodes: split plane + children.
    std::int32_t begin = 0;
    std::int32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int8_t axis = -1;
    double split = 0.0;
  };

  std::int32_t build(std::int32_t begin, std::int32_t end);

  const PointCloud* cloud_;
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

} // namespace sdass

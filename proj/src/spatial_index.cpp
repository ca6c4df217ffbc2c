#include "sdass/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdass {

namespace {
constexpr std::int32_t kLeafSize = 16;
} // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud) : cloud_(&cloud) {
  const auto n = static_cast<std::int32_t>(cloud.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(static_cast<std::size_t>(2 * n / kLeafSize + 2));
  root_ = build(0, n);
}

std::int32_t SpatialIndex::build(std::int32_t begin, std::int32_t end) {
  const std::int32_t node_id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();

  if (end - begin <= kLeafSize) {
    nodes_[node_id].begin = begin;
    nodes_[node_id].end = end;
    return node_id;
  }

  // Split on the widest axis at the median.
  Vector3 lo = cloud_->point(order_[begin]);
  Vector3 hi = lo;
  for (std::int32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(cloud_->point(order_[i]));
    hi = hi.cwiseMax(cloud_->point(order_[i]));
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     return cloud_->points()(axis, a) < cloud_->points()(axis, b);
                   });
  const double split = cloud_->points()(axis, order_[mid]);

  nodes_[node_id].axis = static_cast<std::int8_t>(axis);
  nodes_[node_id].split = split;
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[node_id].left = left;
  nodes_[node_id].right = right;
  return node_id;
}

std::vector<std::int32_t> SpatialIndex::radius_neighbors(const Vector3& center,
                                                         double radius) const {
  if (!(radius > 0.0)) {
    throw DegenerateInputError("radius query requires radius > 0");
  }
  const double r2 = radius * radius;
  std::vector<std::int32_t> result;
  std::vector<std::int32_t> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.axis < 0) {
      for (std::int32_t i = node.begin; i < node.end; ++i) {
        const std::int32_t idx = order_[i];
        if ((cloud_->point(idx) - center).squaredNorm() <= r2) {
          result.push_back(idx);
        }
      }
      continue;
    }
    const double diff = center[node.axis] - node.split;
    // Descend the far side only when the split plane is within reach.
    if (diff <= radius) stack.push_back(node.left);
    if (-diff <= radius) stack.push_back(node.right);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<std::pair<std::int32_t, double>> SpatialIndex::nearest(
    const Vector3& query, int k) const {
  if (k < 1) throw DegenerateInputError("k-nearest query requires k >= 1");
  using Entry = std::pair<double, std::int32_t>; // (squared distance, index)
  std::vector<Entry> heap;                       // max-heap of current best k
  heap.reserve(static_cast<std::size_t>(k) + 1);
  auto worst = [&] {
    return heap.size() < static_cast<std::size_t>(k)
               ? std::numeric_limits<double>::infinity()
               : heap.front().first;
  };
  auto offer = [&](std::int32_t idx, double d2) {
    const Entry e{d2, idx};
    if (heap.size() < static_cast<std::size_t>(k)) {
      heap.push_back(e);
      std::push_heap(heap.begin(), heap.end());
    } else if (e < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = e;
      std::push_heap(heap.begin(), heap.end());
    }
  };

  // Depth-first, near side first, pruning against the current k-th distance.
  struct Frame {
    std::int32_t node;
    double plane_dist2; // lower bound on d2 for anything in this subtree
  };
  std::vector<Frame> stack{{root_, 0.0}};
  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    if (frame.plane_dist2 > worst()) continue;
    const Node& node = nodes_[frame.node];
    if (node.axis < 0) {
      for (std::int32_t i = node.begin; i < node.end; ++i) {
        const std::int32_t idx = order_[i];
        offer(idx, (cloud_->point(idx) - query).squaredNorm());
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    const double far_bound = std::max(frame.plane_dist2, diff * diff);
    if (diff <= 0.0) {
      stack.push_back({node.right, far_bound});
      stack.push_back({node.left, frame.plane_dist2});
    } else {
      stack.push_back({node.left, far_bound});
      stack.push_back({node.right, frame.plane_dist2});
    }
  }

  std::sort(heap.begin(), heap.end());
  std::vector<std::pair<std::int32_t, double>> result;
  result.reserve(heap.size());
  for (const auto& [d2, idx] : heap) {
    result.emplace_back(idx, std::sqrt(d2));
  }
  return result;
}

} // namespace sdass

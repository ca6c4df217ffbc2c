#include "sdass/spin_image.hpp"

#include <algorithm>
#include <cmath>

#include "sdass/parallel.hpp"

namespace sdass {

void SpinImageParams::validate() const {
  if (bins < 1) throw DegenerateInputError("bins must be >= 1");
  if (!(support_radius_mr > 0.0)) {
    throw DegenerateInputError("support radius must be positive");
  }
}

FeatureVector compute_spin_image(const SpatialIndex& index,
                                 const Vector3& keypoint, const Axis& lra,
                                 const SpinImageParams& params, double mr) {
  params.validate();
  if (!(mr > 0.0)) throw DegenerateInputError("mr must be positive");

  const double support_radius = params.support_radius_mr * mr;
  const auto neighbor_idx = index.radius_neighbors(keypoint, support_radius);
  if (neighbor_idx.empty()) {
    throw EmptyFeatureError("empty support region");
  }

  const int n = params.bins;
  Eigen::VectorXd grid = Eigen::VectorXd::Zero(n * n);
  for (const std::int32_t idx : neighbor_idx) {
    const Vector3 d = index.cloud().point(idx) - keypoint;
    const double beta = d.dot(lra.vec());
    const double alpha = (d - beta * lra.vec()).norm();
    // Same ceil-and-clamp indexing convention as the SDASS cells.
    const int ia = std::clamp(
        static_cast<int>(std::ceil(alpha * n / support_radius)), 1, n);
    const int ib = std::clamp(
        static_cast<int>(
            std::ceil((support_radius + beta) * n / (2.0 * support_radius))),
        1, n);
    grid[(ib - 1) * n + (ia - 1)] += 1.0;
  }
  FeatureVector feature;
  feature.values = grid / grid.sum();
  return feature;
}

std::vector<KeypointDescription> describe_spin_keypoints(
    const SpatialIndex& index, std::span<const Vector3> keypoints,
    const SpinImageParams& params, double mr) {
  params.validate();
  const double support_radius = params.support_radius_mr * mr;
  std::vector<KeypointDescription> results(keypoints.size());
  parallel_for(keypoints.size(), [&](std::size_t i) {
    KeypointDescription& out = results[i];
    out.keypoint = keypoints[i];
    try {
      const Axis lra = compute_lra(index, keypoints[i], support_radius,
                                   params.lra_variant);
      out.feature = compute_spin_image(index, keypoints[i], lra, params, mr);
    } catch (const DegenerateKeypointError&) {
      out.failure = DescribeFailure::DegenerateKeypoint;
    } catch (const EmptyFeatureError&) {
      out.failure = DescribeFailure::EmptyFeature;
    }
  });
  return results;
}

} // namespace sdass

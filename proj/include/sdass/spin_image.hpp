#pragma once

#include <span>
#include <vector>

#include "sdass/descriptor.hpp"

namespace sdass {

/// Spin-image baseline on the same LRA machinery as SDASS.
struct SpinImageParams {
  double support_radius_mr = 20.0;
  int bins = 15; // per side; feature length is bins^2
  LraVariant lra_variant = LraVariant::SdassFullRadius;

  void validate() const;
};

/// Spin image at a keypoint with a caller-supplied spin axis.
///
/// alpha is the radial distance from the axis line, beta the signed height
/// along it; counts accumulate into a bins x bins grid over
/// alpha in [0, R], beta in [-R, R] (plain accumulation, no bilinear
/// spreading), normalized to unit sum.
FeatureVector compute_spin_image(const SpatialIndex& index,
                                 const Vector3& keypoint, const Axis& lra,
                                 const SpinImageParams& params, double mr);

/// Batch driver that derives the LRA per keypoint; mirrors
/// describe_keypoints for SDASS.
std::vector<KeypointDescription> describe_spin_keypoints(
    const SpatialIndex& index, std::span<const Vector3> keypoints,
    const SpinImageParams& params, double mr);

} // namespace sdass

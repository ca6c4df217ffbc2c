#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdass/point_cloud.hpp"

namespace sdass {

struct RegistrationResult {
  RigidTransform transform;
  std::vector<std::int32_t> inliers; // correspondence indices
  double rms_residual = 0.0;         // refit transform on its inlier set
  double raw_rms_residual = 0.0;     // winning hypothesis on the same set
  int iterations_used = 0;
};

/// Least-squares rigid alignment of index-aligned point pairs (Kabsch with
/// determinant correction, so reflections are excluded). Needs >= 3
/// non-collinear pairs; throws DegenerateInputError otherwise.
RigidTransform estimate_rigid(std::span<const Vector3> scene_points,
                              std::span<const Vector3> model_points);

/// 3-sample RANSAC over correspondences, refit on the best inlier set.
/// Hypotheses are ranked by (inlier count, lower residual, lower hypothesis
/// index), so results are deterministic per seed. Throws
/// RegistrationFailureError when no hypothesis reaches 3 inliers.
RegistrationResult ransac_register(std::span<const Vector3> scene_points,
                                   std::span<const Vector3> model_points,
                                   double inlier_eps, int max_iters,
                                   std::uint64_t seed);

} // namespace sdass

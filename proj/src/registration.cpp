#include "sdass/registration.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/SVD>
#include <Eigen/LU>

#include "sdass/rng.hpp"

namespace sdass {

namespace {

double rms_on(std::span<const Vector3> scene, std::span<const Vector3> model,
              std::span<const std::int32_t> subset, const RigidTransform& t) {
  double sum = 0.0;
  for (const std::int32_t i : subset) {
    sum += (t(scene[i]) - model[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(subset.size()));
}

} // namespace

RigidTransform estimate_rigid(std::span<const Vector3> scene_points,
                              std::span<const Vector3> model_points) {
  const std::size_t n = scene_points.size();
  if (n != model_points.size()) {
    throw DegenerateInputError("point lists must be index-aligned");
  }
  if (n < 3) {
    throw DegenerateInputError("rigid estimation requires >= 3 pairs");
  }

  Vector3 scene_centroid = Vector3::Zero();
  Vector3 model_centroid = Vector3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    scene_centroid += scene_points[i];
    model_centroid += model_points[i];
  }
  scene_centroid /= static_cast<double>(n);
  model_centroid /= static_cast<double>(n);

  Matrix3 cross = Matrix3::Zero();
  double scene_spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3 s = scene_points[i] - scene_centroid;
    const Vector3 m = model_points[i] - model_centroid;
    cross.noalias() += m * s.transpose();
    scene_spread += s.squaredNorm();
  }

  Eigen::JacobiSVD<Matrix3> svd(cross,
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector3 sv = svd.singularValues();
  // Collinear configurations leave the rotation about the line free.
  if (!(sv[1] > 1e-12 * std::max(sv[0], scene_spread))) {
    throw DegenerateInputError("rank-deficient (collinear) configuration");
  }
  Matrix3 d = Matrix3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0
                ? -1.0
                : 1.0;
  const Matrix3 rotation = svd.matrixU() * d * svd.matrixV().transpose();
  return RigidTransform(rotation, model_centroid - rotation * scene_centroid);
}

RegistrationResult ransac_register(std::span<const Vector3> scene_points,
                                   std::span<const Vector3> model_points,
                                   double inlier_eps, int max_iters,
                                   std::uint64_t seed) {
  const std::size_t n = scene_points.size();
  if (n != model_points.size()) {
    throw DegenerateInputError("point lists must be index-aligned");
  }
  if (n < 3) throw DegenerateInputError("ransac requires >= 3 correspondences");
  if (!(inlier_eps > 0.0) || max_iters < 1) {
    throw DegenerateInputError("invalid ransac parameters");
  }

  Rng rng(seed);
  const double eps2 = inlier_eps * inlier_eps;

  std::vector<std::int32_t> best_inliers;
  double best_rms = std::numeric_limits<double>::infinity();
  bool have_best = false;
  RigidTransform best_transform;

  std::array<Vector3, 3> sample_scene;
  std::array<Vector3, 3> sample_model;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::array<std::size_t, 3> pick{};
    pick[0] = rng.below(n);
    do {
      pick[1] = rng.below(n);
    } while (pick[1] == pick[0]);
    do {
      pick[2] = rng.below(n);
    } while (pick[2] == pick[0] || pick[2] == pick[1]);
    for (int k = 0; k < 3; ++k) {
      sample_scene[k] = scene_points[pick[k]];
      sample_model[k] = model_points[pick[k]];
    }

    RigidTransform hypothesis;
    try {
      hypothesis = estimate_rigid(sample_scene, sample_model);
    } catch (const DegenerateInputError&) {
      continue; // collinear minimal sample
    }

    std::vector<std::int32_t> inliers;
    for (std::size_t i = 0; i < n; ++i) {
      if ((hypothesis(scene_points[i]) - model_points[i]).squaredNorm() <=
          eps2) {
        inliers.push_back(static_cast<std::int32_t>(i));
      }
    }
    if (inliers.size() < 3) continue;
    const double rms = rms_on(scene_points, model_points, inliers, hypothesis);
    if (!have_best || inliers.size() > best_inliers.size() ||
        (inliers.size() == best_inliers.size() && rms < best_rms)) {
      have_best = true;
      best_inliers = std::move(inliers);
      best_rms = rms;
      best_transform = hypothesis;
    }
  }

  if (!have_best) {
    throw RegistrationFailureError("no hypothesis reached 3 inliers");
  }

  std::vector<Vector3> in_scene;
  std::vector<Vector3> in_model;
  in_scene.reserve(best_inliers.size());
  in_model.reserve(best_inliers.size());
  for (const std::int32_t i : best_inliers) {
    in_scene.push_back(scene_points[i]);
    in_model.push_back(model_points[i]);
  }

  RegistrationResult result;
  result.iterations_used = max_iters;
  try {
    result.transform = estimate_rigid(in_scene, in_model);
  } catch (const DegenerateInputError&) {
    result.transform = best_transform; // inlier set degenerate; keep raw fit
  }
  result.inliers = std::move(best_inliers);
  result.raw_rms_residual =
      rms_on(scene_points, model_points, result.inliers, best_transform);
  result.rms_residual =
      rms_on(scene_points, model_points, result.inliers, result.transform);
  return result;
}

} // namespace sdass

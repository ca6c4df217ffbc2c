#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sdass/axes.hpp"
#include "sdass/point_cloud.hpp"
#include "sdass/spatial_index.hpp"

namespace sdass {

/// Descriptor hyperparameters, all lengths in mesh-resolution (mr) units.
struct SdassParams {
  double support_radius_mr = 20.0;
  int n_lh = 5;  // subdivisions along the axis (height)
  int n_pr = 5;  // subdivisions along the projected-radial direction
  int n_ld = 15; // deviation-angle bins per spatial cell
  double lma_radius_mr = 7.0;
  LraVariant lra_variant = LraVariant::SdassFullRadius;

  /// Throws DegenerateInputError when a count is < 1 or a radius is <= 0.
  void validate() const;
};

/// Normalized histogram feature. Entries are non-negative and sum to 1.
struct FeatureVector {
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
};

/// Rigid map taking a keypoint to the origin and its LRA to +z. The azimuth
/// of the x/y pair is an arbitrary deterministic choice; the descriptor only
/// consumes height and projected radius, which do not depend on it.
class LocalFrameTransform {
public:
  LocalFrameTransform(const Vector3& keypoint, const Axis& lra);

  Vector3 operator()(const Vector3& q) const {
    return rotation_ * (q - keypoint_);
  }

  const Matrix3& rotation() const { return rotation_; }
  const Vector3& keypoint() const { return keypoint_; }

private:
  Matrix3 rotation_;
  Vector3 keypoint_;
};

/// Transforms points into the keypoint-centered, LRA-aligned frame.
std::vector<Vector3> transform_to_local(std::span<const Vector3> points,
                                        const Vector3& keypoint,
                                        const Axis& lra);

/// 1-based spatial cell indices of a frame-local point.
///
/// Height index ceil((R + z) * n_lh / (2R)) and projected-radial index
/// ceil(rho * n_pr / R); an index of 0 at the exact lower boundary clamps
/// to 1 (and float overshoot at the upper boundary clamps to n).
struct BinIndex {
  int lh;
  int pr;
};
BinIndex bin_indices(const Vector3& local_point, double support_radius,
                     int n_lh, int n_pr);

/// Angle between the keypoint's LRA and a neighbor's LMA, in [0, pi].
inline double deviation_angle(const Axis& lra, const Axis& lma) {
  return angle_error(lra, lma);
}

/// Marks histogram bins of cylinder cells lying wholly outside the support
/// sphere. A cell (I_lh, I_pr) is redundant iff min|height|^2 + min radial^2
/// >= R^2, evaluated in exact integer arithmetic; all n_ld angle bins of a
/// redundant cell are masked.
///
/// Flat bin layout, here and in every histogram this library builds:
///   flat = ((I_lh - 1) * n_pr + (I_pr - 1)) * n_ld + (I_ld - 1).
struct RedundantBinMask {
  std::vector<bool> redundant; // flat, length n_lh * n_pr * n_ld
  int redundant_count = 0;
  int feature_length = 0; // n_lh * n_pr * n_ld - redundant_count
};
RedundantBinMask redundant_bin_mask(int n_lh, int n_pr, int n_ld,
                                    double support_radius);

struct SdassFeature {
  FeatureVector feature;
  int lma_skipped = 0; // support points dropped for degenerate LMA
  int accumulated = 0; // support points that entered the histogram
};

/// SDASS descriptor at one keypoint. mr is supplied explicitly so scene and
/// model descriptors share identical absolute radii. When lma is given it
/// must have been built over the same index with params.lma_radius_mr.
/// Throws DegenerateKeypointError (no LRA) or EmptyFeatureError (nothing
/// accumulated).
SdassFeature compute_sdass(const SpatialIndex& index, const Vector3& keypoint,
                           const SdassParams& params, double mr,
                           const LmaField* lma = nullptr);

enum class DescribeFailure { None, DegenerateKeypoint, EmptyFeature };

struct KeypointDescription {
  Vector3 keypoint;
  std::optional<FeatureVector> feature;
  DescribeFailure failure = DescribeFailure::None;
  int lma_skipped = 0;
};

/// Batch driver: order-preserving, per-keypoint failures recorded instead of
/// aborting, results independent of batch composition and execution order.
std::vector<KeypointDescription> describe_keypoints(
    const SpatialIndex& index, std::span<const Vector3> keypoints,
    const SdassParams& params, double mr);

} // namespace sdass

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "sdass/point_cloud.hpp"
#include "sdass/spatial_index.hpp"

namespace sdass {

/// Oriented unit 3-vector used as an LRA, LMA, or normal.
class Axis {
public:
  /// Normalizes v; throws DegenerateInputError when ||v|| is (near) zero.
  explicit Axis(const Vector3& v);

  const Vector3& vec() const { return v_; }
  Axis flipped() const { return Axis(UnitTag{}, -v_); }

private:
  struct UnitTag {};
  Axis(UnitTag, const Vector3& unit) : v_(unit) {}

  Vector3 v_;
};

/// LRA construction strategy.
///
/// SdassFullRadius uses all support-radius neighbors for both the direction
/// and the sign. YangSubsetRadius estimates the direction from a subset
/// neighborhood (a fraction of the support radius, 1/3 by default) while the
/// sign still comes from all support-radius neighbors.
enum class LraVariant { SdassFullRadius, YangSubsetRadius };

/// Unnormalized scatter matrix sum_i (q_i - centroid)(q_i - centroid)^T.
/// Requires at least 3 points.
Matrix3 covariance_matrix(std::span<const Vector3> points);

/// Unit eigenvector of the smallest eigenvalue, sign canonical but
/// geometrically undetermined. m must be symmetric within 1e-9.
Axis min_eigvec(const Matrix3& m);

/// Keeps v when dot(v, sum_i (q_i - p)) >= 0, flips it otherwise.
Axis disambiguate_sign(const Axis& v, const Vector3& p,
                       std::span<const Vector3> neighbors);

/// Local reference axis at p for support radius R.
/// Throws DegenerateKeypointError for keypoints with fewer than 3 neighbors
/// in the direction-estimation radius or with zero scatter.
Axis compute_lra(const SpatialIndex& index, const Vector3& p,
                 double support_radius, LraVariant variant,
                 double subset_fraction = 1.0 / 3.0);

/// Local minimum axis: the full-radius construction at radius_mr * mr.
Axis compute_lma(const SpatialIndex& index, const Vector3& p, double mr,
                 double radius_mr = 7.0);

/// Small-radius covariance normal, the comparison baseline for LMA.
Axis compute_rn_normal(const SpatialIndex& index, const Vector3& p, double mr,
                       double radius_mr = 3.0);

/// Angle between two axes, arccos of the clamped dot product, in [0, pi].
double angle_error(const Axis& a, const Axis& b);

/// Fraction of errors strictly below threshold (default 5 degrees).
double repeatability(std::span<const double> errors,
                     double threshold = 5.0 * M_PI / 180.0);

/// Per-point LMA memo over a cloud. Slots fill lazily on first access and
/// are safe for concurrent readers; degenerate points yield nullopt.
class LmaField {
public:
  LmaField(const SpatialIndex& index, double mr, double radius_mr = 7.0);

  std::optional<Vector3> at(std::int32_t point_index) const;

  double radius() const { return radius_; }

private:
  struct Slot {
    std::once_flag once;
    bool valid = false;
    Vector3 axis = Vector3::Zero();
  };

  const SpatialIndex* index_;
  double radius_;
  std::unique_ptr<Slot[]> slots_;
};

} // namespace sdass

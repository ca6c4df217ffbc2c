#include "sdass/axes.hpp"

#include <algorithm>
#include <cmath>

#include "sdass/eigen33.hpp"

namespace sdass {

namespace {

std::vector<Vector3> gather(const PointCloud& cloud,
                            std::span<const std::int32_t> indices) {
  std::vector<Vector3> pts;
  pts.reserve(indices.size());
  for (const std::int32_t i : indices) pts.push_back(cloud.point(i));
  return pts;
}

// Shared core of the LRA/LMA/RN constructions: direction from the scatter of
// one neighborhood, sign from the point sum of another.
Axis covariance_axis(const SpatialIndex& index, const Vector3& p,
                     double direction_radius, double sign_radius) {
  const auto dir_idx = index.radius_neighbors(p, direction_radius);
  if (dir_idx.size() < 3) {
    throw DegenerateKeypointError(
        "keypoint has fewer than 3 neighbors in the direction radius");
  }
  const auto dir_pts = gather(index.cloud(), dir_idx);
  const Matrix3 cov = covariance_matrix(dir_pts);
  if (cov.cwiseAbs().maxCoeff() <= 1e-30) {
    throw DegenerateKeypointError("keypoint neighborhood has zero scatter");
  }
  const Axis direction = min_eigvec(cov);

  const auto sign_idx = direction_radius == sign_radius
                            ? dir_idx
                            : index.radius_neighbors(p, sign_radius);
  const auto sign_pts = direction_radius == sign_radius
                            ? dir_pts
                            : gather(index.cloud(), sign_idx);
  return disambiguate_sign(direction, p, sign_pts);
}

} // namespace

Axis::Axis(const Vector3& v) : v_(v) {
  const double norm = v_.norm();
  if (!(norm > 1e-30) || !v_.allFinite()) {
    throw DegenerateInputError("axis vector has (near) zero norm");
  }
  v_ /= norm;
}

Matrix3 covariance_matrix(std::span<const Vector3> points) {
  if (points.size() < 3) {
    throw DegenerateInputError("covariance requires at least 3 points");
  }
  Vector3 centroid = Vector3::Zero();
  for (const Vector3& q : points) centroid += q;
  centroid /= static_cast<double>(points.size());

  Matrix3 scatter = Matrix3::Zero();
  for (const Vector3& q : points) {
    const Vector3 d = q - centroid;
    scatter.noalias() += d * d.transpose();
  }
  return scatter;
}

Axis min_eigvec(const Matrix3& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw DegenerateInputError("matrix is not symmetric");
  }
  const SymmetricEigen3<double> eig(m);
  return Axis(eig.min_eigenvector());
}

Axis disambiguate_sign(const Axis& v, const Vector3& p,
                       std::span<const Vector3> neighbors) {
  if (neighbors.empty()) {
    throw DegenerateInputError("sign disambiguation requires neighbors");
  }
  Vector3 sum = Vector3::Zero();
  for (const Vector3& q : neighbors) sum += q - p;
  return v.vec().dot(sum) >= 0.0 ? v : v.flipped();
}

Axis compute_lra(const SpatialIndex& index, const Vector3& p,
                 double support_radius, LraVariant variant,
                 double subset_fraction) {
  if (!(support_radius > 0.0)) {
    throw DegenerateInputError("support radius must be positive");
  }
  const double direction_radius = variant == LraVariant::SdassFullRadius
                                      ? support_radius
                                      : support_radius * subset_fraction;
  return covariance_axis(index, p, direction_radius, support_radius);
}

Axis compute_lma(const SpatialIndex& index, const Vector3& p, double mr,
                 double radius_mr) {
  const double r = radius_mr * mr;
  return covariance_axis(index, p, r, r);
}

Axis compute_rn_normal(const SpatialIndex& index, const Vector3& p, double mr,
                       double radius_mr) {
  return compute_lma(index, p, mr, radius_mr);
}

double angle_error(const Axis& a, const Axis& b) {
  return std::acos(std::clamp(a.vec().dot(b.vec()), -1.0, 1.0));
}

double repeatability(std::span<const double> errors, double threshold) {
  if (errors.empty()) {
    throw DegenerateInputError("repeatability requires at least one error");
  }
  const auto below = std::count_if(errors.begin(), errors.end(),
                                   [&](double e) { return e < threshold; });
  return static_cast<double>(below) / static_cast<double>(errors.size());
}

LmaField::LmaField(const SpatialIndex& index, double mr, double radius_mr)
    : index_(&index),
      radius_(radius_mr * mr),
      slots_(new Slot[static_cast<std::size_t>(index.cloud().size())]) {}

std::optional<Vector3> LmaField::at(std::int32_t point_index) const {
  Slot& slot = slots_[point_index];
  std::call_once(slot.once, [&] {
    try {
      const Axis axis = covariance_axis(
          *index_, index_->cloud().point(point_index), radius_, radius_);
      slot.axis = axis.vec();
      slot.valid = true;
    } catch (const DegenerateKeypointError&) {
      slot.valid = false;
    }
  });
  if (!slot.valid) return std::nullopt;
  return slot.axis;
}

} // namespace sdass
